#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relearn/certify.hpp"
#include "relearn/constructions.hpp"
#include "relearn/errors.hpp"

using namespace relearn;
using Terms = std::vector<SparsePolynomial::Term>;

namespace {

// direct double evaluation of the S_k formula
double sk_oracle(const KahnParams& p, double t) {
  auto raw = [&](double s) {
    double v = 1.0;
    for (int i = 0; i <= p.a; ++i) v *= s - i;
    for (long long j = p.W - p.b; j <= p.W - 1; ++j) v *= s - static_cast<double>(j);
    const double u = (s - p.a) / static_cast<double>(p.W - p.b - p.a);
    const double tr = std::abs(u) <= 1 ? std::cos(p.r * std::acos(u))
                                       : (u > 0 ? 1 : (p.r % 2 ? -1 : 1)) * std::cosh(p.r * std::acosh(std::abs(u)));
    return v * tr;
  };
  return raw(t) / raw(static_cast<double>(p.W));
}

int oracle_blocking(int n, int d, double eps) {
  const double R = double(n) * n * std::log(1 / eps) / (double(d) * d);
  for (int t = n; t >= 1; --t) {
    if (n % t) continue;
    if (t == 1) return 1;
    if (R < std::exp(1.0)) continue;
    if (t == 2 || t / std::log(double(t)) <= R) return t;
  }
  return 1;
}

void same_function(const StructuredPolynomial& a, const StructuredPolynomial& b, int n) {
  for (std::uint64_t i = 0; i < (1ull << n); ++i) {
    const CubePoint x = CubePoint::from_index(n, i);
    CHECK(evaluate(a, x) == doctest::Approx(evaluate(b, x)).epsilon(1e-9));
  }
}

SparsePolynomial maj3_exact() {
  return SparsePolynomial(3, Terms{{0b001, Rational(1, 2)},
                              {0b010, Rational(1, 2)},
                              {0b100, Rational(1, 2)},
                              {0b111, Rational(-1, 2)}});
}

}  // namespace

TEST_CASE("quarter construction arithmetic") {
  const Halfspace h{0, {1}};
  const auto p = halfspace_pos_quarter(h);
  CHECK(evaluate_exact(p, CubePoint{-1}) == Rational(-3, 4));
  CHECK(evaluate_exact(p, CubePoint{1}) == Rational(77, 4));
  CHECK(p.declared_degree() == 4);
}

TEST_CASE("quarter images on majorities and halfspaces") {
  std::vector<Concept> cs;
  for (int n = 1; n <= 11; n += 2) {
    std::vector<int> v;
    for (int i = 1; i <= n; ++i) v.push_back(i);
    cs.push_back(make_majority(n, v));
  }
  cs.push_back(parse_concept("HALFSPACE 1 3 -2 1 0 1"));
  cs.push_back(parse_concept("HALFSPACE -2 1 1 1 1"));
  for (const auto& c : cs) {
    const auto p = halfspace_pos_quarter(as_halfspace(c));
    const long long W = as_halfspace(c).weight();
    const int d = static_cast<int>(std::ceil(std::sqrt(double(W)) - 1e-12));
    CHECK(p.declared_degree() == 4 * d);
    for (std::uint64_t i = 0; i < (1ull << c.dimension()); ++i) {
      const CubePoint x = CubePoint::from_index(c.dimension(), i);
      const Rational v = evaluate_exact(p, x);
      if (c(x) > 0) {
        CHECK(v >= 3);
      } else {
        CHECK(v >= -1);
        CHECK(v <= Rational(-3, 4));
      }
    }
    CHECK(verify_onesided(p, c, 0.25, Sign::Positive).ok);
  }
}

TEST_CASE("kahn parameters") {
  for (long long W : {20LL, 64LL, 257LL}) {
    for (int k : {8, 12, 16, 40}) {
      const double lg = std::log2(double(W));
      const int a = int(std::ceil(k / (4 * lg)));
      const int b = int(std::ceil(double(k) * k / (4 * W * lg)));
      const int r = k - (a + 1) - b;
      if (r < 0) {
        CHECK_THROWS_AS(default_kahn_params(W, k), ParameterError);
        continue;
      }
      const KahnParams p = default_kahn_params(W, k);
      CHECK(p.a == a);
      CHECK(p.b == b);
      CHECK(p.r == r);
      CHECK(p.degree() == k);
    }
  }
  const KahnParams p = default_kahn_params(20, 12);
  CHECK(p.a == 1);
  CHECK(p.b == 1);
  CHECK(p.r == 9);
  CHECK(default_kahn_params(64, 16).a == 1);
  CHECK_THROWS_AS(default_kahn_params(2, 3), ParameterError);
  CHECK_THROWS_AS(default_kahn_params(1, 8), ParameterError);
  CHECK_THROWS_AS(kahn_sk({5, 8, 3, 2, 1}), ParameterError);
}

TEST_CASE("kahn polynomial identities") {
  const long long W = 20;
  Rational prev_max = -1;
  for (int k : {8, 12, 16}) {
    const KahnParams p = default_kahn_params(W, k);
    const UniPoly S = kahn_sk(p);
    CHECK(S.degree() == p.degree());
    CHECK(S.degree() <= k);
    CHECK(S(Rational(static_cast<long>(W))) == 1);
    for (int i = 0; i <= p.a; ++i) CHECK(S(Rational(i)) == 0);
    for (long long j = W - p.b; j < W; ++j) CHECK(S(Rational(static_cast<long>(j))) == 0);
    Rational mx = 0;
    for (int t = 0; t < W; ++t) {
      const Rational v = S(Rational(t));
      CHECK(to_double(v) == doctest::Approx(sk_oracle(p, t)).epsilon(1e-9).scale(1e-12));
      mx = std::max(mx, Rational(abs(v)));
    }
    if (prev_max >= 0) CHECK(mx < prev_max);
    prev_max = mx;
    for (long long t = W; t <= 2 * W; ++t) CHECK(S(Rational(static_cast<long>(t))) >= 1);
    const double c = std::log(to_double(S.max_abs_coefficient())) / (k * std::log(double(W)));
    MESSAGE("W=20 k=" << k << " coefficient exponent c=" << c);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("doubling schedule") {
  const auto s = doubling_schedule(19, 0.1);
  const int k0 = int(std::ceil(std::sqrt(19 * std::log2(19.0) * std::log(20.0))));
  REQUIRE(!s.empty());
  CHECK(s.front() == k0);
  CHECK(s.back() == 76);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) CHECK(s[i] == 2 * s[i - 1]);
  CHECK_THROWS_AS(doubling_schedule(19, 0.0), ParameterError);
}

TEST_CASE("eps construction small cases") {
  const Concept maj3 = make_majority(3, {1, 2, 3});
  const Approximant a = halfspace_onesided_eps(maj3, Sign::Positive, 0.1);
  CHECK(a.certified);
  CHECK(verify_onesided(a.poly, maj3, 0.1, Sign::Positive).ok);
  CHECK(a.degree_bound <= a.k);

  const Concept dict = make_majority(1, {1});
  const Approximant b = halfspace_onesided_eps(dict, Sign::Positive, 0.1);
  CHECK(evaluate(b.poly, CubePoint{1}) >= 0.9);
  CHECK(std::abs(evaluate(b.poly, CubePoint{-1}) + 1) <= 0.1);

  CHECK_THROWS_AS(halfspace_onesided_eps(maj3, Sign::Positive, 0.6), ParameterError);
  CHECK_THROWS_AS(halfspace_onesided_eps(maj3, Sign::Positive, 0.0), ParameterError);
}

TEST_CASE("negative sign is the reflected positive construction") {
  for (const char* text : {"MAJ 1 2 3", "HALFSPACE 1 2 -1 1", "HALFSPACE -2 1 1 1 2"}) {
    const Concept c = parse_concept(text);
    const Approximant neg = halfspace_onesided_eps(c, Sign::Negative, 0.1);
    CHECK(neg.certified);
    CHECK(verify_onesided(neg.poly, c, 0.1, Sign::Negative).ok);
    const Approximant pos = halfspace_onesided_eps(reflect(c), Sign::Positive, 0.1);
    if (pos.k == neg.k) same_function(neg.poly, negate_onesided(pos.poly), c.dimension());
  }
}

TEST_CASE("negate_onesided") {
  const StructuredPolynomial m(maj3_exact());
  same_function(negate_onesided(negate_onesided(m)), m, 3);
  same_function(negate_onesided(m), m, 3);
  const auto c = negate_onesided(StructuredPolynomial::constant(3, -1));
  for (std::uint64_t i = 0; i < 8; ++i) CHECK(evaluate_exact(c, CubePoint::from_index(3, i)) == 1);
}

TEST_CASE("or and and composition") {
  const Concept left = parse_concept("MAJ 1 2 3", 6);
  const Concept right = parse_concept("MAJ 4 5 6", 6);
  const Approximant pl = halfspace_onesided_eps(left, Sign::Positive, 0.125);
  const Approximant pr = halfspace_onesided_eps(right, Sign::Positive, 0.125);
  REQUIRE(pl.certified);
  REQUIRE(pr.certified);

  same_function(or_compose({pl.poly}), pl.poly, 6);
  same_function(and_compose({pl.poly}), pl.poly, 6);
  const auto m1 = StructuredPolynomial::constant(6, -1);
  same_function(or_compose({m1, m1, m1}), m1, 6);
  CHECK_THROWS_AS(or_compose({}), InputError);

  const auto orp = or_compose({pl.poly, pr.poly});
  const Concept orc = parse_concept("DNF (+1 +2)(+1 +3)(+2 +3)(+4 +5)(+4 +6)(+5 +6)");
  CHECK(verify_onesided(orp, orc, 0.25, Sign::Positive).ok);

  const SparsePolynomial el = expand(pl.poly), er = expand(pr.poly), eo = expand(orp);
  CHECK(eo.degree() == std::max(el.degree(), er.degree()));
  CHECK(eo.weight() <= el.weight() + er.weight() + 1);
  CHECK(orp.declared_degree() == std::max(pl.poly.declared_degree(), pr.poly.declared_degree()));

  const Approximant nl = halfspace_onesided_eps(left, Sign::Negative, 0.125);
  const Approximant nr = halfspace_onesided_eps(right, Sign::Negative, 0.125);
  const auto andp = and_compose({nl.poly, nr.poly});
  const Concept andc = parse_concept("CNF (+1 +2)(+1 +3)(+2 +3)(+4 +5)(+4 +6)(+5 +6)");
  CHECK(verify_onesided(andp, andc, 0.25, Sign::Negative).ok);
  const SparsePolynomial ea = expand(andp);
  CHECK(ea.degree() == std::max(expand(nl.poly).degree(), expand(nr.poly).degree()));
  CHECK(ea.weight() <= expand(nl.poly).weight() + expand(nr.poly).weight() + 1);

  same_function(andp, negate_onesided(or_compose({negate_onesided(nl.poly), negate_onesided(nr.poly)})), 6);
}

TEST_CASE("blocking rule") {
  for (int n : {1, 4, 6, 8, 12, 30}) {
    for (int d : {1, 2, 3, 5, 8, 20}) {
      for (double eps : {0.25, 0.1, 0.01}) CHECK(choose_blocking(n, d, eps) == oracle_blocking(n, d, eps));
    }
  }
  CHECK(choose_blocking(8, 5, 0.25) == 4);
}

TEST_CASE("and tradeoff") {
  const Approximant a = and_n_tradeoff(8, 5, 0.25);
  CHECK(a.certified);
  const Concept and8 = make_and(8, 8);
  for (std::uint64_t i = 0; i < 256; ++i) {
    const CubePoint x = CubePoint::from_index(8, i);
    CHECK(std::abs(evaluate(a.poly, x) - and8(x)) <= 0.25 + 1e-12);
  }

  // t = 1: exact product form
  const Approximant one = and_n_tradeoff(3, 50, 0.25);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const CubePoint x = CubePoint::from_index(3, i);
    CHECK(evaluate_exact(one.poly, x) == make_and(3, 3)(x));
  }

  // t = n: depends only on the number of +1 inputs
  REQUIRE(choose_blocking(4, 1, 0.25) == 4);
  const Approximant cnt = and_n_tradeoff(4, 1, 0.25);
  CHECK(cnt.certified);
  std::vector<double> by_count(5, std::nan(""));
  for (std::uint64_t i = 0; i < 16; ++i) {
    const CubePoint x = CubePoint::from_index(4, i);
    int s = 0;
    for (int j = 0; j < 4; ++j) s += x[j] > 0;
    const double v = evaluate(cnt.poly, x);
    if (std::isnan(by_count[s])) by_count[s] = v;
    CHECK(v == doctest::Approx(by_count[s]));
  }
}

TEST_CASE("dnf and cnf constructions") {
  const Concept f = parse_concept("DNF (+1 +2 +3)(+4 -5 +6)");
  for (int d : {1, 3, 6}) {
    const Approximant a = dnf_pos_onesided(f, d, 0.25);
    CHECK(a.certified);
    CHECK(verify_onesided(a.poly, f, 0.25, Sign::Positive).ok);
  }
  const Concept single = parse_concept("DNF (+1 -2 +3)");
  const Approximant s = dnf_pos_onesided(single, 2, 0.25);
  CHECK(s.certified);

  const Concept taut = parse_concept("DNF (+1)(-1 +2)(-1 -2)");
  const Approximant t = dnf_pos_onesided(taut, 2, 0.25);
  CHECK(t.certified);
  CHECK(t.certificate->worst_neg == -std::numeric_limits<double>::infinity());

  const Concept g = parse_concept("CNF (+1 -2)(+3 +4)");
  const Approximant c = cnf_neg_onesided(g, 2, 0.25);
  CHECK(c.certified);
  CHECK(verify_onesided(c.poly, g, 0.25, Sign::Negative).ok);
}

TEST_CASE("exact halfspace interpolant") {
  for (const char* text : {"MAJ 1 2 3 4 5", "HALFSPACE 1 3 -2 1 0 1"}) {
    const Concept c = parse_concept(text);
    const auto p = halfspace_exact(as_halfspace(c));
    CHECK(verify_twosided(p, c, 0.0).ok);
  }
}
