#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "relearn/cube.hpp"
#include "relearn/errors.hpp"
#include "relearn/poly.hpp"
#include "relearn/serialize.hpp"

using namespace relearn;
using Terms = std::vector<SparsePolynomial::Term>;

namespace {

CubePoint point_from_negmask(int n, std::uint64_t z) {
  std::vector<std::int8_t> b(n);
  for (int i = 0; i < n; ++i) b[i] = ((z >> i) & 1) ? -1 : 1;
  return CubePoint(std::move(b));
}

// Fourier coefficients by an exact Walsh-Hadamard transform of the values.
std::vector<Rational> walsh(const StructuredPolynomial& p) {
  const int n = p.dimension();
  const std::size_t N = std::size_t{1} << n;
  std::vector<Rational> v(N);
  for (std::size_t z = 0; z < N; ++z) v[z] = evaluate_exact(p, point_from_negmask(n, z));
  for (std::size_t h = 1; h < N; h <<= 1) {
    for (std::size_t i = 0; i < N; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const Rational a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  for (auto& c : v) c /= Rational(static_cast<long>(N));
  return v;
}

UniPoly random_outer(std::mt19937& g, int deg) {
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  std::vector<Rational> c;
  for (int i = 0; i <= deg; ++i) c.emplace_back(num(g), den(g));
  c.back() = Rational(1 + std::abs(num(g)));
  for (auto& x : c) x.canonicalize();
  return UniPoly(c);
}

StructuredPolynomial random_affine(std::mt19937& g, int n, int deg) {
  std::uniform_int_distribution<int> wd(-3, 3);
  std::vector<long long> w(n);
  for (auto& x : w) x = wd(g);
  w[0] = 1;
  return StructuredPolynomial::affine(random_outer(g, deg), wd(g), w);
}

}  // namespace

TEST_CASE("chebyshev recurrence values") {
  CHECK(chebyshev(0) == UniPoly::constant(1));
  CHECK(chebyshev(1) == UniPoly::identity());
  CHECK(chebyshev(3) == UniPoly({0, -3, 0, 4}));
  CHECK(chebyshev(4).max_abs_coefficient() == 8);
  for (int d = 0; d <= 20; ++d) {
    const UniPoly T = chebyshev(d);
    CHECK(T.degree() == d);
    Integer pow3 = 1;
    for (int i = 0; i < d; ++i) pow3 *= 3;
    CHECK(T.max_abs_coefficient() <= pow3);
    CHECK(T(Rational(1)) == 1);
    for (double th : {0.1, 0.7, 1.3, 2.9}) {
      const double v = to_double(T(from_double(std::cos(th))));
      CHECK(v == doctest::Approx(std::cos(d * th)).epsilon(1e-9));
    }
    // |T_d(t)| >= 1 outside [-1, 1]
    CHECK(abs(T(Rational(5, 4))) >= 1);
  }
}

TEST_CASE("unipoly arithmetic") {
  const UniPoly a({1, 2});
  const UniPoly b({-1, 0, 3});
  CHECK(a * b == UniPoly({-1, -2, 3, 6}));
  CHECK(a + b == UniPoly({0, 2, 3}));
  CHECK((a - a).is_zero());
  CHECK(a.pow(3) == a * a * a);
  const UniPoly c = b.compose_affine(Rational(2), Rational(-1));
  for (int t = -3; t <= 3; ++t) CHECK(c(Rational(t)) == b(Rational(2 * t - 1)));
}

TEST_CASE("rational text") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  CHECK(parse_rational("+7") == 7);
  CHECK(parse_rational("2.5e1") == 25);
  CHECK(to_string(parse_rational("-6/4")) == "-3/2");
  CHECK(to_string(Rational(4)) == "4");
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK(from_double(0.375) == Rational(3, 8));
}

TEST_CASE("monomial enumeration") {
  const auto ms = monomials_up_to(6, 2, 1000);
  CHECK(ms.size() == 1 + 6 + 15);
  CHECK(ms.front() == 0);
  for (std::size_t i = 1; i < ms.size(); ++i) CHECK(monomial_less(ms[i - 1], ms[i]));
  CHECK_THROWS_AS(monomials_up_to(20, 5, 100), ResourceError);
}

TEST_CASE("sparse polynomial basics") {
  const SparsePolynomial m1 = SparsePolynomial::constant(4, -1);
  CHECK(m1.evaluate(CubePoint{1, -1, 1, 1}) == -1.0);

  const SparsePolynomial p(3, Terms{{0b001, 1}, {0b001, 2}, {0b110, Rational(1, 2)}, {0b010, 0}});
  CHECK(p.size() == 2);
  CHECK(p.coefficient(0b001) == 3);
  CHECK(p.degree() == 2);
  CHECK(p.weight() == Rational(7, 2));

  // x1 * x1 = 1
  const SparsePolynomial x1(3, Terms{{0b001, 1}});
  CHECK(x1 * x1 == SparsePolynomial::constant(3, 1));
  CHECK((p - p).is_zero());

  for (std::uint64_t i = 0; i < 8; ++i) {
    const CubePoint x = CubePoint::from_index(3, i);
    const Rational want = 3 * x[0] + Rational(1, 2) * x[1] * x[2];
    CHECK(p.evaluate_exact(x) == want);
    CHECK(p.evaluate(x) == doctest::Approx(want.get_d()));
    CHECK(p.evaluate_mask(x.neg_mask()) == doctest::Approx(want.get_d()));
  }
  CHECK_THROWS_AS(p.evaluate(CubePoint{1, 1}), InputError);
}

TEST_CASE("structured evaluation examples") {
  const auto lin = StructuredPolynomial::affine(chebyshev(1), 0, {1, 1, 1});
  CHECK(evaluate(lin, CubePoint{1, 1, -1}) == 1.0);
  const auto t3 = StructuredPolynomial::affine(chebyshev(3), 0, {1, 1, 1});
  CHECK(evaluate_exact(t3, CubePoint{1, 1, 1}) == 99);
  CHECK(t3.declared_degree() == 3);
}

TEST_CASE("expand small identities") {
  const auto sq = StructuredPolynomial::affine(UniPoly({0, 0, 1}), 0, {1, 1});
  const SparsePolynomial e = expand(sq);
  CHECK(e == SparsePolynomial(2, Terms{{0, 2}, {0b11, 2}}));

  const SparsePolynomial s(3, Terms{{0, -1}, {0b101, Rational(2, 3)}});
  CHECK(expand(StructuredPolynomial(s)) == s);

  const SparsePolynomial maj3(3, Terms{{0b001, Rational(1, 2)},
                                  {0b010, Rational(1, 2)},
                                  {0b100, Rational(1, 2)},
                                  {0b111, Rational(-1, 2)}});
  CHECK(maj3.weight() == 2);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const CubePoint x = CubePoint::from_index(3, i);
    const int s3 = x[0] + x[1] + x[2];
    CHECK(maj3.evaluate_exact(x) == (s3 > 0 ? 1 : -1));
  }
  const auto wd = weight_and_degree(StructuredPolynomial(maj3));
  CHECK(wd.weight == 2.0);
  CHECK(wd.degree == 3);
  CHECK(wd.exact);

  const auto wd2 = weight_and_degree(StructuredPolynomial(SparsePolynomial(1, Terms{{0, -1}, {1, 2}})));
  CHECK(wd2.weight == 3.0);
  CHECK(wd2.degree == 1);
}

TEST_CASE("expand agrees with a Walsh transform oracle") {
  std::mt19937 g(20231);
  for (int n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const int deg = 1 + rep + n % 3;
      StructuredPolynomial p = random_affine(g, n, deg);
      if (rep == 1) p = StructuredPolynomial::composed(random_outer(g, 2), p);
      if (rep == 2) {
        p = StructuredPolynomial::sum({{Rational(1, 3), p}, {Rational(-2), random_affine(g, n, 2)}},
                                      Rational(5, 7));
      }
      const SparsePolynomial e = expand(p);
      const auto oracle = walsh(p);
      int maxdeg = 0;
      for (std::uint64_t S = 0; S < oracle.size(); ++S) {
        CHECK(e.coefficient(S) == oracle[S]);
        if (oracle[S] != 0) maxdeg = std::max(maxdeg, monomial_degree(S));
      }
      CHECK(e.degree() == maxdeg);
      CHECK(e.degree() <= p.declared_degree());
      CHECK(to_double(e.weight()) <= analytic_weight_bound(p) * (1 + 1e-12));
      const double tol = 1e-12 * std::max(1.0, to_double(e.weight()));
      CubeEvaluator ev(p);
      for (std::uint64_t z = 0; z < oracle.size(); z += 1 + oracle.size() / 64) {
        const CubePoint x = point_from_negmask(n, z);
        const double exact = to_double(evaluate_exact(p, x));
        CHECK(std::abs(ev(x) - exact) <= tol);
        CHECK(std::abs(evaluate(p, x) - exact) <= tol);
        CHECK(std::abs(e.evaluate(x) - exact) <= tol);
      }
    }
  }
}

TEST_CASE("cap rule falls back to the analytic bound") {
  std::vector<long long> w(30, 1);
  const auto p = StructuredPolynomial::affine(chebyshev(6), 0, w);
  CHECK_THROWS_AS(expand(p), ResourceError);
  const auto wd = weight_and_degree(p);
  CHECK_FALSE(wd.exact);
  CHECK(wd.degree == 6);
  CHECK(wd.weight == doctest::Approx(analytic_weight_bound(p)));
}

TEST_CASE("input negation and literal substitution") {
  std::mt19937 g(7);
  const auto p = random_affine(g, 4, 3);
  const auto q = negate_inputs(p);
  const std::vector<Literal> map{{5, false}, {2, true}, {4, false}, {1, true}};
  const auto r = substitute_literals(p, 6, map);
  CHECK(r.dimension() == 6);
  for (std::uint64_t i = 0; i < 64; ++i) {
    const CubePoint y = CubePoint::from_index(6, i);
    CubePoint x{map[0].eval(y), map[1].eval(y), map[2].eval(y), map[3].eval(y)};
    CHECK(evaluate_exact(r, y) == evaluate_exact(p, x));
    if (i < 16) {
      const CubePoint z = CubePoint::from_index(4, i);
      CHECK(evaluate_exact(q, z) == evaluate_exact(p, z.negated()));
    }
  }
  CHECK_THROWS_AS(substitute_literals(p, 6, {{1, false}, {1, true}, {2, false}, {3, false}}), InputError);
}

TEST_CASE("scale and constant shift") {
  const auto p = StructuredPolynomial::affine(chebyshev(2), 1, {1, -2});
  const auto q = add_constant(scale(p, Rational(-3, 2)), Rational(1, 4));
  for (std::uint64_t i = 0; i < 4; ++i) {
    const CubePoint x = CubePoint::from_index(2, i);
    CHECK(evaluate_exact(q, x) == Rational(-3, 2) * evaluate_exact(p, x) + Rational(1, 4));
  }
}

TEST_CASE("json round trip") {
  std::mt19937 g(11);
  const auto a = random_affine(g, 5, 3);
  const auto c = StructuredPolynomial::composed(chebyshev(2), a);
  const auto s = StructuredPolynomial::sum({{Rational(1, 2), c}, {Rational(1), a}}, Rational(-1));
  for (const auto& p : {a, c, s, StructuredPolynomial(expand(a))}) {
    const auto back = structured_from_json(Json::parse(to_json(p).dump()));
    for (std::uint64_t i = 0; i < 32; ++i) {
      const CubePoint x = CubePoint::from_index(5, i);
      CHECK(evaluate_exact(back, x) == evaluate_exact(p, x));
    }
  }
  CHECK(sparse_from_json(to_json(expand(a))) == expand(a));
  CHECK_THROWS_AS(sparse_from_json(Json::parse(R"({"n":2,"terms":[{"vars":[3],"coef":"1"}]})")), InputError);
}
