#include "relearn/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "relearn/errors.hpp"

namespace relearn {

// ---------------------------------------------------------------- Kahn

KahnParams default_kahn_params(long long W, int k) {
  if (W < 2) throw ParameterError("Kahn parameters need W >= 2, got " + std::to_string(W));
  if (k < 3) throw ParameterError("Kahn parameters need k >= 3, got " + std::to_string(k));
  const double lg = std::log2(static_cast<double>(W));
  KahnParams p;
  p.W = W;
  p.k = k;
  p.a = std::max(0, static_cast<int>(std::ceil(k / (4.0 * lg))));
  p.b = std::max(0, static_cast<int>(std::ceil(static_cast<double>(k) * k / (4.0 * W * lg))));
  p.r = k - (p.a + 1) - p.b;
  if (p.r < 0) {
    throw ParameterError("Kahn parameters invalid for W = " + std::to_string(W) + ", k = " +
                         std::to_string(k) + ": r = k - (a+1) - b = " + std::to_string(p.r) + " < 0");
  }
  if (W - p.b - p.a <= 0) {
    throw ParameterError("Kahn parameters invalid for W = " + std::to_string(W) + ", k = " +
                         std::to_string(k) + ": W - b - a <= 0");
  }
  return p;
}

KahnParams root_covering_params(long long W) {
  if (W < 1) throw ParameterError("root-covering parameters need W >= 1");
  return {W, static_cast<int>(W), static_cast<int>(W - 1), 0, 0};
}

std::optional<KahnParams> schedule_params(long long W, int k) {
  try {
    return default_kahn_params(W, k);
  } catch (const ParameterError&) {
    if (k >= W) {
      KahnParams p = root_covering_params(W);
      p.k = k;
      return p;
    }
    return std::nullopt;
  }
}

UniPoly kahn_sk(const KahnParams& p) {
  if (p.a < 0 || p.b < 0 || p.r < 0) throw ParameterError("Kahn parameters must be nonnegative");
  const long long span = p.W - p.b - p.a;
  if (span <= 0) throw ParameterError("Kahn parameters need W - b - a > 0");
  UniPoly s = UniPoly::constant(1);
  for (long long i = 0; i <= p.a; ++i) s = s * UniPoly::linear(1, Rational(static_cast<long>(-i)));
  for (long long j = p.W - p.b; j <= p.W - 1; ++j) {
    s = s * UniPoly::linear(1, Rational(static_cast<long>(-j)));
  }
  // T_r((t - a) / (W - b - a))
  const Rational inv(1, static_cast<unsigned long>(span));
  s = s * chebyshev(p.r).compose_affine(inv, Rational(static_cast<long>(-p.a)) * inv);
  const Rational c = s(Rational(static_cast<long>(p.W)));
  return (Rational(1) / c) * s;
}

std::vector<int> doubling_schedule(long long W, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  const double lg = std::max(1.0, std::log2(static_cast<double>(W)));
  const long long last = 4 * W;
  long long k = static_cast<long long>(std::ceil(std::sqrt(W * lg * std::log(2.0 / eps))));
  k = std::max<long long>(k, 3);
  std::vector<int> out;
  while (k < last) {
    out.push_back(static_cast<int>(k));
    k *= 2;
  }
  out.push_back(static_cast<int>(std::max<long long>(last, 3)));
  return out;
}

// ---------------------------------------------------------------- halfspaces

Halfspace as_halfspace(const Concept& c) {
  if (const auto* h = c.as<Halfspace>()) return *h;
  if (const auto* m = c.as<Majority>()) {
    Halfspace h;
    h.w.assign(static_cast<std::size_t>(c.dimension()), 0);
    for (int v : m->vars) h.w[static_cast<std::size_t>(v - 1)] = 1;
    return h;
  }
  throw InputError("expected a halfspace or majority concept, got '" + to_string(c) + "'");
}

namespace {

long long require_weight(const Halfspace& h) {
  const long long W = h.weight();
  if (W < 1) throw ParameterError("halfspace weight must be >= 1");
  return W;
}

Concept halfspace_concept(const Halfspace& h) {
  return Concept(static_cast<int>(h.w.size()), h);
}

}  // namespace

StructuredPolynomial halfspace_pos_quarter(const Halfspace& h) {
  const long long W = require_weight(h);
  const int d = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(W)) - 1e-12));
  int dd = std::max(d, 0);
  while (static_cast<long long>(dd) * dd < W) ++dd;
  while (dd > 0 && static_cast<long long>(dd - 1) * (dd - 1) >= W) --dd;
  const UniPoly G = chebyshev(dd).compose_affine(Rational(2, static_cast<unsigned long>(W)), 1);
  const UniPoly P = Rational(1, 4) * G.pow(4) - UniPoly::constant(1);
  return StructuredPolynomial::affine(P, h.w0, h.w);
}

StructuredPolynomial halfspace_exact(const Halfspace& h) {
  const long long W = require_weight(h);
  std::vector<char> reach(static_cast<std::size_t>(2 * W + 1), 0);
  reach[static_cast<std::size_t>(h.w0 + W)] = 1;
  for (long long wi : h.w) {
    if (wi == 0) continue;
    std::vector<char> next(reach.size(), 0);
    for (long long v = -W; v <= W; ++v) {
      if (!reach[static_cast<std::size_t>(v + W)]) continue;
      for (long long u : {v + wi, v - wi}) {
        if (u >= -W && u <= W) next[static_cast<std::size_t>(u + W)] = 1;
      }
    }
    reach = std::move(next);
  }
  std::vector<Rational> xs, ys;
  for (long long v = -W; v <= W; ++v) {
    if (reach[static_cast<std::size_t>(v + W)]) {
      xs.emplace_back(static_cast<long>(v));
      ys.emplace_back(sgn(v));
    }
  }
  // Newton divided differences.
  const std::size_t m = xs.size();
  std::vector<Rational> coef = ys;
  for (std::size_t j = 1; j < m; ++j) {
    for (std::size_t i = m - 1; i >= j; --i) {
      coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j]);
    }
  }
  UniPoly P = UniPoly::constant(coef[m - 1]);
  for (std::size_t i = m - 1; i-- > 0;) {
    P = P * UniPoly::linear(1, -xs[i]) + UniPoly::constant(coef[i]);
  }
  return StructuredPolynomial::affine(P, h.w0, h.w);
}

namespace {

void finish(Approximant& a) {
  a.degree_bound = a.poly.declared_degree();
  a.weight_bound = analytic_weight_bound(a.poly);
}

// 2 S_k(W' + 2L - 1) - 1 over the linear form L, W' = 2W + 1.
StructuredPolynomial shifted_sk(const Halfspace& h, const KahnParams& params) {
  const long long W = h.weight();
  const UniPoly wrapped = Rational(2) * kahn_sk(params) - UniPoly::constant(1);
  return StructuredPolynomial::affine(
      wrapped.compose_affine(2, Rational(static_cast<long>(2 * W))), h.w0, h.w);
}

Approximant positive_halfspace_eps(const Halfspace& h, double eps, const ConstructOptions& opts) {
  const long long W = require_weight(h);
  const long long Wp = 2 * W + 1;
  const Concept target = halfspace_concept(h);
  const bool exhaustive = target.dimension() <= opts.cert.max_vars;
  Approximant out;
  out.mode = ApproxMode::Positive;
  out.eps = eps;
  bool have = false;
  for (int k : doubling_schedule(Wp, eps)) {
    const auto params = schedule_params(Wp, k);
    if (!params) continue;
    out.tried.push_back(k);
    out.poly = shifted_sk(h, *params);
    out.k = k;
    have = true;
    if (!exhaustive) break;
    out.certificate = verify_onesided(out.poly, target, eps, Sign::Positive, opts.cert);
    if (out.certificate->ok) {
      out.certified = true;
      break;
    }
  }
  if (!have) {
    throw ParameterError("no valid Kahn parameters on the schedule for W' = " + std::to_string(Wp));
  }
  finish(out);
  return out;
}

}  // namespace

Approximant halfspace_onesided_eps(const Concept& c, Sign sign, double eps,
                                   const ConstructOptions& opts) {
  if (!(eps > 0.0 && eps <= 0.5)) throw ParameterError("eps must lie in (0, 1/2]");
  const Halfspace h = as_halfspace(c);
  if (sign == Sign::Positive) return positive_halfspace_eps(h, eps, opts);

  // -h(-x) is computed by the halfspace (1 - w0, w).
  Halfspace reflected = h;
  reflected.w0 = 1 - h.w0;
  Approximant pos = positive_halfspace_eps(reflected, eps, opts);
  Approximant out = pos;
  out.mode = ApproxMode::Negative;
  out.poly = negate_onesided(pos.poly);
  out.certificate.reset();
  out.certified = false;
  if (c.dimension() <= opts.cert.max_vars) {
    out.certificate = verify_onesided(out.poly, halfspace_concept(h), eps, Sign::Negative, opts.cert);
    out.certified = out.certificate->ok;
  }
  finish(out);
  return out;
}

// ---------------------------------------------------------------- composition

StructuredPolynomial negate_onesided(const StructuredPolynomial& p) {
  return scale(negate_inputs(p), -1);
}

namespace {

StructuredPolynomial combine(const std::vector<StructuredPolynomial>& parts, int sign) {
  if (parts.empty()) throw InputError("composition needs at least one part");
  std::vector<std::pair<Rational, StructuredPolynomial>> terms;
  for (const auto& p : parts) terms.emplace_back(1, p);
  const long m = static_cast<long>(parts.size());
  return StructuredPolynomial::sum(std::move(terms), Rational(sign * (m - 1)));
}

}  // namespace

StructuredPolynomial or_compose(const std::vector<StructuredPolynomial>& parts) {
  return combine(parts, 1);
}

StructuredPolynomial and_compose(const std::vector<StructuredPolynomial>& parts) {
  return combine(parts, -1);
}

// ---------------------------------------------------------------- AND tradeoff

int choose_blocking(int n, int d, double eps) {
  if (n < 1) throw ParameterError("n must be >= 1");
  if (d < 1) throw ParameterError("d must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  const double R = static_cast<double>(n) * n * std::log(1.0 / eps) / (static_cast<double>(d) * d);
  double tstar = 1.0;
  if (R >= std::exp(1.0)) {
    // t / ln t is increasing on [e, inf).
    double lo = std::exp(1.0), hi = std::exp(1.0);
    while (hi / std::log(hi) < R) hi *= 2;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mid / std::log(mid) < R ? lo : hi) = mid;
    }
    tstar = hi;
  }
  const double cap = std::min(tstar, static_cast<double>(n));
  for (int t = static_cast<int>(std::floor(cap + 1e-9)); t >= 1; --t) {
    if (n % t == 0) return t;
  }
  throw ParameterError("no valid block count");
}

namespace {

// sum over blocks of prod_{j in block} (1 + l_j) / 2, over dimension n_total.
SparsePolynomial block_count(const std::vector<Literal>& lits, int t, int n_total) {
  const int size = static_cast<int>(lits.size()) / t;
  if (size > ExpansionCap{}.max_vars) {
    throw ResourceError("AND block of " + std::to_string(size) + " variables exceeds the expansion cap of " +
                        std::to_string(ExpansionCap{}.max_vars));
  }
  std::vector<SparsePolynomial::Term> terms;
  const Rational scale_factor(1, 1UL << size);
  for (int blk = 0; blk < t; ++blk) {
    for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << size); ++sub) {
      Monomial m = 0;
      int negs = 0;
      for (int j = 0; j < size; ++j) {
        if (sub & (std::uint64_t{1} << j)) {
          const auto& l = lits[static_cast<std::size_t>(blk * size + j)];
          m |= Monomial{1} << (l.var - 1);
          negs += l.negated ? 1 : 0;
        }
      }
      terms.push_back({m, (negs & 1) ? Rational(-scale_factor) : scale_factor});
    }
  }
  return SparsePolynomial(n_total, std::move(terms));
}

Concept and_of_literals(const std::vector<Literal>& lits, int n_total) {
  return Concept(n_total, Conjunction{lits});
}

}  // namespace

Approximant and_tradeoff_literals(const std::vector<Literal>& lits, int n_total, int d, double eps,
                                  const ConstructOptions& opts) {
  const int n = static_cast<int>(lits.size());
  if (n < 1) throw ParameterError("AND needs at least one literal");
  {
    std::vector<int> vars;
    for (const auto& l : lits) vars.push_back(l.var);
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
      throw InputError("AND literals must use distinct variables");
    }
  }
  const int t = choose_blocking(n, d, eps);
  const SparsePolynomial s = block_count(lits, t, n_total);
  Approximant out;
  out.mode = ApproxMode::TwoSided;
  out.eps = eps;
  if (t == 1) {
    out.poly = StructuredPolynomial::composed(UniPoly::linear(2, -1), s);
  } else {
    // Accept the first k whose wrapper is within eps of -1 on every count below t.
    bool have = false;
    for (int k : doubling_schedule(t, eps)) {
      const auto params = schedule_params(t, k);
      if (!params) continue;
      out.tried.push_back(k);
      const UniPoly S = kahn_sk(*params);
      bool ok = true;
      for (long long v = 0; v < t && ok; ++v) {
        ok = abs(S(Rational(static_cast<long>(v)))) * 2 <= Rational(from_double(eps));
      }
      out.poly = StructuredPolynomial::composed(Rational(2) * S - UniPoly::constant(1), s);
      out.k = k;
      have = true;
      if (ok) break;
    }
    if (!have) throw ParameterError("no valid Kahn parameters on the schedule for t = " + std::to_string(t));
  }
  if (n_total <= opts.cert.max_vars) {
    out.certificate = verify_twosided(out.poly, and_of_literals(lits, n_total), eps, opts.cert);
    out.certified = out.certificate->ok;
  }
  finish(out);
  return out;
}

Approximant and_n_tradeoff(int n, int d, double eps, const ConstructOptions& opts) {
  std::vector<Literal> lits;
  for (int i = 1; i <= n; ++i) lits.push_back({i, false});
  return and_tradeoff_literals(lits, n, d, eps, opts);
}

Approximant dnf_pos_onesided(const Concept& f, int d, double eps, const ConstructOptions& opts) {
  const auto* dnf = f.as<Dnf>();
  if (dnf == nullptr) throw InputError("dnf_pos_onesided needs a DNF concept");
  if (dnf->clauses.empty()) throw InputError("DNF has no terms");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  const int n = f.dimension();
  const double part_eps = eps / static_cast<double>(dnf->clauses.size());
  ConstructOptions part_opts = opts;
  part_opts.cert.max_vars = -1;  // the combined form is certified instead
  std::vector<StructuredPolynomial> parts;
  Approximant out;
  for (const auto& clause : dnf->clauses) {
    Approximant a = and_tradeoff_literals(clause, n, d, part_eps, part_opts);
    out.tried.push_back(a.k);
    parts.push_back(a.poly);
  }
  out.poly = or_compose(parts);
  out.mode = ApproxMode::Positive;
  out.eps = eps;
  if (n <= opts.cert.max_vars) {
    out.certificate = verify_onesided(out.poly, f, eps, Sign::Positive, opts.cert);
    out.certified = out.certificate->ok;
  }
  finish(out);
  return out;
}

Approximant cnf_neg_onesided(const Concept& f, int d, double eps, const ConstructOptions& opts) {
  const auto* cnf = f.as<Cnf>();
  if (cnf == nullptr) throw InputError("cnf_neg_onesided needs a CNF concept");
  ConstructOptions part_opts = opts;
  part_opts.cert.max_vars = -1;
  // -F(-x) for a CNF F is the DNF over the same literal lists.
  const Concept mirror(f.dimension(), Dnf{cnf->clauses});
  Approximant out = dnf_pos_onesided(mirror, d, eps, part_opts);
  out.poly = negate_onesided(out.poly);
  out.mode = ApproxMode::Negative;
  if (f.dimension() <= opts.cert.max_vars) {
    out.certificate = verify_onesided(out.poly, f, eps, Sign::Negative, opts.cert);
    out.certified = out.certificate->ok;
  }
  finish(out);
  return out;
}

}  // namespace relearn
