#include "relearn/learn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "relearn/errors.hpp"

namespace relearn {

Concept learn_disjunction_positive(const LabeledSample& s) {
  const int n = s.n;
  if (n < 1) throw InputError("dimension must be >= 1");
  // keep[i][0] is x_{i+1}, keep[i][1] its negation.
  std::vector<std::array<bool, 2>> keep(static_cast<std::size_t>(n), {true, true});
  for (std::size_t e = 0; e < s.size(); ++e) {
    if (s.labels[e] > 0) continue;
    const auto& x = s.points[e];
    for (int i = 0; i < n; ++i) keep[i][x[i] > 0 ? 0 : 1] = false;
  }
  Clause lits;
  for (int i = 0; i < n; ++i) {
    if (keep[i][0]) lits.push_back({i + 1, false});
    if (keep[i][1]) lits.push_back({i + 1, true});
  }
  return Concept(n, Disjunction{lits});
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
}

SparsePolynomial polynomial_from(int n, const std::vector<Monomial>& monos,
                                 const std::vector<double>& values) {
  std::vector<SparsePolynomial::Term> terms;
  for (std::size_t k = 0; k < monos.size(); ++k) {
    const double c = values[k] - values[k + monos.size()];
    if (std::fabs(c) > 1e-12) terms.push_back({monos[k], from_double(c)});
  }
  return SparsePolynomial(n, std::move(terms));
}

std::vector<double> features(const std::vector<Monomial>& monos, const CubePoint& x,
                             std::size_t width) {
  std::vector<double> row(width, 0.0);
  const auto mask = x.neg_mask();
  const std::size_t F = monos.size();
  for (std::size_t k = 0; k < F; ++k) {
    const double chi = monomial_sign(monos[k], mask);
    row[k] = chi;
    row[k + F] = -chi;
  }
  return row;
}

void add_weight_row(lp::LinearProgram& prog, std::size_t F, double W) {
  std::vector<double> row(static_cast<std::size_t>(prog.num_vars()), 0.0);
  for (std::size_t k = 0; k < 2 * F; ++k) row[k] = 1.0;
  prog.add(std::move(row), lp::Relation::LessEq, W);
}

int count_active(const lp::LinearProgram& prog, const std::vector<double>& x) {
  int active = 0;
  for (const auto& c : prog.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coeffs[j] * x[j];
    if (std::fabs(lhs - c.rhs) <= lp::kFeasibilityTol) ++active;
  }
  return active;
}

std::pair<SparsePolynomial, FitReport> positive_fit(const LabeledSample& s, int d, double W,
                                                     double eps, const FitOptions& opts) {
  const int n = s.n;
  const auto monos = monomials_up_to(n, d, opts.max_features);
  const std::size_t F = monos.size();
  const auto pts = aggregate(s);

  std::vector<std::size_t> hinge_of(pts.size(), 0);
  std::size_t P = 0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (pts[j].positives > 0) hinge_of[j] = P++;
  }
  const std::size_t width = 2 * F + P;
  lp::LinearProgram prog(static_cast<int>(width));
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (pts[j].positives > 0) prog.objective[2 * F + hinge_of[j]] = static_cast<double>(pts[j].positives);
  }
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const auto row = features(monos, pts[j].x, width);
    if (pts[j].positives > 0) {  // p(x) + xi >= 1
      auto r = row;
      r[2 * F + hinge_of[j]] = 1.0;
      prog.add(std::move(r), lp::Relation::GreaterEq, 1.0);
    }
    if (pts[j].negatives > 0) {  // p(x) <= -1 + eps
      prog.add(row, lp::Relation::LessEq, -1.0 + eps);
    }
  }
  add_weight_row(prog, F, W);

  const auto sol = lp::solve(prog);
  FitReport rep;
  rep.eps = eps;
  rep.W = W;
  rep.d = d;
  rep.m = s.size();
  rep.features = F;
  rep.distinct_points = pts.size();
  rep.lp_status = sol.status;
  rep.lp_iterations = sol.iterations;
  if (sol.status == lp::LpStatus::Infeasible) {
    throw InfeasibleError("reliable LP infeasible (W = " + std::to_string(W) + ", eps = " +
                          std::to_string(eps) + ", d = " + std::to_string(d) + ")");
  }
  if (sol.status != lp::LpStatus::Optimal) {
    throw SolverError("reliable LP ended " + lp::to_string(sol.status));
  }
  rep.objective_value = std::max(0.0, sol.objective_value);
  rep.constraints_active = count_active(prog, sol.values);
  return {polynomial_from(n, monos, sol.values), rep};
}

SparsePolynomial reflect_polynomial(const SparsePolynomial& p) {
  // x -> -p(-x): a monomial of degree k picks up (-1)^(k+1).
  std::vector<SparsePolynomial::Term> terms = p.terms();
  for (auto& t : terms) {
    if (monomial_degree(t.vars) % 2 == 0) t.coef = -t.coef;
  }
  return SparsePolynomial(p.dimension(), std::move(terms));
}

}  // namespace

std::pair<SparsePolynomial, FitReport> reliable_fit(const LabeledSample& s, int d, double W,
                                                     double eps, Sign sign,
                                                     const FitOptions& opts) {
  check_eps(eps);
  if (d < 0) throw InputError("degree must be >= 0");
  if (W < 0) throw InputError("weight bound must be >= 0");
  if (sign == Sign::Positive) return positive_fit(s, d, W, eps, opts);
  auto [p, rep] = positive_fit(s.reflected(), d, W, eps, opts);
  return {reflect_polynomial(p), rep};
}

double chop(double a) { return std::clamp(a, -1.0, 1.0); }

int randomized_round(const SparsePolynomial& p, const CubePoint& x, double u) {
  const double v = p.evaluate(x);
  if (v <= -1.0) return -1;
  if (v >= 1.0) return 1;
  return u < (1.0 + v) / 2.0 ? 1 : -1;
}

int ReliableHypothesis::classify(const CubePoint& x) const {
  if (mode != Mode::Thresholded) throw InputError("randomized hypothesis needs a uniform draw");
  const double H = chop(p.evaluate(x));
  if (sign == Sign::Positive) return H > threshold ? 1 : -1;
  return H >= threshold ? 1 : -1;
}

int ReliableHypothesis::classify(const CubePoint& x, double u) const {
  if (mode == Mode::Thresholded) return classify(x);
  if (sign == Sign::Positive) return randomized_round(p, x, u);
  return -randomized_round(reflect_polynomial(p), x.negated(), u);
}

PartialHypothesis ReliableHypothesis::as_partial() const {
  ReliableHypothesis copy = *this;
  return PartialHypothesis::total(p.dimension(),
                                  [copy](const CubePoint& x) { return copy.classify(x); });
}

namespace {

double positive_threshold(const SparsePolynomial& p, const LabeledSample& fresh, double eps) {
  const double inf = std::numeric_limits<double>::infinity();
  if (fresh.empty()) throw InputError("calibration sample is empty");
  std::vector<double> H(fresh.size());
  std::set<double> candidates{-inf, inf};
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    H[i] = chop(p.evaluate(fresh.points[i]));
    candidates.insert(H[i]);
  }
  // Sort negatives' values once; false_+(t) counts those strictly above t.
  std::vector<double> neg;
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    if (fresh.labels[i] < 0) neg.push_back(H[i]);
  }
  std::sort(neg.begin(), neg.end());
  const double m = static_cast<double>(fresh.size());
  for (double t : candidates) {
    const auto above = neg.end() - std::upper_bound(neg.begin(), neg.end(), t);
    if (static_cast<double>(above) / m <= eps) return t;
  }
  return inf;
}

}  // namespace

ReliableHypothesis derandomize(const SparsePolynomial& p, const LabeledSample& fresh, double eps,
                               Sign sign) {
  if (fresh.n != p.dimension()) throw InputError("calibration sample dimension mismatch");
  ReliableHypothesis h;
  h.p = p;
  h.mode = ReliableHypothesis::Mode::Thresholded;
  h.sign = sign;
  h.calibration_size = fresh.size();
  if (sign == Sign::Positive) {
    h.threshold = positive_threshold(p, fresh, eps);
  } else {
    h.threshold = -positive_threshold(reflect_polynomial(p), fresh.reflected(), eps);
  }
  return h;
}

ReliableResult learn_reliable(const LabeledSample& s, int d, double W, double eps, Sign sign,
                              const LabeledSample& fresh, const FitOptions& opts) {
  auto [p, rep] = reliable_fit(s, d, W, eps, sign, opts);
  return {derandomize(p, fresh, eps, sign), rep};
}

FullyReliableResult learn_fully_reliable(const LabeledSample& s, const LearnParams& params,
                                         const LabeledSample& fresh, const FitOptions& opts) {
  const double eps = params.eps / 4.0;
  ReliableResult pos = learn_reliable(s, params.d, params.W, eps, Sign::Positive, fresh, opts);
  ReliableResult neg = learn_reliable(s, params.d, params.W, eps, Sign::Negative, fresh, opts);
  PartialHypothesis h =
      PartialHypothesis::agreement(pos.h.as_partial(), neg.h.as_partial());
  return {std::move(h), std::move(pos), std::move(neg)};
}

std::pair<SparsePolynomial, FitReport> agnostic_l1_fit(const LabeledSample& s, int d, double W,
                                                        const FitOptions& opts) {
  if (d < 0) throw InputError("degree must be >= 0");
  if (W < 0) throw InputError("weight bound must be >= 0");
  const int n = s.n;
  const auto monos = monomials_up_to(n, d, opts.max_features);
  const std::size_t F = monos.size();
  const auto pts = aggregate(s);

  // One slack per (distinct point, label) pair that occurs.
  struct Slack {
    std::size_t point;
    int label;
    std::size_t count;
  };
  std::vector<Slack> slacks;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (pts[j].positives > 0) slacks.push_back({j, 1, pts[j].positives});
    if (pts[j].negatives > 0) slacks.push_back({j, -1, pts[j].negatives});
  }
  const std::size_t width = 2 * F + slacks.size();
  lp::LinearProgram prog(static_cast<int>(width));
  for (std::size_t k = 0; k < slacks.size(); ++k) {
    prog.objective[2 * F + k] = static_cast<double>(slacks[k].count);
    const auto row = features(monos, pts[slacks[k].point].x, width);
    const double y = slacks[k].label;
    auto up = row;  // p - y <= z
    up[2 * F + k] = -1.0;
    prog.add(std::move(up), lp::Relation::LessEq, y);
    auto down = row;  // p - y >= -z
    down[2 * F + k] = 1.0;
    prog.add(std::move(down), lp::Relation::GreaterEq, y);
  }
  add_weight_row(prog, F, W);
  const auto sol = lp::solve(prog);
  if (sol.status != lp::LpStatus::Optimal) {
    throw SolverError("L1 regression LP ended " + lp::to_string(sol.status));
  }
  FitReport rep;
  rep.objective_value = std::max(0.0, sol.objective_value);
  rep.constraints_active = count_active(prog, sol.values);
  rep.W = W;
  rep.d = d;
  rep.m = s.size();
  rep.features = F;
  rep.distinct_points = pts.size();
  rep.lp_status = sol.status;
  rep.lp_iterations = sol.iterations;
  return {polynomial_from(n, monos, sol.values), rep};
}

double calibrate_threshold(const SparsePolynomial& p, const LabeledSample& fresh) {
  if (fresh.empty()) throw InputError("calibration sample is empty");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, int>> v;
  for (std::size_t i = 0; i < fresh.size(); ++i) v.emplace_back(p.evaluate(fresh.points[i]), fresh.labels[i]);
  std::sort(v.begin(), v.end());
  // At t = -inf everything is +1: errors = number of negatives.
  long errors = 0;
  for (const auto& e : v) errors += e.second < 0 ? 1 : 0;
  long best = errors;
  double best_t = -inf;
  for (std::size_t i = 0; i < v.size();) {
    const double t = v[i].first;
    for (; i < v.size() && v[i].first == t; ++i) errors += v[i].second < 0 ? -1 : 1;
    if (errors < best) {
      best = errors;
      best_t = t;
    }
  }
  return best_t;
}

SamplePlan plan_samples(int n, int d, double W, double eps, double delta) {
  if (n < 1 || d < 1 || !(W > 0)) throw InputError("n, d and W must be positive");
  if (!(eps > 0 && eps <= 1) || !(delta > 0 && delta < 1)) {
    throw InputError("eps must lie in (0, 1] and delta in (0, 1)");
  }
  SamplePlan plan;
  plan.term_rademacher = 512.0 / std::pow(eps, 4) * W * W * d * std::log(2.0 * n);
  plan.term_confidence = 64.0 / (eps * eps) * (W + 1) * (W + 1) * std::log(1.0 / delta);
  const double m = std::ceil(std::max(plan.term_rademacher, plan.term_confidence));
  if (m > 9.0e18) throw ResourceError("planned sample size does not fit in 64 bits");
  plan.m = static_cast<long long>(m);
  return plan;
}

double rademacher_bound(double W, int d, int n, double m) {
  if (!(m >= 1)) throw InputError("m must be >= 1");
  return W * std::sqrt(2.0 * d * std::log(2.0 * n) / m);
}

double alpha_bound(double W, int d, int n, double m, double eps, double delta) {
  return 4.0 / eps * rademacher_bound(W, d, n, m) +
         2.0 * (W + 1) * std::sqrt(std::log(1.0 / delta) / (2.0 * m));
}

}  // namespace relearn
