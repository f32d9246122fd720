#include "relearn/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "relearn/errors.hpp"
#include "relearn/lp.hpp"

namespace relearn {

std::string to_string(ApproxMode m) {
  switch (m) {
    case ApproxMode::Positive:
      return "positive";
    case ApproxMode::Negative:
      return "negative";
    case ApproxMode::TwoSided:
      return "twosided";
  }
  return "?";
}

ApproxMode parse_mode(const std::string& text) {
  if (text == "positive" || text == "pos") return ApproxMode::Positive;
  if (text == "negative" || text == "neg") return ApproxMode::Negative;
  if (text == "twosided" || text == "two-sided" || text == "two") return ApproxMode::TwoSided;
  throw InputError("unknown mode '" + text + "' (expected positive, negative or twosided)");
}

namespace {

constexpr double kNoPoints = -std::numeric_limits<double>::infinity();

// Signed violation of the per-point condition; <= 0 means satisfied.
double violation(double v, int fx, double eps, ApproxMode mode) {
  switch (mode) {
    case ApproxMode::Positive:
      return fx > 0 ? (1.0 - eps) - v : std::fabs(v + 1.0) - eps;
    case ApproxMode::Negative:
      return fx < 0 ? v - (-1.0 + eps) : std::fabs(v - 1.0) - eps;
    case ApproxMode::TwoSided:
      return std::fabs(v - fx) - eps;
  }
  return 0.0;
}

struct Partial {
  double worst_pos = kNoPoints;
  double worst_neg = kNoPoints;
  double worst = kNoPoints;  // over violating points only
  std::uint64_t worst_index = 0;
  bool violated = false;
};

Partial scan(const StructuredPolynomial& p, const Concept& f, double eps, ApproxMode mode,
             double slack, std::uint64_t lo, std::uint64_t hi) {
  CubeEvaluator ev(p);
  Partial r;
  const int n = f.dimension();
  for (std::uint64_t idx = lo; idx < hi; ++idx) {
    const CubePoint x = CubePoint::from_index(n, idx);
    const int fx = f(x);
    const double v = violation(ev(x), fx, eps, mode);
    double& w = fx > 0 ? r.worst_pos : r.worst_neg;
    w = std::max(w, v);
    if (v > slack && (!r.violated || v > r.worst)) {
      r.violated = true;
      r.worst = v;
      r.worst_index = idx;
    }
  }
  return r;
}

}  // namespace

CertReport verify(const StructuredPolynomial& p, const Concept& f, double eps, ApproxMode mode,
                  const CertifyOptions& opts) {
  const int n = f.dimension();
  if (p.dimension() != n) {
    throw InputError("polynomial dimension " + std::to_string(p.dimension()) +
                     " differs from concept dimension " + std::to_string(n));
  }
  if (n > opts.max_vars) {
    throw ResourceError("exhaustive certification cap exceeded: n = " + std::to_string(n) +
                        " > max_vars = " + std::to_string(opts.max_vars));
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  const int workers =
      static_cast<int>(std::clamp<std::uint64_t>(opts.workers < 1 ? 1 : opts.workers, 1, total));
  std::vector<Partial> parts(static_cast<std::size_t>(workers));
  if (workers == 1) {
    parts[0] = scan(p, f, eps, mode, opts.slack, 0, total);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t lo = total * w / workers, hi = total * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi] { parts[w] = scan(p, f, eps, mode, opts.slack, lo, hi); });
    }
    for (auto& t : pool) t.join();
  }

  CertReport rep;
  rep.eps = eps;
  rep.points = total;
  rep.worst_pos = rep.worst_neg = kNoPoints;
  const Partial* best = nullptr;
  for (const auto& part : parts) {
    rep.worst_pos = std::max(rep.worst_pos, part.worst_pos);
    rep.worst_neg = std::max(rep.worst_neg, part.worst_neg);
    // Ranges are in index order, so a strict comparison keeps the first witness.
    if (part.violated && (best == nullptr || part.worst > best->worst)) best = &part;
  }
  rep.ok = best == nullptr;
  if (best != nullptr) rep.witness = CubePoint::from_index(n, best->worst_index);
  return rep;
}

CertReport verify_onesided(const StructuredPolynomial& p, const Concept& f, double eps, Sign sign,
                           const CertifyOptions& opts) {
  return verify(p, f, eps, to_mode(sign), opts);
}

CertReport verify_twosided(const StructuredPolynomial& p, const Concept& f, double eps,
                           const CertifyOptions& opts) {
  return verify(p, f, eps, ApproxMode::TwoSided, opts);
}

MinEpsResult min_eps(const Concept& f, int d, ApproxMode mode, const MinEpsOptions& opts) {
  const int n = f.dimension();
  if (n > opts.max_vars) {
    throw ResourceError("min_eps cap exceeded: n = " + std::to_string(n) + " > max_vars = " +
                        std::to_string(opts.max_vars));
  }
  if (d < 0) throw InputError("degree must be >= 0");
  const auto monos = monomials_up_to(n, d, static_cast<std::size_t>(opts.max_monomials));
  const int nm = static_cast<int>(monos.size());
  const int eps_var = nm;
  const std::uint64_t total = std::uint64_t{1} << n;

  std::vector<std::uint64_t> masks(total);
  std::vector<int> values(total);
  for (std::uint64_t i = 0; i < total; ++i) {
    const CubePoint x = CubePoint::from_index(n, i);
    masks[i] = x.neg_mask();
    values[i] = f(x);
  }
  auto row_of = [&](std::uint64_t i) {
    std::vector<double> row(static_cast<std::size_t>(nm) + 1, 0.0);
    for (int k = 0; k < nm; ++k) row[k] = monomial_sign(monos[k], masks[i]);
    return row;
  };
  auto add_point = [&](lp::LinearProgram& prog, std::uint64_t i) {
    auto row = row_of(i);
    const int fx = values[i];
    const bool upper = mode == ApproxMode::TwoSided || (mode == ApproxMode::Positive && fx < 0) ||
                       mode == ApproxMode::Negative;
    const bool lower = mode == ApproxMode::TwoSided || mode == ApproxMode::Positive ||
                       (mode == ApproxMode::Negative && fx > 0);
    if (upper) {  // p(x) - eps <= f(x)
      auto r = row;
      r[eps_var] = -1.0;
      prog.add(std::move(r), lp::Relation::LessEq, fx);
    }
    if (lower) {  // p(x) + eps >= f(x)
      row[eps_var] = 1.0;
      prog.add(std::move(row), lp::Relation::GreaterEq, fx);
    }
  };
  std::vector<char> in_lp(total, 0);
  // Points already in the LP hold to its feasibility tolerance.
  auto worst_violation = [&](const std::vector<double>& c, double eps) {
    std::vector<std::pair<double, std::uint64_t>> bad;
    for (std::uint64_t i = 0; i < total; ++i) {
      double v = 0.0;
      for (int k = 0; k < nm; ++k) v += monomial_sign(monos[k], masks[i]) * c[k];
      const double viol = violation(v, values[i], eps, mode);
      if (!in_lp[i] && viol > 1e-9) bad.emplace_back(viol, i);
    }
    return bad;
  };

  // Start from the first few points in index order and add violated points
  // until none remain.
  std::vector<std::uint64_t> active;
  const std::uint64_t initial = std::min<std::uint64_t>(total, 2 * static_cast<std::uint64_t>(nm) + 2);
  for (std::uint64_t i = 0; i < initial; ++i) {
    active.push_back(i);
    in_lp[i] = 1;
  }
  MinEpsResult res;
  while (true) {
    lp::LinearProgram prog(nm + 1);
    for (int k = 0; k < nm; ++k) prog.set_bounds(k, -lp::kInf, lp::kInf);
    prog.objective[eps_var] = 1.0;
    for (auto i : active) add_point(prog, i);
    const auto sol = lp::solve(prog);
    ++res.lp_solves;
    if (sol.status != lp::LpStatus::Optimal) {
      throw SolverError("min_eps LP ended " + lp::to_string(sol.status));
    }
    const std::vector<double> c(sol.values.begin(), sol.values.begin() + nm);
    const double eps = std::max(0.0, sol.values[eps_var]);
    auto bad = worst_violation(c, eps);
    if (bad.empty()) {
      res.eps = eps;
      std::vector<SparsePolynomial::Term> terms;
      for (int k = 0; k < nm; ++k) {
        if (c[k] != 0.0) terms.push_back({monos[k], from_double(c[k])});
      }
      res.p = SparsePolynomial(n, std::move(terms));
      res.points_used = static_cast<int>(active.size());
      return res;
    }
    std::stable_sort(bad.begin(), bad.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t take = std::min<std::size_t>(bad.size(), static_cast<std::size_t>(nm) + 1);
    for (std::size_t j = 0; j < take; ++j) {
      in_lp[bad[j].second] = 1;
      active.push_back(bad[j].second);
    }
  }
}

}  // namespace relearn
