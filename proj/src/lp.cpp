#include "relearn/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "relearn/errors.hpp"

namespace relearn::lp {

LinearProgram::LinearProgram(int num_vars)
    : objective(static_cast<std::size_t>(num_vars), 0.0),
      lower(static_cast<std::size_t>(num_vars), 0.0),
      upper(static_cast<std::size_t>(num_vars), kInf) {}

void LinearProgram::add(std::vector<double> coeffs, Relation rel, double rhs) {
  if (static_cast<int>(coeffs.size()) != num_vars()) {
    throw InputError("constraint has " + std::to_string(coeffs.size()) + " coefficients for " +
                     std::to_string(num_vars()) + " variables");
  }
  constraints.push_back({std::move(coeffs), rel, rhs});
}

void LinearProgram::set_bounds(int var, double lo, double hi) {
  if (var < 0 || var >= num_vars()) throw InputError("variable index out of range");
  if (lo > hi) throw InputError("lower bound exceeds upper bound");
  lower[static_cast<std::size_t>(var)] = lo;
  upper[static_cast<std::size_t>(var)] = hi;
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "?";
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, lp.lower[j] - x[j]);
    worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coeffs[j] * x[j];
    const double diff = lhs - c.rhs;
    switch (c.rel) {
      case Relation::LessEq:
        worst = std::max(worst, diff);
        break;
      case Relation::GreaterEq:
        worst = std::max(worst, -diff);
        break;
      case Relation::Equal:
        worst = std::max(worst, std::fabs(diff));
        break;
    }
  }
  return worst;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kHarrisTol = 1e-9;
constexpr double kPerturb = 1e-6;

// x_orig = offset + sum sign * y_col over the standard-form columns.
struct VarMap {
  double offset = 0.0;
  int col = -1;
  double sign = 1.0;
  int col2 = -1;  // second column for free variables (negative part)
};

class Tableau {
 public:
  // Columns [0, cols) are variables, then the working right-hand side and
  // the unperturbed right-hand side.
  Tableau(int rows, int cols) : m_(rows), n_(cols), w_(cols + 2), t_(std::size_t(rows) * w_, 0.0) {}

  double& at(int i, int j) { return t_[std::size_t(i) * w_ + j]; }
  double at(int i, int j) const { return t_[std::size_t(i) * w_ + j]; }
  double& rhs(int i) { return at(i, n_); }
  double& exact_rhs(int i) { return at(i, n_ + 1); }
  int rows() const { return m_; }
  int cols() const { return n_; }

  // Pivot on (r, c), updating the cost row `d` alongside.
  void pivot(int r, int c, std::vector<double>& d) {
    double* pr = &t_[std::size_t(r) * w_];
    const double inv = 1.0 / pr[c];
    nz_.clear();
    for (int j = 0; j <= n_ + 1; ++j) {
      if (pr[j] != 0.0) {
        pr[j] *= inv;
        nz_.push_back(j);
      }
    }
    pr[c] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = &t_[std::size_t(i) * w_];
      const double f = pi[c];
      if (f == 0.0) continue;
      for (int j : nz_) pi[j] -= f * pr[j];
      pi[c] = 0.0;
    }
    const double f = d[c];
    if (f != 0.0) {
      for (int j : nz_) d[j] -= f * pr[j];
      d[c] = 0.0;
    }
  }

 private:
  int m_, n_;
  std::size_t w_;
  std::vector<double> t_;
  std::vector<int> nz_;
};

struct Simplex {
  Tableau tab;
  std::vector<int> basis;
  std::vector<char> barred;  // columns that may not enter
  long iterations = 0;
  long max_iterations = 0;
  int degenerate_limit = 50;

  enum class Outcome { Optimal, Unbounded, Infeasible };

  Outcome dual_repair(std::vector<double>& d) {
    const int m = tab.rows(), n = tab.cols();
    while (true) {
      int leave = -1;
      double worst = -kHarrisTol;
      for (int i = 0; i < m; ++i) {
        if (tab.exact_rhs(i) < worst) {
          worst = tab.exact_rhs(i);
          leave = i;
        }
      }
      if (leave < 0) return Outcome::Optimal;
      int enter = -1;
      double best = kInf, piv = 0.0;
      for (int j = 0; j < n; ++j) {
        const double a = tab.at(leave, j);
        if (barred[j] || a >= -kPivotTol) continue;
        const double r = std::max(0.0, d[j]) / -a;
        if (enter < 0 || r < best - 1e-12 || (r <= best + 1e-12 && -a > piv)) {
          enter = j;
          best = r;
          piv = -a;
        }
      }
      if (enter < 0) return Outcome::Infeasible;
      tab.pivot(leave, enter, d);
      basis[leave] = enter;
      if (++iterations > max_iterations) {
        throw SolverError("simplex iteration limit " + std::to_string(max_iterations) +
                          " reached while restoring the exact right-hand side");
      }
    }
  }

  Outcome run(std::vector<double>& d, const char* phase) {
    int streak = 0;
    const int m = tab.rows(), n = tab.cols();
    while (true) {
      const bool bland = streak >= degenerate_limit;
      int enter = -1;
      double best = -kCostTol;
      for (int j = 0; j < n; ++j) {
        if (barred[j] || d[j] >= -kCostTol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (d[j] < best) {
          best = d[j];
          enter = j;
        }
      }
      if (enter < 0) return Outcome::Optimal;

      // Harris two-pass ratio test: bound the step with a small tolerance,
      // then take the largest pivot among rows within that bound.
      double bound = kInf;
      for (int i = 0; i < m; ++i) {
        const double a = tab.at(i, enter);
        if (a > kPivotTol) bound = std::min(bound, (std::max(0.0, tab.at(i, n)) + kHarrisTol) / a);
      }
      int leave = -1;
      double ratio = 0.0, piv = 0.0;
      for (int i = 0; i < m; ++i) {
        const double a = tab.at(i, enter);
        if (a <= kPivotTol) continue;
        const double r = std::max(0.0, tab.at(i, n)) / a;
        if (r > bound) continue;
        bool take = leave < 0;
        if (!take) take = bland ? basis[i] < basis[leave] : a > piv;
        if (take) {
          leave = i;
          ratio = r;
          piv = a;
        }
      }
      if (leave < 0) return Outcome::Unbounded;

      streak = ratio <= 1e-12 ? streak + 1 : 0;
      tab.pivot(leave, enter, d);
      basis[leave] = enter;
      if (++iterations > max_iterations) {
        std::ostringstream msg;
        msg << "simplex iteration limit " << max_iterations << " reached in " << phase
            << " (rows " << m << ", columns " << n << ", degenerate streak " << streak << ")";
        throw SolverError(msg.str());
      }
    }
  }
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& opts) {
  const int nv = lp.num_vars();
  if (nv < 1) throw InputError("linear program needs at least one variable");
  for (const auto& c : lp.constraints) {
    if (static_cast<int>(c.coeffs.size()) != nv) throw InputError("constraint width mismatch");
  }

  // Standard form: y >= 0, rows with nonnegative right-hand sides.
  std::vector<VarMap> vars(static_cast<std::size_t>(nv));
  int ny = 0;
  struct Row {
    std::vector<std::pair<int, double>> terms;
    Relation rel;
    double rhs;
    double work = 0.0;  // rhs with inequalities relaxed slightly
  };
  std::vector<Row> rows;
  for (int j = 0; j < nv; ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    auto& v = vars[j];
    if (std::isfinite(lo)) {
      v = {lo, ny++, 1.0, -1};
      if (std::isfinite(hi)) rows.push_back({{{v.col, 1.0}}, Relation::LessEq, hi - lo});
    } else if (std::isfinite(hi)) {
      v = {hi, ny++, -1.0, -1};
    } else {
      v = {0.0, ny, 1.0, ny + 1};
      ny += 2;
    }
  }
  for (const auto& c : lp.constraints) {
    Row r{{}, c.rel, c.rhs};
    for (int j = 0; j < nv; ++j) {
      const double a = c.coeffs[j];
      if (a == 0.0) continue;
      const auto& v = vars[j];
      r.rhs -= a * v.offset;
      r.terms.emplace_back(v.col, a * v.sign);
      if (v.col2 >= 0) r.terms.emplace_back(v.col2, -a);
    }
    rows.push_back(std::move(r));
  }
  // Deterministic relaxation of every inequality; it breaks the ties that make
  // simplex stall on degenerate vertices and is removed after phase 2.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    std::uint64_t h = (i + 1) * 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 31)) * 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 29;
    const double delta = kPerturb * (1.0 + static_cast<double>(h >> 11) * 0x1.0p-53) *
                         std::max(1.0, std::fabs(r.rhs));
    r.work = r.rel == Relation::LessEq ? r.rhs + delta
             : r.rel == Relation::GreaterEq ? r.rhs - delta
                                            : r.rhs;
  }
  for (auto& r : rows) {
    if (r.work < 0) {
      r.work = -r.work;
      r.rhs = -r.rhs;
      for (auto& t : r.terms) t.second = -t.second;
      if (r.rel == Relation::LessEq) {
        r.rel = Relation::GreaterEq;
      } else if (r.rel == Relation::GreaterEq) {
        r.rel = Relation::LessEq;
      }
    }
  }

  const int m = static_cast<int>(rows.size());
  // Crash basis: a row that would need an artificial can start with a column
  // that appears in no other row and has a positive coefficient there.
  std::vector<int> col_rows(static_cast<std::size_t>(ny), 0);
  for (const auto& r : rows) {
    for (const auto& t : r.terms) ++col_rows[t.first];
  }
  std::vector<int> crash(static_cast<std::size_t>(m), -1);
  std::vector<char> col_used(static_cast<std::size_t>(ny), 0);
  for (int i = 0; i < m; ++i) {
    if (rows[i].rel == Relation::LessEq) continue;
    for (const auto& [col, val] : rows[i].terms) {
      if (val > 0 && col_rows[col] == 1 && !col_used[col]) {
        crash[i] = col;
        col_used[col] = 1;
        break;
      }
    }
  }
  int n_slack = 0, n_art = 0;
  for (int i = 0; i < m; ++i) {
    if (rows[i].rel != Relation::Equal) ++n_slack;
    if (rows[i].rel != Relation::LessEq && crash[i] < 0) ++n_art;
  }
  const int first_slack = ny, first_art = ny + n_slack, ncols = ny + n_slack + n_art;

  // Objective over standard columns.
  std::vector<double> cost(static_cast<std::size_t>(ncols), 0.0);
  double cost_offset = 0.0;
  for (int j = 0; j < nv; ++j) {
    const auto& v = vars[j];
    cost_offset += lp.objective[j] * v.offset;
    cost[v.col] += lp.objective[j] * v.sign;
    if (v.col2 >= 0) cost[v.col2] -= lp.objective[j];
  }

  LpSolution sol;
  if (m == 0) {
    // Only sign restrictions: each column sits at 0 unless its cost is negative.
    for (int j = 0; j < ncols; ++j) {
      if (cost[j] < 0) {
        sol.status = LpStatus::Unbounded;
        return sol;
      }
    }
    sol.status = LpStatus::Optimal;
    sol.values.resize(nv);
    for (int j = 0; j < nv; ++j) sol.values[j] = vars[j].offset;
    sol.objective_value = cost_offset;
    return sol;
  }

  Simplex sx{Tableau(m, ncols), std::vector<int>(m), std::vector<char>(ncols, 0)};
  sx.max_iterations = opts.max_iterations > 0 ? opts.max_iterations : 50L * (m + ncols);
  sx.degenerate_limit = opts.degenerate_streak;
  {
    int s = first_slack, a = first_art;
    for (int i = 0; i < m; ++i) {
      for (const auto& [col, val] : rows[i].terms) sx.tab.at(i, col) += val;
      sx.tab.rhs(i) = rows[i].work;
      sx.tab.exact_rhs(i) = rows[i].rhs;
      switch (rows[i].rel) {
        case Relation::LessEq:
          sx.tab.at(i, s) = 1.0;
          sx.basis[i] = s++;
          break;
        case Relation::GreaterEq:
        case Relation::Equal:
          if (rows[i].rel == Relation::GreaterEq) sx.tab.at(i, s++) = -1.0;
          if (crash[i] >= 0) {
            sx.basis[i] = crash[i];
          } else {
            sx.tab.at(i, a) = 1.0;
            sx.basis[i] = a++;
          }
          break;
      }
    }
  }
  // Crashed rows start with a basic column whose coefficient may differ from 1.
  std::vector<double> dummy(static_cast<std::size_t>(ncols) + 2, 0.0);
  for (int i = 0; i < m; ++i) {
    if (crash[i] >= 0 && sx.tab.at(i, crash[i]) != 1.0) sx.tab.pivot(i, crash[i], dummy);
  }
  const Tableau original = sx.tab;

  // Phase 1: minimise the sum of artificials.
  std::vector<double> d(static_cast<std::size_t>(ncols) + 2, 0.0);
  if (n_art > 0) {
    for (int i = 0; i < m; ++i) {
      if (sx.basis[i] < first_art) continue;
      for (int j = 0; j <= ncols + 1; ++j) d[j] -= sx.tab.at(i, j);
    }
    for (int j = first_art; j < ncols; ++j) d[j] = 0.0;
    sx.run(d, "phase 1");
    double infeas = 0.0, scale = 1.0;
    for (int i = 0; i < m; ++i) {
      scale = std::max(scale, rows[i].work);
      if (sx.basis[i] >= first_art) infeas += sx.tab.rhs(i);
    }
    if (infeas > kFeasibilityTol * scale) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = static_cast<int>(sx.iterations);
      return sol;
    }
    for (int i = 0; i < m; ++i) {
      if (sx.basis[i] < first_art) continue;
      int best = -1;
      double mag = kPivotTol;
      for (int j = 0; j < first_art; ++j) {
        if (std::fabs(sx.tab.at(i, j)) > mag) {
          mag = std::fabs(sx.tab.at(i, j));
          best = j;
        }
      }
      if (best >= 0) {
        sx.tab.pivot(i, best, d);
        sx.basis[i] = best;
      }
    }
    for (int j = first_art; j < ncols; ++j) sx.barred[j] = 1;
  }

  // Phase 2.
  std::fill(d.begin(), d.end(), 0.0);
  for (int j = 0; j < ncols; ++j) d[j] = cost[j];
  for (int i = 0; i < m; ++i) {
    const double cb = cost[sx.basis[i]];
    if (cb == 0.0) continue;
    for (int j = 0; j <= ncols + 1; ++j) d[j] -= cb * sx.tab.at(i, j);
  }
  if (sx.run(d, "phase 2") == Simplex::Outcome::Unbounded) {
    sol.status = LpStatus::Unbounded;
    sol.iterations = static_cast<int>(sx.iterations);
    return sol;
  }

  // Restore the exact right-hand side; the basis stays dual feasible, so
  // dual simplex pivots repair any primal infeasibility it exposes.
  if (sx.dual_repair(d) == Simplex::Outcome::Infeasible) {
    sol.status = LpStatus::Infeasible;
    sol.iterations = static_cast<int>(sx.iterations);
    return sol;
  }

  auto to_original = [&](const std::vector<double>& y) {
    std::vector<double> x(static_cast<std::size_t>(nv));
    for (int j = 0; j < nv; ++j) {
      const auto& v = vars[j];
      x[j] = v.offset + v.sign * y[v.col] - (v.col2 >= 0 ? y[v.col2] : 0.0);
    }
    return x;
  };

  std::vector<double> y(static_cast<std::size_t>(ncols), 0.0);
  for (int i = 0; i < m; ++i) y[sx.basis[i]] = std::max(0.0, sx.tab.exact_rhs(i));
  std::vector<double> x = to_original(y);
  double viol = max_violation(lp, x);

  // Recompute the basic solution from the original data.
  {
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b(i) = original.at(i, ncols + 1);
      for (int k = 0; k < m; ++k) B(i, k) = original.at(i, sx.basis[k]);
    }
    const Eigen::VectorXd yb = B.partialPivLu().solve(b);
    if (yb.allFinite()) {
      std::vector<double> y2(static_cast<std::size_t>(ncols), 0.0);
      for (int k = 0; k < m; ++k) y2[sx.basis[k]] = std::max(0.0, yb(k));
      std::vector<double> x2 = to_original(y2);
      const double viol2 = max_violation(lp, x2);
      if (viol2 <= viol) {
        x = std::move(x2);
        viol = viol2;
      }
    }
  }
  if (viol > kFeasibilityTol) {
    std::ostringstream msg;
    msg << "simplex optimum violates constraints by " << viol << " after " << sx.iterations
        << " pivots (rows " << m << ", columns " << ncols << ")";
    throw SolverError(msg.str());
  }

  sol.status = LpStatus::Optimal;
  sol.iterations = static_cast<int>(sx.iterations);
  sol.objective_value = 0.0;
  for (int j = 0; j < nv; ++j) sol.objective_value += lp.objective[j] * x[j];
  sol.values = std::move(x);
  return sol;
}

void dump(std::ostream& out, const LinearProgram& lp) {
  const auto old = out.precision(17);
  out << "vars " << lp.num_vars() << " rows " << lp.constraints.size() << '\n';
  out << "min";
  for (double c : lp.objective) out << ' ' << c;
  out << '\n';
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.lower[j] != 0.0 || lp.upper[j] != kInf) {
      out << "bound " << j << ' ' << lp.lower[j] << ' ' << lp.upper[j] << '\n';
    }
  }
  for (const auto& c : lp.constraints) {
    for (std::size_t j = 0; j < c.coeffs.size(); ++j) out << (j ? " " : "") << c.coeffs[j];
    out << (c.rel == Relation::LessEq ? " <= " : c.rel == Relation::Equal ? " = " : " >= ")
        << c.rhs << '\n';
  }
  out.precision(old);
}

}  // namespace relearn::lp
