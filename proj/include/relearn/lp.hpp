#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace relearn::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-7;

enum class Relation { LessEq, Equal, GreaterEq };

struct Constraint {
  std::vector<double> coeffs;  // dense, one entry per variable
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

/// minimize objective . x subject to the constraints and lower <= x <= upper.
/// Bounds default to [0, +inf); use -kInf / kInf for free directions.
struct LinearProgram {
  explicit LinearProgram(int num_vars = 0);

  int num_vars() const { return static_cast<int>(objective.size()); }
  void add(std::vector<double> coeffs, Relation rel, double rhs);
  void set_bounds(int var, double lo, double hi);

  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  int iterations = 0;
};

struct SolveOptions {
  /// Hard cap on simplex pivots; 0 means 50 * (rows + columns).
  long max_iterations = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_streak = 50;
};

/// Two-phase dense tableau simplex. Deterministic: Dantzig pricing with
/// lowest-index ties, Bland's rule after a streak of degenerate pivots, and
/// lowest-row ties in the ratio test. Throws SolverError on breakdown or when
/// the iteration cap is hit.
LpSolution solve(const LinearProgram& lp, const SolveOptions& opts = {});

/// Largest violation of any constraint or bound by `x` (0 when feasible).
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

/// Plain-text dump, one item per line:
///   vars <n> rows <m>
///   min <c_1> ... <c_n>
///   bound <j> <lo> <hi>        (only for bounds other than [0, inf))
///   <a_1> ... <a_n> <= | = | >= <b>
void dump(std::ostream& out, const LinearProgram& lp);

}  // namespace relearn::lp
