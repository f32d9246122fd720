#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "relearn/cube.hpp"
#include "relearn/lp.hpp"
#include "relearn/poly.hpp"

namespace relearn {

/// Start from every literal and drop each one satisfied by a negative example.
Concept learn_disjunction_positive(const LabeledSample& s);

struct FitReport {
  double objective_value = 0.0;
  int constraints_active = 0;
  double eps = 0.0;
  double W = 0.0;
  int d = 0;
  std::size_t m = 0;
  std::size_t features = 0;
  std::size_t distinct_points = 0;
  lp::LpStatus lp_status = lp::LpStatus::Optimal;
  int lp_iterations = 0;
};

struct FitOptions {
  std::size_t max_features = 4096;
};

/// minimize sum over positives of (1 - p(x))_+ subject to p(x) <= -1 + eps on
/// negatives and weight(p) <= W, over monomials of degree <= d. The negative
/// sign swaps the roles of the labels. Throws InfeasibleError when no
/// polynomial meets the constraints.
std::pair<SparsePolynomial, FitReport> reliable_fit(const LabeledSample& s, int d, double W,
                                                     double eps, Sign sign,
                                                     const FitOptions& opts = {});

/// Clamp to [-1, 1].
double chop(double a);

/// -1 if p(x) <= -1, +1 if p(x) >= 1, else +1 iff u < (1 + p(x)) / 2.
int randomized_round(const SparsePolynomial& p, const CubePoint& x, double u);

struct ReliableHypothesis {
  enum class Mode { Randomized, Thresholded };

  SparsePolynomial p;
  Mode mode = Mode::Randomized;
  Sign sign = Sign::Positive;
  /// Positive: +1 iff chop(p(x)) > threshold. Negative: +1 iff
  /// chop(p(x)) >= threshold. Infinite values are the constant sentinels.
  double threshold = 0.0;
  std::size_t calibration_size = 0;

  /// Thresholded classification; throws InputError in randomized mode.
  int classify(const CubePoint& x) const;
  /// Randomized classification with an explicit uniform draw u in [0, 1).
  int classify(const CubePoint& x, double u) const;
  PartialHypothesis as_partial() const;
};

/// Smallest threshold over the sentinels and the distinct chopped values on
/// `fresh` whose empirical false-positive rate (false-negative rate for the
/// negative sign) is at most eps.
ReliableHypothesis derandomize(const SparsePolynomial& p, const LabeledSample& fresh, double eps,
                               Sign sign = Sign::Positive);

struct ReliableResult {
  ReliableHypothesis h;
  FitReport fit;
};

ReliableResult learn_reliable(const LabeledSample& s, int d, double W, double eps, Sign sign,
                              const LabeledSample& fresh, const FitOptions& opts = {});

struct LearnParams {
  int d = 1;
  double W = 1.0;
  double eps = 0.1;
};

struct FullyReliableResult {
  PartialHypothesis h;
  ReliableResult positive;
  ReliableResult negative;
};

/// Positive and negative reliable learners at eps / 4, combined by agreement.
FullyReliableResult learn_fully_reliable(const LabeledSample& s, const LearnParams& params,
                                         const LabeledSample& fresh, const FitOptions& opts = {});

/// minimize sum |p(x_i) - y_i| subject to weight(p) <= W.
std::pair<SparsePolynomial, FitReport> agnostic_l1_fit(const LabeledSample& s, int d, double W,
                                                        const FitOptions& opts = {});

/// Threshold t minimising the empirical error of sgn(p(x) - t) on `fresh`
/// (ties go to the smaller t; -inf is the all-positive sentinel).
double calibrate_threshold(const SparsePolynomial& p, const LabeledSample& fresh);

struct SamplePlan {
  long long m = 0;
  double term_rademacher = 0.0;
  double term_confidence = 0.0;
};

/// m = ceil(max(512/eps^4 W^2 d ln(2n), 64/eps^2 (W+1)^2 ln(1/delta))).
SamplePlan plan_samples(int n, int d, double W, double eps, double delta);

/// W sqrt(2 d ln(2n) / m)
double rademacher_bound(double W, int d, int n, double m);

/// (4/eps) R + 2 (W+1) sqrt(ln(1/delta) / (2m)) with R = rademacher_bound.
double alpha_bound(double W, int d, int n, double m, double eps, double delta);

}  // namespace relearn
