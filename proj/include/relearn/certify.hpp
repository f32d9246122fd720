#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "relearn/cube.hpp"
#include "relearn/poly.hpp"

namespace relearn {

enum class ApproxMode { Positive, Negative, TwoSided };

std::string to_string(ApproxMode m);
ApproxMode parse_mode(const std::string& text);
inline ApproxMode to_mode(Sign s) { return s == Sign::Positive ? ApproxMode::Positive : ApproxMode::Negative; }

/// Outcome of an exhaustive check. worst_pos / worst_neg are the largest
/// signed violations over f^-1(+1) and f^-1(-1); negative means slack, and
/// -inf marks a class with no points.
struct CertReport {
  bool ok = false;
  double eps = 0.0;
  double worst_pos = 0.0;
  double worst_neg = 0.0;
  std::uint64_t points = 0;
  std::optional<CubePoint> witness;
};

struct CertifyOptions {
  int max_vars = 24;
  double slack = 1e-9;
  /// Worker threads over point ranges; results do not depend on it.
  int workers = 1;
};

/// Positive: p >= 1-eps on f^-1(1) and |p+1| <= eps on f^-1(-1).
/// Negative: p <= -1+eps on f^-1(-1) and |p-1| <= eps on f^-1(1).
CertReport verify_onesided(const StructuredPolynomial& p, const Concept& f, double eps, Sign sign,
                           const CertifyOptions& opts = {});
/// |p - f| <= eps everywhere.
CertReport verify_twosided(const StructuredPolynomial& p, const Concept& f, double eps,
                           const CertifyOptions& opts = {});
CertReport verify(const StructuredPolynomial& p, const Concept& f, double eps, ApproxMode mode,
                  const CertifyOptions& opts = {});

struct MinEpsOptions {
  int max_vars = 14;
  int max_monomials = 4096;
};

struct MinEpsResult {
  double eps = 0.0;
  SparsePolynomial p;
  int lp_solves = 0;
  int points_used = 0;
};

/// Smallest eps for which a degree-<= d polynomial approximates f in the
/// given mode, by linear programming over the coefficients. Cube points enter
/// the LP by constraint generation; the returned optimum satisfies every
/// point's constraints.
MinEpsResult min_eps(const Concept& f, int d, ApproxMode mode, const MinEpsOptions& opts = {});

}  // namespace relearn
