#pragma once

#include <optional>
#include <vector>

#include "relearn/certify.hpp"
#include "relearn/cube.hpp"
#include "relearn/poly.hpp"

namespace relearn {

/// Parameters of the Kahn et al. polynomial on {0, ..., W}: roots at
/// {0..a} and {W-b..W-1}, a Chebyshev factor of degree r, degree a+1+b+r.
struct KahnParams {
  long long W = 0;
  int k = 0;
  int a = 0;
  int b = 0;
  int r = 0;

  int degree() const { return a + 1 + b + r; }
};

/// a = ceil(k / (4 log2 W)), b = ceil(k^2 / (4 W log2 W)), r = k - (a+1) - b.
/// Throws ParameterError when W < 2, k < 3, r < 0 or W - b - a <= 0.
KahnParams default_kahn_params(long long W, int k);

/// a = W-1, b = 0, r = 0: vanishes on all of {0..W-1}; valid when k >= W.
KahnParams root_covering_params(long long W);

/// default_kahn_params when valid, else the root-covering set when k >= W.
std::optional<KahnParams> schedule_params(long long W, int k);

/// S_k with S_k(W) = 1 exactly. Throws ParameterError on invalid params.
UniPoly kahn_sk(const KahnParams& params);

/// k0 = ceil(sqrt(W log2 W ln(2/eps))), doubled until 4W (the last entry is 4W).
std::vector<int> doubling_schedule(long long W, double eps);

/// A constructed approximant with its declared guarantee.
struct Approximant {
  StructuredPolynomial poly = StructuredPolynomial::constant(0, 0);
  ApproxMode mode = ApproxMode::Positive;
  double eps = 0.0;
  int degree_bound = 0;
  double weight_bound = 0.0;
  bool certified = false;
  std::optional<CertReport> certificate;
  /// Schedule parameter that was accepted (0 when not applicable).
  int k = 0;
  std::vector<int> tried;
};

struct ConstructOptions {
  CertifyOptions cert;
};

/// Majority or halfspace concept as an integer halfspace.
Halfspace as_halfspace(const Concept& c);

/// P(L) = T_d(2L/W + 1)^4 / 4 - 1 with d = ceil(sqrt(W)) over the linear form
/// L. Values lie in [-1, -3/4] where L <= 0 and are >= 3 where L >= 1.
StructuredPolynomial halfspace_pos_quarter(const Halfspace& h);

/// Exact representation: the interpolant of sgn through every attainable
/// value of the linear form. Its expansion is the multilinear form of h.
StructuredPolynomial halfspace_exact(const Halfspace& h);

/// One-sided eps-approximation of a halfspace (or majority) concept built
/// from 2 S_k(W' + 2L - 1) - 1 with W' = 2W + 1, taking the first k of the
/// doubling schedule that certifies. When n exceeds the certification cap the
/// first schedule entry is returned uncertified.
Approximant halfspace_onesided_eps(const Concept& h, Sign sign, double eps,
                                   const ConstructOptions& opts = {});

/// x -> -p(-x)
StructuredPolynomial negate_onesided(const StructuredPolynomial& p);
/// -1 + sum (1 + p_i)
StructuredPolynomial or_compose(const std::vector<StructuredPolynomial>& parts);
/// 1 - sum (1 - p_i)
StructuredPolynomial and_compose(const std::vector<StructuredPolynomial>& parts);

/// Number of blocks t: the largest divisor of n not above the root of
/// t / ln t = n^2 ln(1/eps) / d^2 (t* = 1 when the right side is below e).
int choose_blocking(int n, int d, double eps);

/// Two-sided eps-approximation of AND_n on x1..xn: 2 S_k(s) - 1 where s
/// counts the blocks whose variables are all +1.
Approximant and_n_tradeoff(int n, int d, double eps, const ConstructOptions& opts = {});

/// and_n_tradeoff on the given literals, placed into dimension n_total.
Approximant and_tradeoff_literals(const std::vector<Literal>& lits, int n_total, int d, double eps,
                                  const ConstructOptions& opts = {});

/// Positive one-sided eps-approximation of a DNF: per-term two-sided
/// (eps/m)-approximations combined with or_compose.
Approximant dnf_pos_onesided(const Concept& f, int d, double eps, const ConstructOptions& opts = {});

/// Negative one-sided eps-approximation of a CNF via the reflected DNF.
Approximant cnf_neg_onesided(const Concept& f, int d, double eps, const ConstructOptions& opts = {});

}  // namespace relearn
