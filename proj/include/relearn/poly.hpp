#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <variant>
#include <vector>

#include "relearn/cube.hpp"
#include "relearn/rational.hpp"

namespace relearn {

/// Dense univariate polynomial with exact rational coefficients; index = power.
/// Trailing zeros are trimmed, so degree() is the index of the last nonzero
/// coefficient (0 for the zero polynomial, see is_zero()).
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs);

  static UniPoly constant(const Rational& c);
  static UniPoly identity();  // t
  /// alpha * t + beta
  static UniPoly linear(const Rational& alpha, const Rational& beta);

  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  Rational coefficient(int power) const;

  Rational operator()(const Rational& t) const;
  Rational max_abs_coefficient() const;

  /// t -> p(alpha * t + beta)
  UniPoly compose_affine(const Rational& alpha, const Rational& beta) const;
  UniPoly pow(int e) const;

  friend UniPoly operator+(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator-(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(const Rational& c, const UniPoly& p);
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// T_d via T_0 = 1, T_1 = t, T_{k+1} = 2t T_k - T_{k-1}.
UniPoly chebyshev(int d);

/// Multilinear monomial as a variable bitmask: bit i <-> x_{i+1}.
using Monomial = std::uint64_t;
inline constexpr int kMaxPolyVars = 64;

inline int monomial_degree(Monomial m) { return __builtin_popcountll(m); }
/// chi_S(x) = prod_{i in S} x_i, given x's neg_mask.
inline int monomial_sign(Monomial m, std::uint64_t neg_mask) {
  return (__builtin_popcountll(m & neg_mask) & 1) ? -1 : 1;
}
/// Canonical order: by degree, then by mask.
inline bool monomial_less(Monomial a, Monomial b) {
  const int da = monomial_degree(a), db = monomial_degree(b);
  return da != db ? da < db : a < b;
}

/// All monomials over n variables of degree <= d in canonical order. Throws
/// ResourceError when there would be more than `cap` of them.
std::vector<Monomial> monomials_up_to(int n, int d, std::size_t cap);

/// Multilinear polynomial over {-1,+1}^n (n <= 64) stored as a sorted list of
/// nonzero terms. Exact rational coefficients with a cached double view for
/// fast evaluation.
class SparsePolynomial {
 public:
  struct Term {
    Monomial vars = 0;
    Rational coef;
  };

  explicit SparsePolynomial(int n = 0);
  /// Duplicate monomials are summed; zero coefficients dropped.
  SparsePolynomial(int n, std::vector<Term> terms);
  SparsePolynomial(int n, const std::unordered_map<Monomial, Rational>& terms);

  static SparsePolynomial constant(int n, const Rational& c);

  int dimension() const { return n_; }
  /// Total degree; 0 for constants and the zero polynomial.
  int degree() const;
  /// Sum of absolute coefficient values.
  Rational weight() const;
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(Monomial m) const;

  double evaluate(const CubePoint& x) const;
  double evaluate_mask(std::uint64_t neg_mask) const;
  Rational evaluate_exact(const CubePoint& x) const;

  SparsePolynomial scaled(const Rational& c) const;
  friend SparsePolynomial operator+(const SparsePolynomial& a, const SparsePolynomial& b);
  friend SparsePolynomial operator-(const SparsePolynomial& a, const SparsePolynomial& b);
  /// Product with x_i^2 = 1 reduction.
  friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b);
  friend bool operator==(const SparsePolynomial& a, const SparsePolynomial& b);

 private:
  void check_point(const CubePoint& x) const;
  int n_;
  std::vector<Term> terms_;
  std::vector<double> approx_;
};

class StructuredPolynomial;

namespace structured {

/// outer(w0 + sum_i w_i x_i) with an integer linear form.
struct Affine {
  UniPoly outer;
  long long w0 = 0;
  std::vector<long long> w;
};

/// outer(inner(x)) for an arbitrary inner polynomial.
struct Composed {
  UniPoly outer;
  std::shared_ptr<const StructuredPolynomial> inner;
};

struct Part {
  Rational scale;
  std::shared_ptr<const StructuredPolynomial> poly;
};

/// offset + sum_j scale_j * part_j(x)
struct Sum {
  std::vector<Part> parts;
  Rational offset;
};

}  // namespace structured

/// Canonical carrier of constructed approximants: a small constructor tree that
/// evaluates exactly without multilinear expansion. Immutable; copies share
/// the tree.
class StructuredPolynomial {
 public:
  using Node = std::variant<SparsePolynomial, structured::Affine, structured::Composed,
                            structured::Sum>;

  StructuredPolynomial(SparsePolynomial p);  // NOLINT: sparse is a structured form

  static StructuredPolynomial affine(UniPoly outer, long long w0, std::vector<long long> w);
  static StructuredPolynomial composed(UniPoly outer, StructuredPolynomial inner);
  static StructuredPolynomial sum(std::vector<std::pair<Rational, StructuredPolynomial>> parts,
                                  const Rational& offset);
  static StructuredPolynomial constant(int n, const Rational& c);

  int dimension() const { return n_; }
  const Node& node() const { return *node_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(node_.get());
  }

  /// deg(outer) for affine forms, deg(outer) * deg(inner) for compositions,
  /// max over parts for sums, exact degree for sparse forms.
  int declared_degree() const;

 private:
  StructuredPolynomial(int n, Node node);
  int n_;
  std::shared_ptr<const Node> node_;
};

double evaluate(const StructuredPolynomial& p, const CubePoint& x);
Rational evaluate_exact(const StructuredPolynomial& p, const CubePoint& x);

/// Repeated evaluation with per-node memoisation of the exact univariate
/// parts. Not thread-safe; use one evaluator per worker.
class CubeEvaluator {
 public:
  explicit CubeEvaluator(StructuredPolynomial p);
  double operator()(const CubePoint& x);
  const StructuredPolynomial& polynomial() const { return p_; }

 private:
  double eval(const StructuredPolynomial& node, const CubePoint& x);
  StructuredPolynomial p_;
  std::unordered_map<const void*, std::unordered_map<long long, double>> affine_memo_;
  std::unordered_map<const void*, std::unordered_map<std::uint64_t, double>> composed_memo_;
};

struct ExpansionCap {
  int max_vars = 20;
  int max_degree = 20;
};

/// Multilinear expansion (x_i^2 = 1). Throws ResourceError naming the bound
/// when n or an outer degree exceeds the cap. Sparse input is returned as is.
SparsePolynomial expand(const StructuredPolynomial& p, const ExpansionCap& cap = {});

struct WeightDegree {
  double weight = 0.0;
  int degree = 0;
  bool exact = false;
};

/// Exact weight/degree of the expansion when within the cap, otherwise the
/// construction's analytic upper bounds with exact = false.
WeightDegree weight_and_degree(const StructuredPolynomial& p, const ExpansionCap& cap = {});

/// Upper bound on the weight of the expansion: sum |u_j| W^j for affine forms
/// (W = |w0| + sum |w_i|), the analogue for compositions, additive over sums.
double analytic_weight_bound(const StructuredPolynomial& p);

/// c * p
StructuredPolynomial scale(const StructuredPolynomial& p, const Rational& c);
/// p + c
StructuredPolynomial add_constant(const StructuredPolynomial& p, const Rational& c);
/// x -> p(-x)
StructuredPolynomial negate_inputs(const StructuredPolynomial& p);
/// Re-indexes p into dimension n_total: variable i+1 of p is replaced by the
/// literal map[i] (distinct variables required).
StructuredPolynomial substitute_literals(const StructuredPolynomial& p, int n_total,
                                         const std::vector<Literal>& map);

}  // namespace relearn
