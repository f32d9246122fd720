#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace relearn {

/// A point of {-1,+1}^n. Entries are exactly -1 or +1.
class CubePoint {
 public:
  CubePoint() = default;
  explicit CubePoint(std::vector<std::int8_t> bits);
  CubePoint(std::initializer_list<int> bits);

  /// Point number `index` in lexicographic order over (x1, ..., xn) with
  /// -1 < +1, i.e. x1 is the most significant bit and a 0 bit means -1.
  static CubePoint from_index(int n, std::uint64_t index);
  /// Inverse of from_index (n <= 63).
  std::uint64_t index() const;

  int dimension() const { return static_cast<int>(bits_.size()); }
  int operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::int8_t> bits() const { return bits_; }

  CubePoint negated() const;
  /// Bit i set iff x_{i+1} = -1. Requires n <= 64.
  std::uint64_t neg_mask() const;

  auto operator<=>(const CubePoint&) const = default;

 private:
  std::vector<std::int8_t> bits_;
};

/// Signed literal; `var` is 1-based.
struct Literal {
  int var = 1;
  bool negated = false;

  int eval(const CubePoint& x) const {
    const int v = x[static_cast<std::size_t>(var - 1)];
    return negated ? -v : v;
  }
  auto operator<=>(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

struct Disjunction {
  Clause literals;
};
struct Conjunction {
  Clause literals;
};
struct Majority {
  std::vector<int> vars;  // 1-based, sorted, distinct
};
struct Halfspace {
  long long w0 = 0;
  std::vector<long long> w;

  long long weight() const;
  long long linear_form(const CubePoint& x) const;
};
struct Dnf {
  std::vector<Clause> clauses;
};
struct Cnf {
  std::vector<Clause> clauses;
};

/// A Boolean concept over {-1,+1}^n with +1 = True. Construction validates
/// literal ranges, clause well-formedness and the halfspace weight.
class Concept {
 public:
  using Kind = std::variant<Disjunction, Conjunction, Majority, Halfspace, Dnf, Cnf>;

  Concept(int n, Kind kind);

  int dimension() const { return n_; }
  const Kind& kind() const { return kind_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }

  /// +1 or -1; throws InputError on a dimension mismatch.
  int operator()(const CubePoint& x) const;

 private:
  int n_;
  Kind kind_;
};

/// sgn with the convention sgn(0) = -1.
inline int sgn(long long t) { return t > 0 ? 1 : -1; }
inline int sgn(double t) { return t > 0.0 ? 1 : -1; }

int eval_concept(const Concept& c, const CubePoint& x);

/// The concept x -> -c(-x).
Concept reflect(const Concept& c);

Concept make_majority(int n, std::vector<int> vars);
Concept make_or(int n, int fan_in);   // OR of x1..x_fan_in
Concept make_and(int n, int fan_in);  // AND of x1..x_fan_in
Concept constant_concept(int n, int value);

/// Text format: `MAJ 1 3 5`, `DISJ +1 -2`, `CONJ +1 +3`,
/// `HALFSPACE w0 w1 ... wn`, `DNF (+1 -2)(+3 +4)`, `CNF (...)(...)`.
/// When n is absent it is inferred (largest index, or weight count).
Concept parse_concept(const std::string& text, std::optional<int> n = std::nullopt);
std::string to_string(const Concept& c);

struct LabeledSample {
  int n = 0;
  std::vector<CubePoint> points;
  std::vector<int> labels;  // each -1 or +1

  LabeledSample() = default;
  explicit LabeledSample(int dim) : n(dim) {}

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  void add(CubePoint x, int y);
  /// (x, y) -> (-x, -y) for every example.
  LabeledSample reflected() const;
};

/// CSV with header `x1,...,xn,y`, one example per row, entries in {-1,+1}.
LabeledSample read_sample_csv(std::istream& in);
LabeledSample read_sample_csv_file(const std::string& path);
void write_sample_csv(std::ostream& out, const LabeledSample& s);

/// Distinct points of a sample with per-label multiplicities, in first
/// occurrence order.
struct AggregatedPoint {
  CubePoint x;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};
std::vector<AggregatedPoint> aggregate(const LabeledSample& s);

enum class Ternary : std::int8_t { Neg = -1, Unknown = 0, Pos = 1 };

/// Which side of a one-sided guarantee: positive protects against false
/// positives, negative against false negatives.
enum class Sign { Positive, Negative };

std::string to_string(Sign s);
Sign parse_sign(const std::string& text);

/// Total map CubePoint -> {-1, ?, +1} on a declared dimension.
class PartialHypothesis {
 public:
  using Decide = std::function<Ternary(const CubePoint&)>;

  PartialHypothesis(int n, Decide decide) : n_(n), decide_(std::move(decide)) {}

  static PartialHypothesis total(int n, std::function<int(const CubePoint&)> f);
  static PartialHypothesis from_concept(const Concept& c);
  static PartialHypothesis constant(int n, Ternary v);
  /// c_p(x) = c+(x) if c+(x) = c-(x), else ?.
  static PartialHypothesis agreement(const PartialHypothesis& pos, const PartialHypothesis& neg);

  int dimension() const { return n_; }
  Ternary operator()(const CubePoint& x) const;

 private:
  int n_;
  Decide decide_;
};

struct ErrorMetrics {
  double false_pos = 0.0;
  double false_neg = 0.0;
  double err = 0.0;
  double unknown_rate = 0.0;
};

ErrorMetrics empirical_metrics(const PartialHypothesis& h, const LabeledSample& s);

}  // namespace relearn
