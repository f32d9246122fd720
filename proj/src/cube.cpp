#include "relearn/cube.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "relearn/errors.hpp"

namespace relearn {

CubePoint::CubePoint(std::vector<std::int8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b != 1 && b != -1) throw InputError("cube point entries must be -1 or +1");
  }
}

CubePoint::CubePoint(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 1 && b != -1) throw InputError("cube point entries must be -1 or +1");
    bits_.push_back(static_cast<std::int8_t>(b));
  }
}

CubePoint CubePoint::from_index(int n, std::uint64_t index) {
  std::vector<std::int8_t> bits(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool one = (index >> (n - 1 - i)) & 1u;
    bits[static_cast<std::size_t>(i)] = one ? 1 : -1;
  }
  CubePoint p;
  p.bits_ = std::move(bits);
  return p;
}

std::uint64_t CubePoint::index() const {
  if (bits_.size() > 63) throw InputError("point index needs n <= 63");
  std::uint64_t idx = 0;
  for (auto b : bits_) idx = (idx << 1) | (b > 0 ? 1u : 0u);
  return idx;
}

CubePoint CubePoint::negated() const {
  CubePoint p;
  p.bits_ = bits_;
  for (auto& b : p.bits_) b = static_cast<std::int8_t>(-b);
  return p;
}

std::uint64_t CubePoint::neg_mask() const {
  if (bits_.size() > 64) throw InputError("neg_mask needs n <= 64");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] < 0) m |= std::uint64_t{1} << i;
  }
  return m;
}

long long Halfspace::weight() const {
  long long s = w0 < 0 ? -w0 : w0;
  for (auto wi : w) s += wi < 0 ? -wi : wi;
  return s;
}

long long Halfspace::linear_form(const CubePoint& x) const {
  long long t = w0;
  for (std::size_t i = 0; i < w.size(); ++i) t += w[i] * x[i];
  return t;
}

namespace {

void check_var(int n, int var) {
  if (var < 1 || var > n) {
    throw InputError("variable index " + std::to_string(var) + " outside [1, " +
                     std::to_string(n) + "]");
  }
}

void normalize_literals(int n, Clause& lits, bool strict_term) {
  for (const auto& l : lits) check_var(n, l.var);
  std::sort(lits.begin(), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (lits[i] == lits[i - 1]) throw InputError("duplicate literal in clause");
    if (strict_term && lits[i].var == lits[i - 1].var) {
      throw InputError("variable " + std::to_string(lits[i].var) +
                       " appears twice in one clause");
    }
  }
}

bool any_true(const Clause& lits, const CubePoint& x) {
  return std::any_of(lits.begin(), lits.end(), [&](const Literal& l) { return l.eval(x) > 0; });
}

bool all_true(const Clause& lits, const CubePoint& x) {
  return std::all_of(lits.begin(), lits.end(), [&](const Literal& l) { return l.eval(x) > 0; });
}

}  // namespace

Concept::Concept(int n, Kind kind) : n_(n), kind_(std::move(kind)) {
  if (n_ < 0) throw InputError("negative dimension");
  std::visit(
      [&](auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disjunction> || std::is_same_v<T, Conjunction>) {
          normalize_literals(n_, k.literals, false);
        } else if constexpr (std::is_same_v<T, Majority>) {
          for (int v : k.vars) check_var(n_, v);
          std::sort(k.vars.begin(), k.vars.end());
          if (std::adjacent_find(k.vars.begin(), k.vars.end()) != k.vars.end()) {
            throw InputError("duplicate variable in majority");
          }
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          if (static_cast<int>(k.w.size()) != n_) {
            throw InputError("halfspace has " + std::to_string(k.w.size()) +
                             " weights for dimension " + std::to_string(n_));
          }
          if (k.weight() < 1) throw InputError("halfspace weight must be >= 1");
        } else {
          for (auto& clause : k.clauses) normalize_literals(n_, clause, true);
        }
      },
      kind_);
}

int Concept::operator()(const CubePoint& x) const {
  if (x.dimension() != n_) {
    throw InputError("point of dimension " + std::to_string(x.dimension()) +
                     " given to concept of dimension " + std::to_string(n_));
  }
  return std::visit(
      [&](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disjunction>) {
          return any_true(k.literals, x) ? 1 : -1;
        } else if constexpr (std::is_same_v<T, Conjunction>) {
          return all_true(k.literals, x) ? 1 : -1;
        } else if constexpr (std::is_same_v<T, Majority>) {
          long long s = 0;
          for (int v : k.vars) s += x[static_cast<std::size_t>(v - 1)];
          return sgn(s);
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return sgn(k.linear_form(x));
        } else if constexpr (std::is_same_v<T, Dnf>) {
          for (const auto& c : k.clauses) {
            if (all_true(c, x)) return 1;
          }
          return -1;
        } else {
          for (const auto& c : k.clauses) {
            if (!any_true(c, x)) return -1;
          }
          return 1;
        }
      },
      kind_);
}

int eval_concept(const Concept& c, const CubePoint& x) { return c(x); }

Concept reflect(const Concept& c) {
  const int n = c.dimension();
  return std::visit(
      [&](const auto& k) -> Concept {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disjunction>) {
          return Concept(n, Conjunction{k.literals});
        } else if constexpr (std::is_same_v<T, Conjunction>) {
          return Concept(n, Disjunction{k.literals});
        } else if constexpr (std::is_same_v<T, Dnf>) {
          return Concept(n, Cnf{k.clauses});
        } else if constexpr (std::is_same_v<T, Cnf>) {
          return Concept(n, Dnf{k.clauses});
        } else if constexpr (std::is_same_v<T, Majority>) {
          if (k.vars.size() % 2 == 1) return c;
          Halfspace h;
          h.w0 = 1;
          h.w.assign(static_cast<std::size_t>(n), 0);
          for (int v : k.vars) h.w[static_cast<std::size_t>(v - 1)] = 1;
          return Concept(n, h);
        } else {
          Halfspace h = k;
          h.w0 = 1 - k.w0;
          if (h.weight() == 0) h.w0 = -1;
          return Concept(n, h);
        }
      },
      c.kind());
}

Concept make_majority(int n, std::vector<int> vars) { return Concept(n, Majority{std::move(vars)}); }

Concept make_or(int n, int fan_in) {
  Clause lits;
  for (int i = 1; i <= fan_in; ++i) lits.push_back({i, false});
  return Concept(n, Disjunction{lits});
}

Concept make_and(int n, int fan_in) {
  Clause lits;
  for (int i = 1; i <= fan_in; ++i) lits.push_back({i, false});
  return Concept(n, Conjunction{lits});
}

Concept constant_concept(int n, int value) {
  // Empty disjunction is False, empty conjunction is True.
  if (value > 0) return Concept(n, Conjunction{});
  return Concept(n, Disjunction{});
}

void LabeledSample::add(CubePoint x, int y) {
  if (x.dimension() != n) {
    throw InputError("example of dimension " + std::to_string(x.dimension()) +
                     " added to sample of dimension " + std::to_string(n));
  }
  if (y != 1 && y != -1) throw InputError("labels must be -1 or +1");
  points.push_back(std::move(x));
  labels.push_back(y);
}

LabeledSample LabeledSample::reflected() const {
  LabeledSample out(n);
  out.points.reserve(size());
  out.labels.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out.points.push_back(points[i].negated());
    out.labels.push_back(-labels[i]);
  }
  return out;
}

std::vector<AggregatedPoint> aggregate(const LabeledSample& s) {
  std::vector<AggregatedPoint> out;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto bits = s.points[i].bits();
    std::string key(reinterpret_cast<const char*>(bits.data()), bits.size());
    auto [it, inserted] = slot.try_emplace(std::move(key), out.size());
    if (inserted) out.push_back({s.points[i], 0, 0});
    auto& agg = out[it->second];
    if (s.labels[i] > 0) {
      ++agg.positives;
    } else {
      ++agg.negatives;
    }
  }
  return out;
}

PartialHypothesis PartialHypothesis::total(int n, std::function<int(const CubePoint&)> f) {
  return PartialHypothesis(n, [f = std::move(f)](const CubePoint& x) {
    return f(x) > 0 ? Ternary::Pos : Ternary::Neg;
  });
}

PartialHypothesis PartialHypothesis::from_concept(const Concept& c) {
  return total(c.dimension(), [c](const CubePoint& x) { return c(x); });
}

PartialHypothesis PartialHypothesis::constant(int n, Ternary v) {
  return PartialHypothesis(n, [v](const CubePoint&) { return v; });
}

PartialHypothesis PartialHypothesis::agreement(const PartialHypothesis& pos,
                                               const PartialHypothesis& neg) {
  if (pos.dimension() != neg.dimension()) throw InputError("hypothesis dimensions differ");
  return PartialHypothesis(pos.dimension(), [pos, neg](const CubePoint& x) {
    const Ternary a = pos(x);
    return a == neg(x) ? a : Ternary::Unknown;
  });
}

Ternary PartialHypothesis::operator()(const CubePoint& x) const {
  if (x.dimension() != n_) {
    throw InputError("point of dimension " + std::to_string(x.dimension()) +
                     " given to hypothesis of dimension " + std::to_string(n_));
  }
  return decide_(x);
}

ErrorMetrics empirical_metrics(const PartialHypothesis& h, const LabeledSample& s) {
  if (s.empty()) throw InputError("empirical metrics need a non-empty sample");
  if (s.n != h.dimension()) throw InputError("sample and hypothesis dimensions differ");
  std::size_t fp = 0, fn = 0, unknown = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Ternary v = h(s.points[i]);
    if (v == Ternary::Unknown) {
      ++unknown;
    } else if (v == Ternary::Pos && s.labels[i] < 0) {
      ++fp;
    } else if (v == Ternary::Neg && s.labels[i] > 0) {
      ++fn;
    }
  }
  const double m = static_cast<double>(s.size());
  ErrorMetrics r;
  r.false_pos = static_cast<double>(fp) / m;
  r.false_neg = static_cast<double>(fn) / m;
  r.err = static_cast<double>(fp + fn) / m;
  r.unknown_rate = static_cast<double>(unknown) / m;
  return r;
}

std::string to_string(Sign s) { return s == Sign::Positive ? "positive" : "negative"; }

Sign parse_sign(const std::string& text) {
  if (text == "positive" || text == "pos" || text == "+") return Sign::Positive;
  if (text == "negative" || text == "neg" || text == "-") return Sign::Negative;
  throw InputError("unknown sign '" + text + "' (expected positive or negative)");
}

}  // namespace relearn
