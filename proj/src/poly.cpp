#include "relearn/poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "relearn/errors.hpp"

namespace relearn {

// ---------------------------------------------------------------- rationals

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) throw InputError("empty rational literal");
  s = s.substr(b, e - b + 1);
  try {
    if (s.find('.') == std::string::npos && s.find_first_of("eE") == std::string::npos) {
      if (!s.empty() && s[0] == '+') s.erase(0, 1);
      Rational q(s, 10);
      if (q.get_den() == 0) throw InputError("zero denominator in '" + s + "'");
      q.canonicalize();
      return q;
    }
    std::string digits;
    bool negative = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
    long frac_digits = 0;
    bool seen_dot = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
      if (s[i] == '.') {
        if (seen_dot) throw InputError("bad rational literal '" + s + "'");
        seen_dot = true;
      } else if (s[i] >= '0' && s[i] <= '9') {
        digits += s[i];
        if (seen_dot) ++frac_digits;
      } else {
        throw InputError("bad rational literal '" + s + "'");
      }
    }
    long exponent = 0;
    if (i < s.size()) exponent = std::stol(s.substr(i + 1));
    if (digits.empty()) throw InputError("bad rational literal '" + s + "'");
    Rational q{Integer(digits, 10)};
    const long shift = exponent - frac_digits;
    Integer ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    if (shift < 0) {
      q /= ten_pow;
    } else {
      q *= ten_pow;
    }
    q.canonicalize();
    return negative ? Rational(-q) : q;
  } catch (const std::invalid_argument&) {
    throw InputError("bad rational literal '" + s + "'");
  }
}

Rational from_double(double v) {
  if (!std::isfinite(v)) throw InputError("cannot convert a non-finite double to a rational");
  return Rational(v);
}

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  trim();
}

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

UniPoly UniPoly::constant(const Rational& c) { return UniPoly({c}); }
UniPoly UniPoly::identity() { return UniPoly({Rational(0), Rational(1)}); }
UniPoly UniPoly::linear(const Rational& alpha, const Rational& beta) { return UniPoly({beta, alpha}); }

Rational UniPoly::coefficient(int power) const {
  if (power < 0 || power >= static_cast<int>(coeffs_.size())) return Rational(0);
  return coeffs_[static_cast<std::size_t>(power)];
}

Rational UniPoly::operator()(const Rational& t) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= t;
    acc += *it;
  }
  return acc;
}

Rational UniPoly::max_abs_coefficient() const {
  Rational m(0);
  for (const auto& c : coeffs_) {
    const Rational a = abs(c);
    if (a > m) m = a;
  }
  return m;
}

UniPoly UniPoly::compose_affine(const Rational& alpha, const Rational& beta) const {
  const UniPoly lin = linear(alpha, beta);
  UniPoly acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * lin + constant(*it);
  }
  return acc;
}

UniPoly UniPoly::pow(int e) const {
  if (e < 0) throw ParameterError("negative polynomial power");
  UniPoly result = constant(1);
  UniPoly base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

UniPoly operator+(const UniPoly& a, const UniPoly& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return UniPoly(std::move(c));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + Rational(-1) * b; }

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return UniPoly();
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return UniPoly(std::move(c));
}

UniPoly operator*(const Rational& k, const UniPoly& p) {
  std::vector<Rational> c = p.coeffs_;
  for (auto& x : c) x *= k;
  return UniPoly(std::move(c));
}

UniPoly chebyshev(int d) {
  if (d < 0) throw ParameterError("Chebyshev degree must be >= 0");
  UniPoly prev = UniPoly::constant(1);
  if (d == 0) return prev;
  UniPoly cur = UniPoly::identity();
  const UniPoly two_t = UniPoly::linear(2, 0);
  for (int k = 1; k < d; ++k) {
    UniPoly next = two_t * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------- sparse

std::vector<Monomial> monomials_up_to(int n, int d, std::size_t cap) {
  if (n < 0 || n > kMaxPolyVars) throw ResourceError("too many variables for monomial features");
  d = std::clamp(d, 0, n);
  std::vector<Monomial> out;
  // Enumerate by degree via Gosper's hack so the order is canonical.
  for (int k = 0; k <= d; ++k) {
    if (k == 0) {
      out.push_back(0);
      continue;
    }
    if (n == 64 && k == 64) {
      out.push_back(~Monomial{0});
      continue;
    }
    Monomial m = (Monomial{1} << k) - 1;
    while (true) {
      if (out.size() >= cap) {
        throw ResourceError("monomial feature count exceeds the cap of " + std::to_string(cap) +
                            " (n = " + std::to_string(n) + ", d = " + std::to_string(d) + ")");
      }
      out.push_back(m);
      const Monomial c = m & (~m + 1);
      const Monomial r = m + c;
      if (r == 0) break;
      m = (((r ^ m) >> 2) / c) | r;
      if (n < 64 && (m >> n)) break;
    }
  }
  return out;
}

namespace {

void check_dimension(int n) {
  if (n < 0 || n > kMaxPolyVars) {
    throw ResourceError("polynomials support at most " + std::to_string(kMaxPolyVars) +
                        " variables, got " + std::to_string(n));
  }
}

Monomial full_mask(int n) { return n >= 64 ? ~Monomial{0} : (Monomial{1} << n) - 1; }

}  // namespace

SparsePolynomial::SparsePolynomial(int n) : n_(n) { check_dimension(n); }

SparsePolynomial::SparsePolynomial(int n, std::vector<Term> terms) : n_(n) {
  check_dimension(n);
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return monomial_less(a.vars, b.vars); });
  for (auto& t : terms) {
    if (t.vars & ~full_mask(n)) throw InputError("monomial uses a variable beyond dimension");
    if (!terms_.empty() && terms_.back().vars == t.vars) {
      terms_.back().coef += t.coef;
    } else {
      terms_.push_back(std::move(t));
    }
  }
  std::erase_if(terms_, [](const Term& t) { return t.coef == 0; });
  approx_.reserve(terms_.size());
  for (auto& t : terms_) {
    t.coef.canonicalize();
    approx_.push_back(to_double(t.coef));
  }
}

SparsePolynomial::SparsePolynomial(int n, const std::unordered_map<Monomial, Rational>& terms)
    : SparsePolynomial(n, [&] {
        std::vector<Term> v;
        v.reserve(terms.size());
        for (const auto& [m, c] : terms) v.push_back({m, c});
        return v;
      }()) {}

SparsePolynomial SparsePolynomial::constant(int n, const Rational& c) {
  return SparsePolynomial(n, std::vector<Term>{{0, c}});
}

int SparsePolynomial::degree() const {
  return terms_.empty() ? 0 : monomial_degree(terms_.back().vars);
}

Rational SparsePolynomial::weight() const {
  Rational w(0);
  for (const auto& t : terms_) w += abs(t.coef);
  return w;
}

Rational SparsePolynomial::coefficient(Monomial m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Monomial v) { return monomial_less(t.vars, v); });
  if (it != terms_.end() && it->vars == m) return it->coef;
  return Rational(0);
}

void SparsePolynomial::check_point(const CubePoint& x) const {
  if (x.dimension() != n_) {
    throw InputError("point of dimension " + std::to_string(x.dimension()) +
                     " given to polynomial of dimension " + std::to_string(n_));
  }
}

double SparsePolynomial::evaluate(const CubePoint& x) const {
  check_point(x);
  return evaluate_mask(x.neg_mask());
}

double SparsePolynomial::evaluate_mask(std::uint64_t neg_mask) const {
  double s = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    s += monomial_sign(terms_[i].vars, neg_mask) > 0 ? approx_[i] : -approx_[i];
  }
  return s;
}

Rational SparsePolynomial::evaluate_exact(const CubePoint& x) const {
  check_point(x);
  const auto neg = x.neg_mask();
  Rational s(0);
  for (const auto& t : terms_) {
    if (monomial_sign(t.vars, neg) > 0) {
      s += t.coef;
    } else {
      s -= t.coef;
    }
  }
  return s;
}

SparsePolynomial SparsePolynomial::scaled(const Rational& c) const {
  std::vector<Term> t = terms_;
  for (auto& term : t) term.coef *= c;
  return SparsePolynomial(n_, std::move(t));
}

SparsePolynomial operator+(const SparsePolynomial& a, const SparsePolynomial& b) {
  if (a.n_ != b.n_) throw InputError("adding polynomials of different dimensions");
  std::vector<SparsePolynomial::Term> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return SparsePolynomial(a.n_, std::move(t));
}

SparsePolynomial operator-(const SparsePolynomial& a, const SparsePolynomial& b) {
  return a + b.scaled(-1);
}

SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
  if (a.n_ != b.n_) throw InputError("multiplying polynomials of different dimensions");
  std::unordered_map<Monomial, Rational> acc;
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) acc[x.vars ^ y.vars] += x.coef * y.coef;
  }
  return SparsePolynomial(a.n_, acc);
}

bool operator==(const SparsePolynomial& a, const SparsePolynomial& b) {
  if (a.n_ != b.n_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].vars != b.terms_[i].vars || a.terms_[i].coef != b.terms_[i].coef) return false;
  }
  return true;
}

// ---------------------------------------------------------------- structured

StructuredPolynomial::StructuredPolynomial(int n, Node node)
    : n_(n), node_(std::make_shared<const Node>(std::move(node))) {}

StructuredPolynomial::StructuredPolynomial(SparsePolynomial p)
    : n_(p.dimension()), node_(std::make_shared<const Node>(std::move(p))) {}

StructuredPolynomial StructuredPolynomial::affine(UniPoly outer, long long w0,
                                                  std::vector<long long> w) {
  const int n = static_cast<int>(w.size());
  check_dimension(n);
  return StructuredPolynomial(n, structured::Affine{std::move(outer), w0, std::move(w)});
}

StructuredPolynomial StructuredPolynomial::composed(UniPoly outer, StructuredPolynomial inner) {
  const int n = inner.dimension();
  return StructuredPolynomial(
      n, structured::Composed{std::move(outer),
                              std::make_shared<const StructuredPolynomial>(std::move(inner))});
}

StructuredPolynomial StructuredPolynomial::sum(
    std::vector<std::pair<Rational, StructuredPolynomial>> parts, const Rational& offset) {
  if (parts.empty()) throw InputError("a structured sum needs at least one part");
  const int n = parts.front().second.dimension();
  structured::Sum s;
  s.offset = offset;
  for (auto& [c, p] : parts) {
    if (p.dimension() != n) throw InputError("structured sum parts have different dimensions");
    s.parts.push_back({c, std::make_shared<const StructuredPolynomial>(std::move(p))});
  }
  return StructuredPolynomial(n, std::move(s));
}

StructuredPolynomial StructuredPolynomial::constant(int n, const Rational& c) {
  return StructuredPolynomial(SparsePolynomial::constant(n, c));
}

int StructuredPolynomial::declared_degree() const {
  return std::visit(
      [](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          return k.degree();
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          return k.outer.degree();
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          return k.outer.degree() * k.inner->declared_degree();
        } else {
          int d = 0;
          for (const auto& part : k.parts) d = std::max(d, part.poly->declared_degree());
          return d;
        }
      },
      *node_);
}

namespace {

void check_point_dim(const StructuredPolynomial& p, const CubePoint& x) {
  if (x.dimension() != p.dimension()) {
    throw InputError("point of dimension " + std::to_string(x.dimension()) +
                     " given to polynomial of dimension " + std::to_string(p.dimension()));
  }
}

long long affine_form(const structured::Affine& a, const CubePoint& x) {
  long long t = a.w0;
  for (std::size_t i = 0; i < a.w.size(); ++i) t += a.w[i] * x[i];
  return t;
}

}  // namespace

Rational evaluate_exact(const StructuredPolynomial& p, const CubePoint& x) {
  check_point_dim(p, x);
  return std::visit(
      [&](const auto& k) -> Rational {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          return k.evaluate_exact(x);
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          return k.outer(Rational(static_cast<long>(affine_form(k, x))));
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          return k.outer(evaluate_exact(*k.inner, x));
        } else {
          Rational s = k.offset;
          for (const auto& part : k.parts) s += part.scale * evaluate_exact(*part.poly, x);
          return s;
        }
      },
      p.node());
}

double evaluate(const StructuredPolynomial& p, const CubePoint& x) { return CubeEvaluator(p)(x); }

CubeEvaluator::CubeEvaluator(StructuredPolynomial p) : p_(std::move(p)) {}

double CubeEvaluator::operator()(const CubePoint& x) {
  check_point_dim(p_, x);
  return eval(p_, x);
}

double CubeEvaluator::eval(const StructuredPolynomial& node, const CubePoint& x) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          return k.evaluate(x);
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          const long long t = affine_form(k, x);
          auto& memo = affine_memo_[&k];
          auto it = memo.find(t);
          if (it != memo.end()) return it->second;
          const double v = to_double(k.outer(Rational(static_cast<long>(t))));
          memo.emplace(t, v);
          return v;
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          const double inner = eval(*k.inner, x);
          const auto key = std::bit_cast<std::uint64_t>(inner);
          auto& memo = composed_memo_[&k];
          auto it = memo.find(key);
          if (it != memo.end()) return it->second;
          const double v = to_double(k.outer(from_double(inner)));
          memo.emplace(key, v);
          return v;
        } else {
          double s = to_double(k.offset);
          for (const auto& part : k.parts) s += to_double(part.scale) * eval(*part.poly, x);
          return s;
        }
      },
      node.node());
}

// ---------------------------------------------------------------- expansion

namespace {

void check_cap(int n, int degree, const ExpansionCap& cap) {
  if (n > cap.max_vars) {
    throw ResourceError("expansion cap exceeded: n = " + std::to_string(n) + " > max_vars = " +
                        std::to_string(cap.max_vars));
  }
  if (degree > cap.max_degree) {
    throw ResourceError("expansion cap exceeded: outer degree " + std::to_string(degree) +
                        " > max_degree = " + std::to_string(cap.max_degree));
  }
}

// Horner over a dense coefficient table indexed by monomial mask. Outer
// coefficients are put over a common denominator so the inner loop runs on
// integers.
SparsePolynomial expand_affine(const structured::Affine& a, int n) {
  const auto& u = a.outer.coefficients();
  if (u.empty()) return SparsePolynomial(n);
  Integer denom = 1;
  for (const auto& c : u) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> num(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) num[j] = u[j].get_num() * (denom / u[j].get_den());

  const std::size_t size = std::size_t{1} << n;
  std::vector<Integer> acc(size), next(size);
  std::vector<std::size_t> live;  // nonzero masks of acc
  acc[0] = num.back();
  if (acc[0] != 0) live.push_back(0);
  std::vector<char> touched(size, 0);
  const Integer w0(static_cast<long>(a.w0));
  std::vector<std::pair<std::size_t, Integer>> weights;
  for (int i = 0; i < n; ++i) {
    if (a.w[static_cast<std::size_t>(i)] != 0) {
      weights.emplace_back(std::size_t{1} << i, Integer(static_cast<long>(a.w[static_cast<std::size_t>(i)])));
    }
  }
  for (std::size_t j = u.size() - 1; j-- > 0;) {
    std::vector<std::size_t> next_live;
    auto touch = [&](std::size_t m) {
      if (!touched[m]) {
        touched[m] = 1;
        next_live.push_back(m);
      }
    };
    for (std::size_t m : live) {
      const Integer& v = acc[m];
      if (a.w0 != 0) {
        next[m] += w0 * v;
        touch(m);
      }
      for (const auto& [bit, wi] : weights) {
        next[m ^ bit] += wi * v;
        touch(m ^ bit);
      }
    }
    next[0] += num[j];
    touch(0);
    for (std::size_t m : live) acc[m] = 0;
    live.clear();
    for (std::size_t m : next_live) {
      touched[m] = 0;
      if (next[m] != 0) {
        acc[m] = next[m];
        live.push_back(m);
      }
      next[m] = 0;
    }
  }
  std::vector<SparsePolynomial::Term> terms;
  terms.reserve(live.size());
  for (std::size_t m : live) terms.push_back({static_cast<Monomial>(m), Rational(acc[m], denom)});
  return SparsePolynomial(n, std::move(terms));
}

SparsePolynomial expand_impl(const StructuredPolynomial& p, const ExpansionCap& cap) {
  return std::visit(
      [&](const auto& k) -> SparsePolynomial {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          return k;
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          check_cap(p.dimension(), k.outer.degree(), cap);
          return expand_affine(k, p.dimension());
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          check_cap(p.dimension(), k.outer.degree(), cap);
          const SparsePolynomial inner = expand_impl(*k.inner, cap);
          const int n = p.dimension();
          SparsePolynomial acc(n);
          const auto& u = k.outer.coefficients();
          for (auto it = u.rbegin(); it != u.rend(); ++it) {
            acc = acc * inner + SparsePolynomial::constant(n, *it);
          }
          return acc;
        } else {
          SparsePolynomial acc = SparsePolynomial::constant(p.dimension(), k.offset);
          for (const auto& part : k.parts) acc = acc + expand_impl(*part.poly, cap).scaled(part.scale);
          return acc;
        }
      },
      p.node());
}

}  // namespace

SparsePolynomial expand(const StructuredPolynomial& p, const ExpansionCap& cap) {
  if (p.as<SparsePolynomial>() == nullptr) check_cap(p.dimension(), 0, cap);
  return expand_impl(p, cap);
}

double analytic_weight_bound(const StructuredPolynomial& p) {
  auto poly_bound = [](const UniPoly& outer, double inner_bound) {
    double s = 0.0;
    double power = 1.0;
    for (const auto& c : outer.coefficients()) {
      s += std::fabs(to_double(c)) * power;
      power *= inner_bound;
    }
    return s;
  };
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          return to_double(k.weight());
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          double w = std::fabs(static_cast<double>(k.w0));
          for (auto wi : k.w) w += std::fabs(static_cast<double>(wi));
          return poly_bound(k.outer, w);
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          return poly_bound(k.outer, analytic_weight_bound(*k.inner));
        } else {
          double s = std::fabs(to_double(k.offset));
          for (const auto& part : k.parts) {
            s += std::fabs(to_double(part.scale)) * analytic_weight_bound(*part.poly);
          }
          return s;
        }
      },
      p.node());
}

WeightDegree weight_and_degree(const StructuredPolynomial& p, const ExpansionCap& cap) {
  try {
    const SparsePolynomial e = expand(p, cap);
    return {to_double(e.weight()), e.degree(), true};
  } catch (const ResourceError&) {
    return {analytic_weight_bound(p), p.declared_degree(), false};
  }
}

// ---------------------------------------------------------------- transforms

StructuredPolynomial scale(const StructuredPolynomial& p, const Rational& c) {
  return std::visit(
      [&](const auto& k) -> StructuredPolynomial {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          return StructuredPolynomial(k.scaled(c));
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          return StructuredPolynomial::affine(c * k.outer, k.w0, k.w);
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          return StructuredPolynomial::composed(c * k.outer, *k.inner);
        } else {
          std::vector<std::pair<Rational, StructuredPolynomial>> parts;
          for (const auto& part : k.parts) parts.emplace_back(c * part.scale, *part.poly);
          return StructuredPolynomial::sum(std::move(parts), c * k.offset);
        }
      },
      p.node());
}

StructuredPolynomial add_constant(const StructuredPolynomial& p, const Rational& c) {
  return std::visit(
      [&](const auto& k) -> StructuredPolynomial {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          return StructuredPolynomial(k + SparsePolynomial::constant(k.dimension(), c));
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          return StructuredPolynomial::affine(k.outer + UniPoly::constant(c), k.w0, k.w);
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          return StructuredPolynomial::composed(k.outer + UniPoly::constant(c), *k.inner);
        } else {
          std::vector<std::pair<Rational, StructuredPolynomial>> parts;
          for (const auto& part : k.parts) parts.emplace_back(part.scale, *part.poly);
          return StructuredPolynomial::sum(std::move(parts), k.offset + c);
        }
      },
      p.node());
}

StructuredPolynomial substitute_literals(const StructuredPolynomial& p, int n_total,
                                         const std::vector<Literal>& map) {
  if (static_cast<int>(map.size()) != p.dimension()) {
    throw InputError("literal map has " + std::to_string(map.size()) + " entries for dimension " +
                     std::to_string(p.dimension()));
  }
  check_dimension(n_total);
  {
    std::vector<char> used(static_cast<std::size_t>(n_total) + 1, 0);
    for (const auto& l : map) {
      if (l.var < 1 || l.var > n_total) throw InputError("literal map variable out of range");
      if (used[static_cast<std::size_t>(l.var)]++) {
        throw InputError("literal map must use distinct variables");
      }
    }
  }
  return std::visit(
      [&](const auto& k) -> StructuredPolynomial {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          std::vector<SparsePolynomial::Term> terms;
          terms.reserve(k.size());
          for (const auto& t : k.terms()) {
            Monomial m = 0;
            int flips = 0;
            for (std::size_t i = 0; i < map.size(); ++i) {
              if (t.vars & (Monomial{1} << i)) {
                m |= Monomial{1} << (map[i].var - 1);
                flips += map[i].negated ? 1 : 0;
              }
            }
            terms.push_back({m, (flips & 1) ? Rational(-t.coef) : t.coef});
          }
          return StructuredPolynomial(SparsePolynomial(n_total, std::move(terms)));
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          std::vector<long long> w(static_cast<std::size_t>(n_total), 0);
          for (std::size_t i = 0; i < map.size(); ++i) {
            w[static_cast<std::size_t>(map[i].var - 1)] = map[i].negated ? -k.w[i] : k.w[i];
          }
          return StructuredPolynomial::affine(k.outer, k.w0, std::move(w));
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          return StructuredPolynomial::composed(k.outer,
                                                substitute_literals(*k.inner, n_total, map));
        } else {
          std::vector<std::pair<Rational, StructuredPolynomial>> parts;
          for (const auto& part : k.parts) {
            parts.emplace_back(part.scale, substitute_literals(*part.poly, n_total, map));
          }
          return StructuredPolynomial::sum(std::move(parts), k.offset);
        }
      },
      p.node());
}

StructuredPolynomial negate_inputs(const StructuredPolynomial& p) {
  std::vector<Literal> map;
  for (int i = 1; i <= p.dimension(); ++i) map.push_back({i, true});
  return substitute_literals(p, p.dimension(), map);
}

}  // namespace relearn
