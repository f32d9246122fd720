#include <cmath>
#include <limits>

#include "relearn/errors.hpp"
#include "relearn/serialize.hpp"

namespace relearn {

namespace {

Rational rational_from(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
  if (j.is_number()) return from_double(j.get<double>());
  throw InputError("expected a rational, got " + j.dump());
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field '") + key + "' in " + j.dump().substr(0, 80));
  }
  return j.at(key);
}

Json point_json(const CubePoint& x) {
  Json a = Json::array();
  for (int v : x.bits()) a.push_back(v);
  return a;
}

}  // namespace

Json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return to_double(parse_rational(s));
  }
  if (j.is_number()) return j.get<double>();
  throw InputError("expected a number, got " + j.dump());
}

Json to_json(const SparsePolynomial& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms()) {
    Json vars = Json::array();
    for (int i = 0; i < kMaxPolyVars; ++i) {
      if (t.vars & (Monomial{1} << i)) vars.push_back(i + 1);
    }
    terms.push_back({{"vars", vars}, {"coef", to_string(t.coef)}});
  }
  return {{"n", p.dimension()}, {"terms", terms}};
}

SparsePolynomial sparse_from_json(const Json& j) {
  const int n = field(j, "n").get<int>();
  std::vector<SparsePolynomial::Term> terms;
  for (const auto& t : field(j, "terms")) {
    Monomial m = 0;
    for (const auto& v : field(t, "vars")) {
      const int i = v.get<int>();
      if (i < 1 || i > n) throw InputError("monomial variable " + std::to_string(i) + " out of range");
      if (m & (Monomial{1} << (i - 1))) throw InputError("monomial repeats variable " + std::to_string(i));
      m |= Monomial{1} << (i - 1);
    }
    terms.push_back({m, rational_from(field(t, "coef"))});
  }
  return SparsePolynomial(n, std::move(terms));
}

Json to_json(const UniPoly& p) {
  Json a = Json::array();
  for (const auto& c : p.coefficients()) a.push_back(to_string(c));
  return a;
}

UniPoly unipoly_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("univariate polynomial must be an array of coefficients");
  std::vector<Rational> c;
  for (const auto& v : j) c.push_back(rational_from(v));
  return UniPoly(std::move(c));
}

Json to_json(const StructuredPolynomial& p) {
  return std::visit(
      [&](const auto& k) -> Json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparsePolynomial>) {
          Json j = to_json(k);
          j["form"] = "sparse";
          return j;
        } else if constexpr (std::is_same_v<T, structured::Affine>) {
          return {{"form", "affine"}, {"n", p.dimension()}, {"outer", to_json(k.outer)},
                  {"w0", k.w0}, {"w", k.w}};
        } else if constexpr (std::is_same_v<T, structured::Composed>) {
          return {{"form", "composed"}, {"n", p.dimension()}, {"outer", to_json(k.outer)},
                  {"inner", to_json(*k.inner)}};
        } else {
          Json parts = Json::array();
          for (const auto& part : k.parts) {
            parts.push_back({{"scale", to_string(part.scale)}, {"poly", to_json(*part.poly)}});
          }
          return {{"form", "sum"}, {"n", p.dimension()}, {"offset", to_string(k.offset)},
                  {"parts", parts}};
        }
      },
      p.node());
}

StructuredPolynomial structured_from_json(const Json& j) {
  const std::string form = j.contains("form") ? j.at("form").get<std::string>() : "sparse";
  if (form == "sparse") return sparse_from_json(j);
  if (form == "affine") {
    auto w = field(j, "w").get<std::vector<long long>>();
    if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(w.size())) {
      throw InputError("affine form: n differs from the weight count");
    }
    return StructuredPolynomial::affine(unipoly_from_json(field(j, "outer")),
                                        field(j, "w0").get<long long>(), std::move(w));
  }
  if (form == "composed") {
    return StructuredPolynomial::composed(unipoly_from_json(field(j, "outer")),
                                          structured_from_json(field(j, "inner")));
  }
  if (form == "sum") {
    std::vector<std::pair<Rational, StructuredPolynomial>> parts;
    for (const auto& part : field(j, "parts")) {
      parts.emplace_back(rational_from(field(part, "scale")), structured_from_json(field(part, "poly")));
    }
    return StructuredPolynomial::sum(std::move(parts), rational_from(field(j, "offset")));
  }
  throw InputError("unknown polynomial form '" + form + "'");
}

Json to_json(const CertReport& r) {
  auto worst = [](double v) -> Json { return std::isinf(v) ? Json(nullptr) : Json(v); };
  return {{"ok", r.ok},
          {"eps", r.eps},
          {"worst_pos", worst(r.worst_pos)},
          {"worst_neg", worst(r.worst_neg)},
          {"points", r.points},
          {"witness", r.witness ? point_json(*r.witness) : Json(nullptr)}};
}

CertReport cert_from_json(const Json& j) {
  auto worst = [](const Json& v) {
    return v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>();
  };
  CertReport r;
  r.ok = field(j, "ok").get<bool>();
  r.eps = field(j, "eps").get<double>();
  r.worst_pos = worst(field(j, "worst_pos"));
  r.worst_neg = worst(field(j, "worst_neg"));
  r.points = field(j, "points").get<std::uint64_t>();
  if (j.contains("witness") && !j.at("witness").is_null()) {
    std::vector<std::int8_t> bits;
    for (const auto& v : j.at("witness")) bits.push_back(static_cast<std::int8_t>(v.get<int>()));
    r.witness = CubePoint(std::move(bits));
  }
  return r;
}

Json to_json(const FitReport& r) {
  return {{"objective_value", r.objective_value},
          {"constraints_active", r.constraints_active},
          {"eps", r.eps},
          {"W", r.W},
          {"d", r.d},
          {"m", r.m},
          {"features", r.features},
          {"distinct_points", r.distinct_points},
          {"lp_status", lp::to_string(r.lp_status)},
          {"lp_iterations", r.lp_iterations}};
}

Json to_json(const ReliableHypothesis& h) {
  const bool thr = h.mode == ReliableHypothesis::Mode::Thresholded;
  Json j = {{"sign", to_string(h.sign)},
            {"mode", thr ? "thresholded" : "randomized"},
            {"polynomial", to_json(h.p)}};
  if (thr) {
    j["threshold"] = number_or_inf(h.threshold);
    j["calibration_size"] = h.calibration_size;
  }
  return j;
}

ReliableHypothesis hypothesis_from_json(const Json& j) {
  ReliableHypothesis h;
  h.sign = parse_sign(field(j, "sign").get<std::string>());
  const auto mode = field(j, "mode").get<std::string>();
  if (mode == "thresholded") {
    h.mode = ReliableHypothesis::Mode::Thresholded;
    h.threshold = number_from_json(field(j, "threshold"));
    h.calibration_size = j.value("calibration_size", std::size_t{0});
  } else if (mode == "randomized") {
    h.mode = ReliableHypothesis::Mode::Randomized;
  } else {
    throw InputError("unknown hypothesis mode '" + mode + "'");
  }
  h.p = sparse_from_json(field(j, "polynomial"));
  return h;
}

Json to_json(const Approximant& a) {
  return {{"mode", to_string(a.mode)},
          {"eps", a.eps},
          {"degree_bound", a.degree_bound},
          {"weight_bound", number_or_inf(a.weight_bound)},
          {"certified", a.certified},
          {"k", a.k},
          {"schedule_tried", a.tried},
          {"polynomial", to_json(a.poly)},
          {"certificate", a.certificate ? to_json(*a.certificate) : Json(nullptr)}};
}

}  // namespace relearn
