#pragma once

#include <json.hpp>

#include "relearn/certify.hpp"
#include "relearn/constructions.hpp"
#include "relearn/learn.hpp"
#include "relearn/poly.hpp"

namespace relearn {

using Json = nlohmann::json;

/// {"n": int, "terms": [{"vars": [1-based...], "coef": "p/q"}]}
Json to_json(const SparsePolynomial& p);
SparsePolynomial sparse_from_json(const Json& j);

/// Constructor tree: {"form": "sparse" | "affine" | "composed" | "sum", ...}.
/// Sparse forms may omit "form".
Json to_json(const StructuredPolynomial& p);
StructuredPolynomial structured_from_json(const Json& j);

Json to_json(const UniPoly& p);  // ["c0", "c1", ...]
UniPoly unipoly_from_json(const Json& j);

/// {"ok", "eps", "worst_pos", "worst_neg", "points", "witness"}; an empty
/// class (-inf) is written as null.
Json to_json(const CertReport& r);
CertReport cert_from_json(const Json& j);

Json to_json(const FitReport& r);
Json to_json(const ReliableHypothesis& h);
ReliableHypothesis hypothesis_from_json(const Json& j);
Json to_json(const Approximant& a);

/// Finite values as numbers, infinities as "inf" / "-inf".
Json number_or_inf(double v);
double number_from_json(const Json& j);

}  // namespace relearn
