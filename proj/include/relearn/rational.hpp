#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace relearn {

using Rational = mpq_class;
using Integer = mpz_class;

/// Canonical "p/q" text ("p" when q = 1).
std::string to_string(const Rational& q);

/// Parses "p", "p/q" or a decimal literal such as "-0.125" exactly.
Rational parse_rational(std::string_view text);

/// Nearest-ish double (GMP truncates toward zero).
inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact rational value of a finite double.
Rational from_double(double v);

}  // namespace relearn
