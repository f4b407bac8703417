#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace coarse {

using Rational = mpq_class;

/// Parses "p", "p/q" or "-p/q"; throws ConfigError otherwise.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& q);

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// True when q is the square of a rational.
bool is_rational_square(const Rational& q);

/// sqrt(q) for a rational square; undefined otherwise (check first).
Rational rational_sqrt(const Rational& q);

/// Sign of (c / sqrt(s) - q) for s > 0, computed exactly.
int compare_scaled_sqrt(const Rational& c, const Rational& s, const Rational& q);

}  // namespace coarse
