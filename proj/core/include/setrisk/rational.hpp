#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace setrisk {

using Rational = mpq_class;
using Vec = std::vector<Rational>;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (tree, market, claim, spec).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An operation would exceed the configured ambient-dimension cap.
class DimensionCapError : public Error {
 public:
  using Error::Error;
};

/// The market model admits no consistent price system, or a quantity that
/// depends on one is requested anyway.
class InfeasibleModelError : public Error {
 public:
  using Error::Error;
};

/// Parses "p/q", "p", or a plain decimal such as "0.25" into a canonical
/// rational. Throws InputError on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// num/den in canonical form. mpq_class(num, den) does not reduce, and GMP
/// arithmetic assumes reduced operands.
Rational ratio(long num, long den);

/// Canonical "p/q" text; integers print without the denominator.
std::string to_string(const Rational& value);

Rational dot(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, const Rational& factor);
Vec negate(const Vec& a);
Vec zeros(std::size_t n);
Vec unit(std::size_t n, std::size_t i);
bool is_zero(const Vec& a);

/// Scales a nonzero vector by a positive factor so that it has integer
/// entries with gcd 1. Direction and orientation are preserved.
Vec primitive(const Vec& a);

/// Componentwise a <= b.
bool leq(const Vec& a, const Vec& b);

double to_double(const Rational& value);

std::string to_string(const Vec& v);

}  // namespace setrisk
