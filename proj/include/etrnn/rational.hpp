#pragma once

// Exact rational arithmetic. All numeric state in the library is held as
// arbitrary-precision rationals; no floating point enters any computation.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

#include "etrnn/error.hpp"

namespace etrnn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt rat_den(const Rational& q) { return boost::multiprecision::denominator(q); }

// 2^k for any integer k, including negative exponents.
Rational pow2(long k);

Rational rat_abs(const Rational& q);
int rat_sign(const Rational& q);

// Canonical text form: "p" when the denominator is 1, otherwise "p/q" in
// lowest terms with the sign on the numerator.
std::string rat_to_string(const Rational& q);

// Accepts "p", "p/q", and decimal literals like "-2.75". Throws Errc::parse
// on malformed input and Errc::domain on a zero denominator.
Rational rat_from_string(std::string_view s);

// Exact square root when the argument is a square of a rational.
std::optional<Rational> rat_sqrt_exact(const Rational& q);

// Floor of q as a big integer (rounds toward minus infinity).
BigInt rat_floor(const Rational& q);

// Nearest integer to q; halves round toward positive infinity.
BigInt rat_round(const Rational& q);

} // namespace etrnn
