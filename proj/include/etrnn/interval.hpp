#pragma once

// Closed intervals with rational endpoints. Arithmetic returns the exact
// image hull for each field operation, so no rounding slack is introduced
// at this layer; widening happens only inside transcendental enclosures.

#include <string>

#include "etrnn/rational.hpp"

namespace etrnn {

struct RatInterval {
    Rational lo, hi;
};

RatInterval iv_make(Rational lo, Rational hi);
inline RatInterval iv_point(const Rational& q) { return RatInterval{q, q}; }

inline Rational iv_width(const RatInterval& a) { return a.hi - a.lo; }
inline Rational iv_mid(const RatInterval& a) { return (a.lo + a.hi) / 2; }
inline bool iv_contains(const RatInterval& a, const Rational& q) { return a.lo <= q && q <= a.hi; }
inline bool iv_subset(const RatInterval& a, const RatInterval& b) { return b.lo <= a.lo && a.hi <= b.hi; }

RatInterval iv_add(const RatInterval& a, const RatInterval& b);
RatInterval iv_neg(const RatInterval& a);
RatInterval iv_sub(const RatInterval& a, const RatInterval& b);
RatInterval iv_mul(const RatInterval& a, const RatInterval& b);

// Throws Errc::domain when the divisor interval contains zero.
RatInterval iv_div(const RatInterval& a, const RatInterval& b);

RatInterval iv_hull(const RatInterval& a, const RatInterval& b);

// Intersection of two intervals known to share a point. Throws
// Errc::internal when the intersection is empty, which signals a broken
// enclosure in the caller rather than a data error.
RatInterval iv_meet(const RatInterval& a, const RatInterval& b);

// Symmetric widening by a nonnegative radius.
RatInterval iv_pad(const RatInterval& a, const Rational& r);

// Endpoint clamp against an outer bound; keeps the parts inside [lo, hi].
RatInterval iv_clamp(const RatInterval& a, const Rational& lo, const Rational& hi);

// An enclosure of sqrt over a nonnegative interval, outward rounded with
// width overhead at most 2^-prec. Throws Errc::domain when a.lo < 0.
RatInterval iv_sqrt(const RatInterval& a, int prec);

std::string iv_to_string(const RatInterval& a);

} // namespace etrnn
