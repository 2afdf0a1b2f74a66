#include "etrnn/interval.hpp"

#include <algorithm>

namespace etrnn {

RatInterval iv_make(Rational lo, Rational hi) {
    if (lo > hi) throw Error(Errc::internal, "interval endpoints out of order");
    return RatInterval{std::move(lo), std::move(hi)};
}

RatInterval iv_add(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

RatInterval iv_neg(const RatInterval& a) { return {-a.hi, -a.lo}; }

RatInterval iv_sub(const RatInterval& a, const RatInterval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}

RatInterval iv_mul(const RatInterval& a, const RatInterval& b) {
    Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

RatInterval iv_div(const RatInterval& a, const RatInterval& b) {
    if (b.lo <= 0 && 0 <= b.hi)
        throw Error(Errc::domain, "interval division by an interval containing zero");
    Rational p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

RatInterval iv_hull(const RatInterval& a, const RatInterval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

RatInterval iv_meet(const RatInterval& a, const RatInterval& b) {
    Rational lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
    if (lo > hi) throw Error(Errc::internal, "empty intersection of enclosures");
    return {lo, hi};
}

RatInterval iv_pad(const RatInterval& a, const Rational& r) {
    if (r < 0) throw Error(Errc::internal, "negative padding radius");
    return {a.lo - r, a.hi + r};
}

RatInterval iv_clamp(const RatInterval& a, const Rational& lo, const Rational& hi) {
    Rational l = std::max(a.lo, lo), h = std::min(a.hi, hi);
    if (l > h) throw Error(Errc::internal, "clamp emptied an enclosure");
    return {l, h};
}

namespace {

// Lower and upper dyadic-scaled brackets for sqrt of a nonnegative rational:
// with N = num * den * 4^m, floor(sqrt(N)) = r gives
//   r / (den * 2^m) <= sqrt(q) <= (r + 1) / (den * 2^m).
std::pair<Rational, Rational> sqrt_bracket(const Rational& q, int prec) {
    if (q == 0) return {Rational(0), Rational(0)};
    BigInt num = rat_num(q), den = rat_den(q);
    int m = std::max(prec + 1, 1);
    BigInt scaled = num * den;
    scaled <<= 2 * m;
    BigInt r = boost::multiprecision::sqrt(scaled);
    BigInt scale = den << m;
    if (r * r == scaled) return {Rational(r, scale), Rational(r, scale)};
    return {Rational(r, scale), Rational(r + 1, scale)};
}

} // namespace

RatInterval iv_sqrt(const RatInterval& a, int prec) {
    if (a.lo < 0) throw Error(Errc::domain, "sqrt of an interval with negative lower end");
    auto lo_b = sqrt_bracket(a.lo, prec);
    auto hi_b = sqrt_bracket(a.hi, prec);
    return {lo_b.first, hi_b.second};
}

std::string iv_to_string(const RatInterval& a) {
    return "[" + rat_to_string(a.lo) + ", " + rat_to_string(a.hi) + "]";
}

} // namespace etrnn
