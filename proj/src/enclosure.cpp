#include "etrnn/activation.hpp"

#include <map>

#include "etrnn/log.hpp"

// Enclosure cores. Each public evaluator is the intersection of raw passes
// at depths 1..d (telescoping), which makes results nested in depth. Each
// raw pass encloses the exact image with core error at most 2^-(d+11) and
// then widens by the padding radius 2^-(d+10). The padding dominates the
// core error ten depths down:
//     core_err(d+10) + pad(d+10) <= pad(d),
// so an enclosure of a point of the input box computed at depth d+10 is
// contained in every raw pass at depths <= d, hence in the telescoped
// result for the whole box.

namespace etrnn {

namespace {

int clamp_depth(int d) { return d < 1 ? 1 : d; }

Rational pad_radius(int d) { return pow2(-(d + 10)); }

// Ceiling of 1.45 * 2^i, an upper bound on log2(e^(2^i)) plus margin.
long log2e_scaled(int i) { return (29L * (1L << i) + 19) / 20; }

// Enclosure of exp(q) for q >= 0 via argument halving, Taylor summation,
// and repeated interval squaring. Core width at depth d is at most
// 2^-(d+11) for q <= 8.
RatInterval exp_point_nonneg(const Rational& q, int d) {
    if (q > 64) {
        // Crude but sound bracket for very large arguments: 2^q <= e^q
        // and e^q <= 2^(ceil(1.45 q)).
        long fl = static_cast<long>(rat_floor(q));
        long cl = static_cast<long>(rat_floor(q)) + 1;
        return {pow2(fl), pow2((29 * cl + 19) / 20)};
    }
    Rational x = q;
    int h = 0;
    while (x > 1) {
        x /= 2;
        ++h;
    }
    // Budget for the squaring stages: each squaring multiplies the width
    // by at most 2 * max|E| with max|E| <= exp(2^i) + 1.
    long mult_bits = 0;
    for (int i = 0; i < h; ++i) mult_bits += 2 + log2e_scaled(i);
    long target_bits = d + 12 + mult_bits;

    // Taylor terms of exp(x) for x in [0, 1]; remainder after n terms is
    // at most 2 x^(n+1) / (n+1)! <= 2 / (n+1)!.
    Rational sum = 1, term = 1, rem_bound = pow2(-target_bits);
    int k = 0;
    while (true) {
        ++k;
        term = term * x / k;
        sum += term;
        Rational next = term * x / (k + 1);
        if (2 * next <= rem_bound && k >= 2) {
            RatInterval e{sum, sum + 2 * next};
            for (int i = 0; i < h; ++i) e = iv_mul(e, e);
            return e;
        }
    }
}

RatInterval exp_point(const Rational& q, int d) {
    if (q >= 0) return exp_point_nonneg(q, d);
    if (-q >= d + 12) return {Rational(0), pow2(-(d + 12))};
    RatInterval e = exp_point_nonneg(-q, d);
    return iv_div(iv_point(Rational(1)), e);
}

RatInterval exp_raw(const RatInterval& x, int d) {
    RatInterval core{exp_point(x.lo, d).lo, exp_point(x.hi, d).hi};
    RatInterval padded = iv_pad(core, pad_radius(d));
    if (padded.lo < 0) padded.lo = 0;
    return padded;
}

RatInterval pi_raw(int d) {
    // Machin: pi = 16 arctan(1/5) - 4 arctan(1/239). The arctan series
    // alternates with strictly decreasing terms, so the partial sum is
    // within the magnitude of the first omitted term.
    Rational eps = pow2(-(d + 16));
    auto arctan_inv = [&](long m) {
        Rational mm = Rational(1, m * m);
        Rational pw = Rational(1, m), sum = 0;
        int k = 0;
        while (true) {
            Rational term = pw / (2 * k + 1);
            if (term <= eps) return RatInterval{sum - term, sum + term};
            sum += (k % 2 == 0) ? term : Rational(-term);
            pw *= mm;
            ++k;
        }
    };
    RatInterval a5 = arctan_inv(5), a239 = arctan_inv(239);
    return iv_sub(iv_mul(iv_point(Rational(16)), a5), iv_mul(iv_point(Rational(4)), a239));
}

// Taylor enclosure of sin at a rational point with |u| <= 6.4. Terms
// decrease in magnitude from index 2 on in that range, so after summing
// through index n >= 3 the remainder is bounded by the next term.
RatInterval sin_taylor_point(const Rational& u, const Rational& eps) {
    if (rat_abs(u) > Rational(32, 5))
        throw Error(Errc::internal, "sin Taylor point out of reduced range");
    // Reduce to a nonnegative argument so term magnitudes stay positive.
    if (u < 0) return iv_neg(sin_taylor_point(-u, eps));
    Rational u2 = u * u;
    Rational term = u, sum = 0;
    int k = 0;
    while (true) {
        sum += (k % 2 == 0) ? term : Rational(-term);
        Rational next = term * u2 / ((2 * k + 2) * (2 * k + 3));
        if (k >= 3 && next <= eps) return {sum - next, sum + next};
        term = next;
        ++k;
    }
}

// Enclosure of sin at one rational point, core width at most 2^-(d+12).
RatInterval sin_point(const Rational& t, int d) {
    RatInterval two_pi = iv_mul(iv_point(Rational(2)), pi_enclosure(d + 14));
    BigInt k0 = rat_round(t / iv_mid(two_pi));
    if (k0 != 0) {
        // Refresh pi at a precision that absorbs the multiplier k.
        int extra = static_cast<int>(boost::multiprecision::msb(boost::multiprecision::abs(k0))) + 2;
        two_pi = iv_mul(iv_point(Rational(2)), pi_enclosure(d + 14 + extra));
    }
    BigInt k = rat_round(t / iv_mid(two_pi));
    RatInterval red = iv_sub(iv_point(t), iv_mul(iv_point(Rational(k)), two_pi));
    if (red.lo < Rational(-32, 5) || red.hi > Rational(32, 5)) return {Rational(-1), Rational(1)};
    // The true reduced angle p = t - k 2pi lies in red and sin(t) = sin(p);
    // sin is 1-Lipschitz, so the Taylor value at red.lo widened by the
    // reduction width covers sin(p).
    RatInterval base = sin_taylor_point(red.lo, pow2(-(d + 14)));
    return iv_pad(base, iv_width(red));
}

RatInterval sin_raw(const RatInterval& x, int d) {
    auto finish = [&](const RatInterval& core) {
        return iv_clamp(iv_pad(core, pad_radius(d)), Rational(-1), Rational(1));
    };
    RatInterval pi_iv = pi_enclosure(d + 14);
    RatInterval two_pi = iv_mul(iv_point(Rational(2)), pi_iv);
    if (iv_width(x) >= two_pi.lo) return {Rational(-1), Rational(1)};

    BigInt k0 = rat_round(iv_mid(x) / iv_mid(two_pi));
    if (k0 != 0) {
        int extra = static_cast<int>(boost::multiprecision::msb(boost::multiprecision::abs(k0))) + 2;
        pi_iv = pi_enclosure(d + 14 + extra);
        two_pi = iv_mul(iv_point(Rational(2)), pi_iv);
    }
    BigInt k = rat_round(iv_mid(x) / iv_mid(two_pi));
    RatInterval red = iv_sub(x, iv_mul(iv_point(Rational(k)), two_pi));
    if (red.lo < Rational(-32, 5) || red.hi > Rational(32, 5)) return {Rational(-1), Rational(1)};

    RatInterval at_lo = sin_point(red.lo, d), at_hi = sin_point(red.hi, d);
    Rational lo = std::min(at_lo.lo, at_hi.lo), hi = std::max(at_lo.hi, at_hi.hi);
    // Interior extrema sit at critical points (4m+1) pi/2 (maxima) and
    // (4m-1) pi/2 (minima). When a critical-point enclosure meets the
    // reduced interval the corresponding side is released to +-1;
    // otherwise the extremum is on the boundary and the endpoint
    // enclosures already cover it.
    RatInterval half_pi = iv_div(pi_iv, iv_point(Rational(2)));
    for (int m = -2; m <= 2; ++m) {
        RatInterval mx = iv_mul(iv_point(Rational(4 * m + 1)), half_pi);
        RatInterval mn = iv_mul(iv_point(Rational(4 * m - 1)), half_pi);
        if (mx.hi >= red.lo && mx.lo <= red.hi) hi = 1;
        if (mn.hi >= red.lo && mn.lo <= red.hi) lo = -1;
    }
    return finish(RatInterval{lo, hi});
}

RatInterval sigmoid_raw(const RatInterval& x, int d) {
    RatInterval e = exp_raw(iv_neg(x), d + 4);
    RatInterval den = iv_add(iv_point(Rational(1)), e);
    RatInterval core = iv_div(iv_point(Rational(1)), den);
    return iv_clamp(iv_pad(core, pad_radius(d)), Rational(0), Rational(1));
}

} // namespace

RatInterval telescope(const std::function<RatInterval(const RatInterval&, int)>& raw,
                      const RatInterval& x, int depth) {
    int d = clamp_depth(depth);
    RatInterval acc = raw(x, 1);
    for (int k = 2; k <= d; ++k) acc = iv_meet(acc, raw(x, k));
    return acc;
}

RatInterval pi_enclosure(int depth) {
    int d = clamp_depth(depth);
    thread_local std::map<int, RatInterval> cache;
    if (auto it = cache.find(d); it != cache.end()) return it->second;
    RatInterval acc = pi_raw(1);
    for (int k = 2; k <= d; ++k) {
        if (auto it = cache.find(k); it != cache.end()) {
            acc = it->second;
            continue;
        }
        acc = iv_meet(acc, pi_raw(k));
        cache[k] = acc;
    }
    cache[d] = acc;
    return acc;
}

RatInterval ecf_exp(const RatInterval& x, int depth) {
    return telescope(exp_raw, x, clamp_depth(depth));
}

RatInterval ecf_sin(const RatInterval& x, int depth) {
    return telescope(sin_raw, x, clamp_depth(depth));
}

RatInterval ecf_sigmoid(const RatInterval& x, int depth) {
    return telescope(sigmoid_raw, x, clamp_depth(depth));
}

namespace {

// Exact image hulls for the rational-valued activations. Point inputs stay
// points, so exact and interval evaluation agree on degenerate boxes.
RatInterval hull_id(const RatInterval& x, int) { return x; }

RatInterval hull_relu(const RatInterval& x, int) {
    return {std::max(x.lo, Rational(0)), std::max(x.hi, Rational(0))};
}

RatInterval hull_abs(const RatInterval& x, int) {
    if (x.lo >= 0) return x;
    if (x.hi <= 0) return iv_neg(x);
    return {Rational(0), std::max(Rational(-x.lo), x.hi)};
}

RatInterval hull_square(const RatInterval& x, int) {
    Rational a = x.lo * x.lo, b = x.hi * x.hi;
    if (x.lo >= 0) return {a, b};
    if (x.hi <= 0) return {b, a};
    return {Rational(0), std::max(a, b)};
}

RatInterval hull_shifted_square(const RatInterval& x, int d) {
    return iv_add(hull_square(x, d), iv_point(Rational(1)));
}

} // namespace

Signature Signature::builtins() {
    Signature sig;
    sig.register_activation({"id", hull_id, [](const Rational& q) { return q; }, Rational(0)});
    sig.register_activation({"relu", hull_relu,
                             [](const Rational& q) { return std::max(q, Rational(0)); }, Rational(0)});
    sig.register_activation({"abs", hull_abs, [](const Rational& q) { return rat_abs(q); }, Rational(0)});
    sig.register_activation({"square", hull_square,
                             [](const Rational& q) { return Rational(q * q); }, Rational(0)});
    sig.register_activation({"shifted_square", hull_shifted_square,
                             [](const Rational& q) { return Rational(q * q + 1); }, Rational(1)});
    sig.register_activation({"exp", ecf_exp, nullptr, Rational(1)});
    sig.register_activation({"sin", ecf_sin, nullptr, Rational(0)});
    sig.register_activation({"sigmoid", ecf_sigmoid, nullptr, Rational(1, 2)});
    return sig;
}

void Signature::register_activation(ActivationSpec spec) {
    if (spec.name.empty()) throw Error(Errc::symbol, "activation with empty name");
    specs_[spec.name] = std::move(spec);
}

bool Signature::has(const std::string& name) const { return specs_.count(name) > 0; }

const ActivationSpec& Signature::find(const std::string& name) const {
    auto it = specs_.find(name);
    if (it == specs_.end()) throw Error(Errc::symbol, "unknown function symbol '" + name + "'");
    return it->second;
}

std::vector<std::string> Signature::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : specs_) out.push_back(k);
    return out;
}

} // namespace etrnn
