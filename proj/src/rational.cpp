#include "etrnn/rational.hpp"

#include <cctype>

namespace etrnn {

Rational pow2(long k) {
    BigInt one = 1;
    if (k >= 0) return Rational(one << k);
    return Rational(one, one << (-k));
}

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

int rat_sign(const Rational& q) { return q < 0 ? -1 : (q > 0 ? 1 : 0); }

std::string rat_to_string(const Rational& q) {
    BigInt n = rat_num(q), d = rat_den(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rational rat_from_string(std::string_view s) {
    std::string_view whole = s;
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = (s[0] == '-');
        s.remove_prefix(1);
    }
    if (s.empty()) throw Error(Errc::parse, "empty rational literal");

    auto fail = [&] { return Error(Errc::parse, "malformed rational literal '" + std::string(whole) + "'"); };

    Rational value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view p = s.substr(0, slash), q = s.substr(slash + 1);
        if (!all_digits(p) || !all_digits(q)) throw fail();
        BigInt num{std::string(p)}, den{std::string(q)};
        if (den == 0) throw Error(Errc::domain, "zero denominator in '" + std::string(whole) + "'");
        value = Rational(num, den);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (!all_digits(ip) || !all_digits(fp)) throw fail();
        BigInt scale = 1;
        for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
        BigInt num = BigInt(std::string(ip)) * scale + BigInt(std::string(fp));
        value = Rational(num, scale);
    } else {
        if (!all_digits(s)) throw fail();
        value = Rational(BigInt(std::string(s)));
    }
    return neg ? Rational(-value) : value;
}

std::optional<Rational> rat_sqrt_exact(const Rational& q) {
    if (q < 0) return std::nullopt;
    if (q == 0) return Rational(0);
    BigInt n = rat_num(q), d = rat_den(q);
    BigInt rn = boost::multiprecision::sqrt(n);
    BigInt rd = boost::multiprecision::sqrt(d);
    if (rn * rn != n || rd * rd != d) return std::nullopt;
    return Rational(rn, rd);
}

BigInt rat_floor(const Rational& q) {
    BigInt n = rat_num(q), d = rat_den(q);
    BigInt quo = n / d, rem = n % d;
    if (rem != 0 && n < 0) quo -= 1;
    return quo;
}

BigInt rat_round(const Rational& q) { return rat_floor(q + Rational(1, 2)); }

} // namespace etrnn
