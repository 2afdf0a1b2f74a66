#include "etrnn/enumerate.hpp"

namespace etrnn {

BigInt stern_diatomic(const BigInt& n) {
    // Bit-scan form: after consuming the low bits of n, the value is
    // a * s(m) + b * s(m + 1) for the remaining high part m.
    BigInt a = 1, b = 0, m = n;
    while (m > 0) {
        if (boost::multiprecision::bit_test(m, 0)) b += a;
        else a += b;
        m >>= 1;
    }
    return b;
}

Rational nth_rational(const BigInt& index) {
    if (index == 0) return 0;
    BigInt k = (index + 1) / 2;
    Rational q(stern_diatomic(k), stern_diatomic(k + 1));
    return boost::multiprecision::bit_test(index, 0) ? q : Rational(-q);
}

std::pair<BigInt, BigInt> unpair(const BigInt& z) {
    BigInt w = (boost::multiprecision::sqrt(BigInt(8 * z + 1)) - 1) / 2;
    BigInt y = z - w * (w + 1) / 2;
    return {w - y, y};
}

std::vector<Rational> nth_tuple(int arity, const BigInt& index) {
    if (arity <= 0) return {};
    if (arity == 1) return {nth_rational(index)};
    auto [rest, last] = unpair(index);
    std::vector<Rational> tuple = nth_tuple(arity - 1, rest);
    tuple.push_back(nth_rational(last));
    return tuple;
}

} // namespace etrnn
