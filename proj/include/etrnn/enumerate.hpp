#pragma once

// Fair enumeration of the rationals and of rational tuples: every value
// appears at some index, deterministically.

#include <cstdint>
#include <vector>

#include "etrnn/rational.hpp"

namespace etrnn {

// Stern's diatomic sequence; consecutive values enumerate the positive
// rationals in reduced form.
BigInt stern_diatomic(const BigInt& n);

// 0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 3/2, ...: zero first, then the
// positive rational stream interleaved with its negation.
Rational nth_rational(const BigInt& index);

// Splits an index into two by the inverse of the triangular pairing
// (x, y) -> (x + y)(x + y + 1)/2 + y; (0, 0) is index 0.
std::pair<BigInt, BigInt> unpair(const BigInt& z);

// Fair enumeration of rational tuples of the given arity, built from
// nth_rational by repeated unpairing. Arity 0 yields the empty tuple.
std::vector<Rational> nth_tuple(int arity, const BigInt& index);

} // namespace etrnn
