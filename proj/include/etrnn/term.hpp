#pragma once

// Arithmetic terms: variables, rational constants, +, *, unary minus,
// division, and unary function application. Nodes are immutable and
// shared; constructors fold constant negation and constant division so
// rendered text round-trips to an identical tree.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "etrnn/rational.hpp"

namespace etrnn {

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TVar { std::string name; };
struct TConst { Rational value; };
struct TAdd { Term lhs, rhs; };
struct TMul { Term lhs, rhs; };
struct TNeg { Term arg; };
struct TDiv { Term num, den; };
struct TApply { std::string fn; Term arg; };

struct TermNode {
    std::variant<TVar, TConst, TAdd, TMul, TNeg, TDiv, TApply> v;
};

Term mk_var(std::string name);
Term mk_const(Rational value);
Term mk_add(Term lhs, Term rhs);
Term mk_mul(Term lhs, Term rhs);
// Folds a constant argument into a negated constant.
Term mk_neg(Term arg);
// Folds constant/constant; throws Errc::domain on a zero constant divisor.
Term mk_div(Term num, Term den);
Term mk_apply(std::string fn, Term arg);

// Convenience for a - b, represented as a + (-b).
Term mk_sub(Term lhs, Term rhs);

bool term_equal(const Term& a, const Term& b);

// Variables in first-occurrence order, left to right.
std::vector<std::string> free_variables(const Term& t);

std::string render(const Term& t);

} // namespace etrnn
