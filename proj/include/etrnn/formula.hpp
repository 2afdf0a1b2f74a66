#pragma once

// Formulas of existential arithmetic: comparisons over terms, conjunction,
// disjunction, negation (programmatic only, no concrete syntax), and
// existential quantification.

#include "etrnn/term.hpp"

namespace etrnn {

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FLt { Term lhs, rhs; };
struct FEq { Term lhs, rhs; };
struct FAnd { Formula lhs, rhs; };
struct FOr { Formula lhs, rhs; };
struct FNot { Formula arg; };
struct FExists { std::string var; Formula body; };

struct FormulaNode {
    std::variant<FLt, FEq, FAnd, FOr, FNot, FExists> v;
};

Formula mk_lt(Term lhs, Term rhs);
Formula mk_eq(Term lhs, Term rhs);
Formula mk_and(Formula lhs, Formula rhs);
Formula mk_or(Formula lhs, Formula rhs);
Formula mk_not(Formula arg);
Formula mk_exists(std::string var, Formula body);

bool formula_equal(const Formula& a, const Formula& b);

// Free variables in first-occurrence order; existentially bound names are
// excluded within their scope.
std::vector<std::string> free_variables(const Formula& f);

// Bound variable names in binder order, duplicates kept once.
std::vector<std::string> bound_variables(const Formula& f);

// Pushes negation down to atoms and eliminates it:
//   not (a < b)  becomes  b < a | a = b
//   not (a = b)  becomes  a < b | b < a
// De Morgan over & and |, double negation cancels. A negated existential
// quantifier has no equivalent here and raises Errc::unsupported.
Formula desugar_negation(const Formula& f);

// True when the formula uses only <, &, |, and exists (no =, no negation).
bool is_strict_fragment(const Formula& f);

std::string render(const Formula& f);

} // namespace etrnn
