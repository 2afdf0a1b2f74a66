#pragma once

// Multivariate polynomials with rational coefficients whose indeterminates
// are plain variables or unary function applications f(x). A formula in
// the flat shape (function arguments are variables, no minus/div, no
// negation) turns into one such polynomial of total degree at most 4 that
// has a root exactly where the formula holds, together with a schedule
// that extends a satisfying assignment to a root.

#include <map>

#include "etrnn/normalize.hpp"

namespace etrnn {

struct PolyAtom {
    std::string fn; // empty for a plain variable
    std::string var;
    auto operator<=>(const PolyAtom&) const = default;
};

// Indeterminate -> exponent (>= 1); empty map is the constant monomial.
using Monomial = std::map<PolyAtom, int>;

struct TauPolynomial {
    std::map<Monomial, Rational> terms; // monomial -> nonzero coefficient
};

TauPolynomial poly_const(const Rational& c);
TauPolynomial poly_var(const std::string& v);
TauPolynomial poly_apply(const std::string& fn, const std::string& var);
TauPolynomial poly_add(const TauPolynomial& a, const TauPolynomial& b);
TauPolynomial poly_sub(const TauPolynomial& a, const TauPolynomial& b);
TauPolynomial poly_mul(const TauPolynomial& a, const TauPolynomial& b);
TauPolynomial poly_neg(const TauPolynomial& a);
bool poly_equal(const TauPolynomial& a, const TauPolynomial& b);
bool poly_is_zero(const TauPolynomial& a);

// Total degree; every indeterminate (variable or application) counts by
// its exponent. The zero polynomial has degree 0.
int poly_degree(const TauPolynomial& p);

std::string render(const TauPolynomial& p);

Rational eval_poly_exact(const TauPolynomial& p, const ExactEnv& env, const Signature& sig);
RatInterval eval_poly_interval(const TauPolynomial& p, const BoxEnv& env, const Signature& sig,
                               int depth);

struct Feas4 {
    TauPolynomial poly;
    std::vector<std::string> variables; // source plus introduced, first occurrence
    std::vector<std::string> source_variables;
    WitnessExtension schedule;
};

// Builds the root-finding instance for a formula already in flat shape:
// per-atom residuals of degree at most 2 are squared and summed, products
// whose degree would pass 2 are re-flattened through fresh variables, and
// disjunction multiplies captured branch residuals. Throws
// Errc::unsupported when the input is not flat.
Feas4 build_4feas(const Formula& f, const Signature& sig);

// Convenience pipeline: desugar, flatten, eliminate, then build, with the
// schedules concatenated and source variables taken from the input.
Feas4 build_4feas_pipeline(const Formula& f, const Signature& sig);

} // namespace etrnn
