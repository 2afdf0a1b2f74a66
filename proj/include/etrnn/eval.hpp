#pragma once

// Term evaluation, exact over rationals and certified over interval boxes.

#include <map>

#include "etrnn/activation.hpp"
#include "etrnn/term.hpp"

namespace etrnn {

using ExactEnv = std::map<std::string, Rational>;
using BoxEnv = std::map<std::string, RatInterval>;

// Exact evaluation. Throws Errc::symbol for an unbound variable,
// Errc::domain for division by zero, and Errc::eval when an activation
// without exact evaluation is applied anywhere but at 0 (where the
// registered value_at_zero is used).
Rational eval_term_exact(const Term& t, const ExactEnv& env, const Signature& sig);

// Certified enclosure of the term's image over the box, telescoped over
// depths 1..depth so results are nested in depth. Raw passes that fail on
// interval division through zero are skipped; if every pass fails the last
// error is rethrown.
RatInterval eval_term_interval(const Term& t, const BoxEnv& env, const Signature& sig, int depth);

} // namespace etrnn
