#pragma once

// Semi-decision of strict-inequality formulas: enumerate rational points
// fairly, certify candidates with interval enclosures, and return open
// witness boxes. Satisfiable strict formulas are eventually found given
// budget; no wrong answer is ever returned.

#include <optional>

#include "etrnn/formula.hpp"
#include "etrnn/network.hpp"
#include "etrnn/polynomial.hpp"

namespace etrnn {

struct Budget {
    BigInt max_index = 100000; // enumeration indices per variable tuple
    int max_depth = 40;        // certification depths
    std::optional<double> wall_seconds;
};

struct WitnessBox {
    std::map<std::string, RatInterval> box;
    int depth; // depth certifying every atom over the whole box
    Formula formula;
};

// Three-valued certification of a strict formula over a box binding every
// free and existential variable. Each atom a < b is decided from the
// enclosure of a - b at the given depth: negative upper bound certifies
// it true on the whole box, nonnegative lower bound certifies it false;
// evaluation errors (division through zero) leave it undecided. True and
// false results are sound for every point of the box.
Verdict certify_at_box(const Formula& f, const BoxEnv& box, const Signature& sig, int depth);

// Variable order solve enumerates: free variables first, then binders.
std::vector<std::string> solve_variables(const Formula& f);

// Dovetails (enumeration index, depth) in a triangular sweep: stage t
// visits indices below t at depths below t. A point that certifies true
// is expanded to a dyadic box by halving from radius 1 until the whole
// box certifies. Returns the first witness in sweep order, or nothing
// when the budget runs out.
std::optional<WitnessBox> solve(const Formula& f, const Signature& sig, const Budget& budget);

// Searches the max-norm box [-d, d]^n for a rational point with
// |P| < epsilon, certified by exact evaluation where possible and by
// enclosure otherwise. Variables are the polynomial's, in sorted order.
std::optional<std::map<std::string, Rational>> approx_feasible(const TauPolynomial& P,
                                                               const Rational& d,
                                                               const Rational& epsilon,
                                                               const Signature& sig,
                                                               const Budget& budget);

} // namespace etrnn
