#pragma once

// Flat constraint systems produced by normalization, plus the line-based
// text format for the final form.

#include "etrnn/schedule.hpp"

namespace etrnn {

// Intermediate equational forms over variables:
//   unit    x = 1
//   add     x + y = z
//   invmul  x * y = 1
//   fun     x = f(y)
struct EqConstraint {
    enum class Kind { unit, add, invmul, fun };
    Kind kind;
    std::string x, y, z;
    std::string fn;
};

struct EqSystem {
    std::vector<EqConstraint> constraints;
    std::vector<std::string> variables;        // first-use order
    std::vector<std::string> source_variables; // free and bound variables of the source formula
    WitnessExtension schedule;                 // defines every non-source variable
    std::vector<std::string> provenance;       // one source tag per constraint
};

// Final flat forms over variables:
//   unit    x = 1
//   add     x + y + z = 0
//   inv     x * y + 1 = 0
//   fun     x + f(y) = 0
struct InvFlat {
    enum class Kind { unit, add, inv, fun };
    Kind kind;
    std::string x, y, z;
    std::string fn;
};

struct ConstraintSystem {
    std::vector<InvFlat> constraints;
    std::vector<std::string> variables;
    std::vector<std::string> source_variables;
    WitnessExtension schedule;
    std::vector<std::string> provenance;
};

// Variables a constraint mentions, in field order (x, y, z / x, y / x, y).
std::vector<std::string> constraint_vars(const InvFlat& c);

// Left-hand side value of the constraint's defining equation against zero
// (for unit, x - 1). A satisfied constraint has residual 0.
Rational constraint_residual(const InvFlat& c, const ExactEnv& env, const Signature& sig);
RatInterval constraint_residual_interval(const InvFlat& c, const BoxEnv& env, const Signature& sig,
                                         int depth);

// Text format: one constraint per line, lowercase keyword then variable
// tokens, '#' starts a comment:
//   unit x
//   add x y z
//   inv x y
//   fun x f y
std::string to_text(const ConstraintSystem& s);

// Parses the text format. Variable order is first occurrence; the schedule
// and source list stay empty (they travel in the schedule sidecar).
ConstraintSystem system_from_text(std::string_view text, const Signature& sig);

} // namespace etrnn
