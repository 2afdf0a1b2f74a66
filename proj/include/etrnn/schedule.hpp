#pragma once

// Witness-extension schedules. Normalization introduces auxiliary
// variables; each gets one entry defining its value from earlier
// variables. Evaluating entries in order extends an assignment of the
// source variables to the full variable set of the produced system.

#include <map>
#include <vector>

#include "etrnn/eval.hpp"

namespace etrnn {

enum class SchedOp {
    term,         // value of the expression
    sqrt_exact,   // exact rational square root; partial when none exists
    sqrt_or_zero, // exact rational square root, or 0 when none exists
    inv_or_zero,  // reciprocal, or 0 at argument 0
};

struct SchedEntry {
    std::string var;
    SchedOp op = SchedOp::term;
    Term expr;
};

struct WitnessExtension {
    std::vector<SchedEntry> entries;
};

struct Extension {
    std::map<std::string, Rational> values;   // exact values
    std::map<std::string, RatInterval> boxes; // enclosures for every covered variable
    std::vector<std::string> inexact;         // enclosure only (irrational value)
    std::vector<std::string> failed;          // no value derivable
    bool complete() const { return inexact.empty() && failed.empty(); }
};

// Runs the schedule on top of the base assignment. Entries whose exact
// value does not exist fall back to a certified enclosure at the given
// depth where the operation supports it; entries depending on failed
// variables fail in turn, and independent entries still evaluate.
Extension extend_witness(const WitnessExtension& sched,
                         const std::map<std::string, Rational>& base, const Signature& sig,
                         int depth = 30);

} // namespace etrnn
