#pragma once

// Compiles flat constraint systems into neural-network training instances
// whose exact solutions correspond to solutions of the system, with
// witness maps in both directions.

#include "etrnn/constraint.hpp"
#include "etrnn/network.hpp"

namespace etrnn {

struct CompileOptions {
    // Emits the gadgets that cancel constant offsets other gadgets inject
    // into output sums under the inversion data points: the r/t path
    // absorbing f(0) of function constraints and the e-to-q edges
    // absorbing values leaking through shared variables. Disabling them
    // reproduces the uncorrected construction.
    bool corrections = true;
};

// Neuron ids making up one constraint's gadget. Positions are 1-based;
// pos_vars[k-1] is the variable read at position k.
struct GadgetConstraint {
    std::string name; // "C0", "C1", ...
    InvFlat::Kind kind;
    std::string fn; // function constraints only
    std::vector<std::string> pos_vars;
    std::string o;
    std::vector<std::string> h, q, p; // one id per position
    std::string e;                    // inversions only
    std::string r, t;                 // function constraints when corrections are on
};

struct GadgetIndex {
    std::vector<std::string> variables;      // system variable order
    std::map<std::string, std::string> i, j; // variable -> input / hidden neuron id
    std::vector<GadgetConstraint> constraints;
    // Correction edges (e neuron of an inversion, q neuron at position 1
    // of another constraint reading the inverted variable).
    std::vector<Edge> leak_edges;
};

struct CompiledInstance {
    TrainingInstance instance;
    GadgetIndex index;
};

// Rewrites the two shapes the gadget construction cannot host directly,
// preserving satisfiability and extending the schedule:
//   (a) Inv(x, x) becomes Inv(x, y) with fresh y tied to x by additions;
//   (b) a Fun argument that occurs in any Inv constraint is replaced by a
//       fresh copy tied the same way, so inversion data points never
//       drive a non-identity activation with a leaked value.
ConstraintSystem preprocess(const ConstraintSystem& s);

// Builds the training instance: two neurons per variable, one gadget per
// constraint, one extra input per inversion, data points d_a plus two per
// inversion, squared-error cost, equality against threshold 0.
// Requires a preprocessed system (Errc::instance otherwise).
CompiledInstance compile_system(const ConstraintSystem& s, const CompileOptions& opts = {});

// Weights realizing the assignment: the edge (i_x, j_x) carries s(x), the
// active inversion edges carry -s(x) and s(x)*s(y), remaining p-edges
// carry -s(x_k), correction edges carry -f(0) (symbolically) and the
// leak-cancelling sums; every inactive edge 1, every bias 0.
// The assignment must cover every system variable exactly.
WeightAssignment witness_forward(const CompiledInstance& ci,
                                 const std::map<std::string, Rational>& s);

// Reads the assignment back: s(x) = w(i_x, j_x).
std::map<std::string, Rational> witness_backward(const CompiledInstance& ci,
                                                 const WeightAssignment& wb,
                                                 const Signature& sig);

} // namespace etrnn
