#pragma once

// Neural architectures over unary activations, exact and certified
// interval evaluation of the induced neural function, training instances
// (data points, cost over output slots, comparison against a threshold),
// and sound verification of proposed weight assignments.

#include <map>

#include "etrnn/eval.hpp"

namespace etrnn {

enum class Role { input, hidden, output };

struct Neuron {
    std::string id;
    Role role = Role::hidden;
    std::string activation; // empty on inputs, a Signature name otherwise
};

struct Edge {
    std::string from, to;
};

// Edges are addressed by this key in weight maps and active-edge lists.
std::string edge_key(const Edge& e);

struct Architecture {
    std::vector<Neuron> neurons;
    std::vector<Edge> edges;
};

// Checks the shape: known activations on every non-input neuron, neuron
// ids unique, edge endpoints present and unique as pairs, inputs without
// incoming edges, outputs without outgoing edges, and no cycles. Throws
// Errc::instance with the first violation.
void validate_architecture(const Architecture& arch, const Signature& sig);

// One value per input neuron and per output neuron, nothing else.
struct DataPoint {
    std::map<std::string, Rational> values;
};

// A weight or bias: plain rational, or a closed defining term for values
// that are real but not rational (the term is evaluated exactly when
// possible and by enclosure otherwise).
struct WeightValue {
    Rational value;
    Term definition; // null for plain rationals
};

WeightValue weight_of(const Rational& q);
WeightValue weight_of_term(Term t);

Rational weight_exact(const WeightValue& wv, const Signature& sig);
RatInterval weight_interval(const WeightValue& wv, const Signature& sig, int depth);

struct WeightAssignment {
    std::map<std::string, WeightValue> w; // edge key -> weight
    std::map<std::string, WeightValue> b; // non-input neuron id -> bias
};

enum class Prec { eq, leq, lt };

struct TrainingInstance {
    Architecture arch;
    std::vector<std::string> active_edges;   // edge keys; others are fixed to weight 1
    std::vector<std::string> active_neurons; // neuron ids; others are fixed to bias 0
    std::vector<DataPoint> data;
    Term cost;    // over slots out_k / target_k, k indexing output neurons in order
    Prec prec = Prec::eq;
    Rational delta;
};

// Output neuron ids in declaration order; defines the slot indexing.
std::vector<std::string> output_order(const Architecture& arch);

// The default faithful cost: sum of (out_k - target_k)^2 over all outputs.
Term squared_error_cost(int outputs);

// Validates architecture, active sets, data-point domains, and that the
// cost references only the 2m slots. Throws Errc::instance.
void validate_instance(const TrainingInstance& inst, const Signature& sig);

// Neural function at one data point: inputs copy the data, every other
// neuron applies its activation to bias + weighted predecessor sum.
std::map<std::string, Rational> neural_eval_exact(const Architecture& arch,
                                                  const WeightAssignment& wb, const DataPoint& d,
                                                  const Signature& sig);
std::map<std::string, RatInterval> neural_eval_interval(const Architecture& arch,
                                                        const WeightAssignment& wb,
                                                        const DataPoint& d, const Signature& sig,
                                                        int depth);

// Sum over data points of the cost at (computed outputs, targets).
Rational total_error_exact(const TrainingInstance& inst, const WeightAssignment& wb,
                           const Signature& sig);
RatInterval total_error_interval(const TrainingInstance& inst, const WeightAssignment& wb,
                                 const Signature& sig, int depth);

enum class Verdict { certified_true, certified_false, unknown };

enum class EvalMode { exact, interval };

// Checks the fixed-weight conditions first (inactive edge weights must be
// exactly 1, inactive biases exactly 0; violations are malformed
// solutions, Errc::instance), then decides total_error prec delta.
// Exact mode decides fully. Interval mode certifies from the enclosure
// [lo, hi] only when sound:
//   lt:  true if hi < delta,  false if lo >= delta
//   leq: true if hi <= delta, false if lo > delta
//   eq:  true if lo = hi = delta, false if delta outside [lo, hi]
// and returns unknown otherwise.
Verdict verify(const TrainingInstance& inst, const WeightAssignment& wb, const Signature& sig,
               EvalMode mode, int depth = 30);

} // namespace etrnn
