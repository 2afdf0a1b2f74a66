#pragma once

// Activation functions with certified rational enclosures. Every activation
// provides an interval evaluator indexed by a depth parameter d; the result
// always contains the exact image of the input interval, results at deeper
// d are subsets of shallower ones on the same input, and on point inputs in
// [-8, 8] the width at depth d is at most 2^(1-d). Activations that happen
// to be rational-valued also provide exact point evaluation.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etrnn/interval.hpp"

namespace etrnn {

struct ActivationSpec {
    std::string name;
    // Certified enclosure of the image of the input interval at given depth.
    std::function<RatInterval(const RatInterval&, int)> interval_eval;
    // Exact point evaluation; empty when values are irrational in general.
    std::function<Rational(const Rational&)> exact_eval;
    // Exact value at input 0 when known, used for symbolic weight terms.
    std::optional<Rational> value_at_zero;
};

class Signature {
public:
    // Registry preloaded with the builtin activations:
    // id, relu, abs, square, shifted_square (exact) and exp, sin, sigmoid
    // (interval only).
    static Signature builtins();

    void register_activation(ActivationSpec spec);
    bool has(const std::string& name) const;
    // Throws Errc::symbol when the name is not registered.
    const ActivationSpec& find(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, ActivationSpec> specs_;
};

// Enclosure of pi with width at most 2^(1-d), nested in d.
RatInterval pi_enclosure(int depth);

// Builtin enclosure evaluators, usable directly.
RatInterval ecf_exp(const RatInterval& x, int depth);
RatInterval ecf_sin(const RatInterval& x, int depth);
RatInterval ecf_sigmoid(const RatInterval& x, int depth);

// Intersects raw(x, 1), ..., raw(x, depth). Sound whenever every raw result
// encloses the same connected true range; the intersection then encloses it
// too and is nested in depth by construction.
RatInterval telescope(const std::function<RatInterval(const RatInterval&, int)>& raw,
                      const RatInterval& x, int depth);

} // namespace etrnn
