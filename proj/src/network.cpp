#include "etrnn/network.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "etrnn/log.hpp"

namespace etrnn {

std::string edge_key(const Edge& e) { return e.from + "->" + e.to; }

WeightValue weight_of(const Rational& q) { return WeightValue{q, nullptr}; }

WeightValue weight_of_term(Term t) { return WeightValue{Rational(0), std::move(t)}; }

Rational weight_exact(const WeightValue& wv, const Signature& sig) {
    if (wv.definition) return eval_term_exact(wv.definition, {}, sig);
    return wv.value;
}

RatInterval weight_interval(const WeightValue& wv, const Signature& sig, int depth) {
    if (wv.definition) return eval_term_interval(wv.definition, {}, sig, depth);
    return iv_point(wv.value);
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::instance, msg); }

const Neuron& neuron_by_id(const Architecture& arch, const std::string& id) {
    for (const Neuron& n : arch.neurons)
        if (n.id == id) return n;
    bad("unknown neuron '" + id + "'");
}

std::string activation_name(const Neuron& n) {
    return n.activation.empty() ? std::string("id") : n.activation;
}

// Neuron ids in an order where every edge source precedes its target.
// Scans in declaration order so the result is deterministic; throws on
// cycles. Inputs are checked to have no incoming edges by validation.
std::vector<std::string> topo_order(const Architecture& arch) {
    std::map<std::string, int> indeg;
    for (const Neuron& n : arch.neurons) indeg[n.id] = 0;
    for (const Edge& e : arch.edges) indeg[e.to]++;
    std::vector<std::string> order;
    std::set<std::string> placed;
    while (order.size() < arch.neurons.size()) {
        bool progressed = false;
        for (const Neuron& n : arch.neurons) {
            if (placed.count(n.id) || indeg[n.id] != 0) continue;
            order.push_back(n.id);
            placed.insert(n.id);
            for (const Edge& e : arch.edges)
                if (e.from == n.id) indeg[e.to]--;
            progressed = true;
        }
        if (!progressed) bad("architecture has a cycle");
    }
    return order;
}

} // namespace

void validate_architecture(const Architecture& arch, const Signature& sig) {
    std::set<std::string> ids;
    for (const Neuron& n : arch.neurons) {
        if (n.id.empty()) bad("neuron with empty id");
        if (!ids.insert(n.id).second) bad("duplicate neuron id '" + n.id + "'");
        if (n.role == Role::input) {
            if (!n.activation.empty())
                bad("input neuron '" + n.id + "' must not carry an activation");
        } else if (!n.activation.empty() && !sig.has(n.activation)) {
            bad("neuron '" + n.id + "' uses unknown activation '" + n.activation + "'");
        }
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const Edge& e : arch.edges) {
        if (!ids.count(e.from)) bad("edge from unknown neuron '" + e.from + "'");
        if (!ids.count(e.to)) bad("edge to unknown neuron '" + e.to + "'");
        if (e.from == e.to) bad("self loop on neuron '" + e.from + "'");
        if (!seen.insert({e.from, e.to}).second)
            bad("duplicate edge " + edge_key(e));
        if (neuron_by_id(arch, e.to).role == Role::input)
            bad("edge into input neuron '" + e.to + "'");
        if (neuron_by_id(arch, e.from).role == Role::output)
            bad("edge out of output neuron '" + e.from + "'");
    }
    topo_order(arch);
}

std::vector<std::string> output_order(const Architecture& arch) {
    std::vector<std::string> out;
    for (const Neuron& n : arch.neurons)
        if (n.role == Role::output) out.push_back(n.id);
    return out;
}

Term squared_error_cost(int outputs) {
    Term sum = mk_const(Rational(0));
    for (int k = 0; k < outputs; ++k) {
        Term diff = mk_sub(mk_var("out_" + std::to_string(k)),
                           mk_var("target_" + std::to_string(k)));
        sum = mk_add(sum, mk_mul(diff, diff));
    }
    return sum;
}

void validate_instance(const TrainingInstance& inst, const Signature& sig) {
    validate_architecture(inst.arch, sig);
    std::set<std::string> edge_keys;
    for (const Edge& e : inst.arch.edges) edge_keys.insert(edge_key(e));
    for (const std::string& k : inst.active_edges)
        if (!edge_keys.count(k)) bad("active edge '" + k + "' is not in the architecture");
    for (const std::string& id : inst.active_neurons) {
        bool found = false;
        for (const Neuron& n : inst.arch.neurons)
            if (n.id == id) {
                if (n.role == Role::input) bad("active neuron '" + id + "' is an input");
                found = true;
            }
        if (!found) bad("active neuron '" + id + "' is not in the architecture");
    }
    std::set<std::string> io;
    for (const Neuron& n : inst.arch.neurons)
        if (n.role != Role::hidden) io.insert(n.id);
    for (size_t i = 0; i < inst.data.size(); ++i) {
        std::set<std::string> got;
        for (const auto& [id, v] : inst.data[i].values) got.insert(id);
        if (got != io)
            bad("data point " + std::to_string(i) +
                " must assign exactly the input and output neurons");
    }
    std::set<std::string> slots;
    size_t m = output_order(inst.arch).size();
    for (size_t k = 0; k < m; ++k) {
        slots.insert("out_" + std::to_string(k));
        slots.insert("target_" + std::to_string(k));
    }
    for (const std::string& v : free_variables(inst.cost))
        if (!slots.count(v)) bad("cost references unknown slot '" + v + "'");
}

std::map<std::string, Rational> neural_eval_exact(const Architecture& arch,
                                                  const WeightAssignment& wb, const DataPoint& d,
                                                  const Signature& sig) {
    validate_architecture(arch, sig);
    std::map<std::string, Rational> g;
    for (const std::string& id : topo_order(arch)) {
        const Neuron& n = neuron_by_id(arch, id);
        if (n.role == Role::input) {
            auto it = d.values.find(id);
            if (it == d.values.end()) bad("data point misses input '" + id + "'");
            g[id] = it->second;
            continue;
        }
        auto bit = wb.b.find(id);
        if (bit == wb.b.end()) bad("missing bias for neuron '" + id + "'");
        Rational sum = weight_exact(bit->second, sig);
        for (const Edge& e : arch.edges) {
            if (e.to != id) continue;
            auto wit = wb.w.find(edge_key(e));
            if (wit == wb.w.end()) bad("missing weight for edge " + edge_key(e));
            sum += weight_exact(wit->second, sig) * g.at(e.from);
        }
        const ActivationSpec& spec = sig.find(activation_name(n));
        if (spec.exact_eval) {
            g[id] = spec.exact_eval(sum);
        } else if (sum == 0 && spec.value_at_zero) {
            g[id] = *spec.value_at_zero;
        } else {
            throw Error(Errc::eval, "activation '" + spec.name + "' at neuron '" + id +
                                        "' has no exact value at " + rat_to_string(sum));
        }
    }
    return g;
}

std::map<std::string, RatInterval> neural_eval_interval(const Architecture& arch,
                                                        const WeightAssignment& wb,
                                                        const DataPoint& d, const Signature& sig,
                                                        int depth) {
    validate_architecture(arch, sig);
    std::map<std::string, RatInterval> g;
    for (const std::string& id : topo_order(arch)) {
        const Neuron& n = neuron_by_id(arch, id);
        if (n.role == Role::input) {
            auto it = d.values.find(id);
            if (it == d.values.end()) bad("data point misses input '" + id + "'");
            g[id] = iv_point(it->second);
            continue;
        }
        auto bit = wb.b.find(id);
        if (bit == wb.b.end()) bad("missing bias for neuron '" + id + "'");
        RatInterval sum = weight_interval(bit->second, sig, depth);
        for (const Edge& e : arch.edges) {
            if (e.to != id) continue;
            auto wit = wb.w.find(edge_key(e));
            if (wit == wb.w.end()) bad("missing weight for edge " + edge_key(e));
            sum = iv_add(sum, iv_mul(weight_interval(wit->second, sig, depth), g.at(e.from)));
        }
        g[id] = sig.find(activation_name(n)).interval_eval(sum, depth);
    }
    return g;
}

Rational total_error_exact(const TrainingInstance& inst, const WeightAssignment& wb,
                           const Signature& sig) {
    validate_instance(inst, sig);
    std::vector<std::string> outs = output_order(inst.arch);
    Rational total = 0;
    for (const DataPoint& d : inst.data) {
        std::map<std::string, Rational> g = neural_eval_exact(inst.arch, wb, d, sig);
        ExactEnv env;
        for (size_t k = 0; k < outs.size(); ++k) {
            env["out_" + std::to_string(k)] = g.at(outs[k]);
            env["target_" + std::to_string(k)] = d.values.at(outs[k]);
        }
        total += eval_term_exact(inst.cost, env, sig);
    }
    return total;
}

RatInterval total_error_interval(const TrainingInstance& inst, const WeightAssignment& wb,
                                 const Signature& sig, int depth) {
    validate_instance(inst, sig);
    std::vector<std::string> outs = output_order(inst.arch);
    RatInterval total = iv_point(Rational(0));
    for (const DataPoint& d : inst.data) {
        std::map<std::string, RatInterval> g = neural_eval_interval(inst.arch, wb, d, sig, depth);
        BoxEnv env;
        for (size_t k = 0; k < outs.size(); ++k) {
            env["out_" + std::to_string(k)] = g.at(outs[k]);
            env["target_" + std::to_string(k)] = iv_point(d.values.at(outs[k]));
        }
        total = iv_add(total, eval_term_interval(inst.cost, env, sig, depth));
    }
    return total;
}

namespace {

// Inactive edges carry weight exactly 1 and inactive non-input neurons
// bias exactly 0; a proposed solution breaking that is malformed rather
// than merely wrong, so this throws instead of returning a verdict.
void check_fixed_weights(const TrainingInstance& inst, const WeightAssignment& wb,
                         const Signature& sig) {
    std::set<std::string> active_e(inst.active_edges.begin(), inst.active_edges.end());
    std::set<std::string> active_v(inst.active_neurons.begin(), inst.active_neurons.end());
    for (const Edge& e : inst.arch.edges) {
        std::string key = edge_key(e);
        if (active_e.count(key)) continue;
        auto it = wb.w.find(key);
        if (it == wb.w.end()) bad("missing weight for edge " + key);
        if (weight_exact(it->second, sig) != 1)
            bad("inactive edge " + key + " must have weight 1");
    }
    for (const Neuron& n : inst.arch.neurons) {
        if (n.role == Role::input || active_v.count(n.id)) continue;
        auto it = wb.b.find(n.id);
        if (it == wb.b.end()) bad("missing bias for neuron '" + n.id + "'");
        if (weight_exact(it->second, sig) != 0)
            bad("inactive neuron '" + n.id + "' must have bias 0");
    }
}

} // namespace

Verdict verify(const TrainingInstance& inst, const WeightAssignment& wb, const Signature& sig,
               EvalMode mode, int depth) {
    validate_instance(inst, sig);
    check_fixed_weights(inst, wb, sig);
    if (mode == EvalMode::exact) {
        Rational err = total_error_exact(inst, wb, sig);
        bool holds = inst.prec == Prec::eq    ? err == inst.delta
                     : inst.prec == Prec::leq ? err <= inst.delta
                                              : err < inst.delta;
        return holds ? Verdict::certified_true : Verdict::certified_false;
    }
    RatInterval err = total_error_interval(inst, wb, sig, depth);
    log::debug("verify enclosure [" + rat_to_string(err.lo) + ", " + rat_to_string(err.hi) + "]");
    switch (inst.prec) {
    case Prec::lt:
        if (err.hi < inst.delta) return Verdict::certified_true;
        if (err.lo >= inst.delta) return Verdict::certified_false;
        return Verdict::unknown;
    case Prec::leq:
        if (err.hi <= inst.delta) return Verdict::certified_true;
        if (err.lo > inst.delta) return Verdict::certified_false;
        return Verdict::unknown;
    case Prec::eq:
        if (err.lo == err.hi && err.lo == inst.delta) return Verdict::certified_true;
        if (inst.delta < err.lo || err.hi < inst.delta) return Verdict::certified_false;
        return Verdict::unknown;
    }
    throw Error(Errc::internal, "unreachable precision");
}

} // namespace etrnn
