#include "etrnn/compile.hpp"

#include <algorithm>
#include <set>

#include "etrnn/log.hpp"
#include "etrnn/normalize.hpp"

namespace etrnn {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::instance, msg); }

std::vector<std::string> position_vars(const InvFlat& c) {
    switch (c.kind) {
    case InvFlat::Kind::unit: return {c.x};
    case InvFlat::Kind::add: return {c.x, c.y, c.z};
    case InvFlat::Kind::inv: return {c.x, c.y};
    case InvFlat::Kind::fun: return {c.x, c.y};
    }
    throw Error(Errc::internal, "unreachable constraint kind");
}

// Variables occurring in any inversion constraint, either side.
std::set<std::string> inversion_vars(const std::vector<InvFlat>& cs) {
    std::set<std::string> vs;
    for (const InvFlat& c : cs)
        if (c.kind == InvFlat::Kind::inv) {
            vs.insert(c.x);
            vs.insert(c.y);
        }
    return vs;
}

// Emits the three additions forcing copy = orig (zero = 0, neg = -orig,
// copy = orig) and appends the matching schedule entries.
void emit_copy_gadget(ConstraintSystem& out, const std::string& tag, const std::string& orig,
                      const std::string& zero, const std::string& neg, const std::string& copy) {
    out.constraints.push_back({InvFlat::Kind::add, zero, zero, zero, ""});
    out.provenance.push_back(tag);
    out.constraints.push_back({InvFlat::Kind::add, orig, neg, zero, ""});
    out.provenance.push_back(tag);
    out.constraints.push_back({InvFlat::Kind::add, copy, neg, zero, ""});
    out.provenance.push_back(tag);
    out.variables.push_back(zero);
    out.variables.push_back(neg);
    out.variables.push_back(copy);
    out.schedule.entries.push_back({zero, SchedOp::term, mk_const(Rational(0))});
    out.schedule.entries.push_back({neg, SchedOp::term, mk_neg(mk_var(orig))});
    out.schedule.entries.push_back({copy, SchedOp::term, mk_var(orig)});
}

std::string provenance_at(const ConstraintSystem& s, size_t idx) {
    return idx < s.provenance.size() ? s.provenance[idx] : std::string();
}

} // namespace

ConstraintSystem preprocess(const ConstraintSystem& s) {
    FreshGen fresh;
    // Self-inversions first: Inv(x, x) cannot be hosted because its two
    // data points drive i_x with different values.
    ConstraintSystem mid = s;
    mid.constraints.clear();
    mid.provenance.clear();
    for (size_t idx = 0; idx < s.constraints.size(); ++idx) {
        const InvFlat& c = s.constraints[idx];
        std::string tag = provenance_at(s, idx);
        if (c.kind == InvFlat::Kind::inv && c.x == c.y) {
            fresh.set_salt(int(idx));
            std::string zero = fresh.next("pz"), neg = fresh.next("pn"), copy = fresh.next("pc");
            emit_copy_gadget(mid, tag, c.x, zero, neg, copy);
            mid.constraints.push_back({InvFlat::Kind::inv, c.x, copy, "", ""});
            mid.provenance.push_back(tag);
        } else {
            mid.constraints.push_back(c);
            mid.provenance.push_back(tag);
        }
    }
    // Function arguments touching inversions get fresh copies so the
    // inversion data points never feed a leaked value into an activation.
    std::set<std::string> inv_vars = inversion_vars(mid.constraints);
    ConstraintSystem out = mid;
    out.constraints.clear();
    out.provenance.clear();
    for (size_t idx = 0; idx < mid.constraints.size(); ++idx) {
        const InvFlat& c = mid.constraints[idx];
        std::string tag = provenance_at(mid, idx);
        if (c.kind == InvFlat::Kind::fun && inv_vars.count(c.y)) {
            fresh.set_salt(int(s.constraints.size() + idx));
            std::string zero = fresh.next("pz"), neg = fresh.next("pn"), copy = fresh.next("pc");
            emit_copy_gadget(out, tag, c.y, zero, neg, copy);
            out.constraints.push_back({InvFlat::Kind::fun, c.x, copy, "", c.fn});
            out.provenance.push_back(tag);
        } else {
            out.constraints.push_back(c);
            out.provenance.push_back(tag);
        }
    }
    return out;
}

CompiledInstance compile_system(const ConstraintSystem& s, const CompileOptions& opts) {
    std::set<std::string> declared(s.variables.begin(), s.variables.end());
    std::set<std::string> inv_vars = inversion_vars(s.constraints);
    bool any_inv = false;
    for (const InvFlat& c : s.constraints) {
        if (c.kind == InvFlat::Kind::inv) {
            any_inv = true;
            if (c.x == c.y) bad("system not preprocessed: inversion of '" + c.x + "' with itself");
        }
        if (c.kind == InvFlat::Kind::fun && inv_vars.count(c.y))
            bad("system not preprocessed: function argument '" + c.y +
                "' occurs in an inversion");
        for (const std::string& v : constraint_vars(c))
            if (!declared.count(v)) bad("constraint variable '" + v + "' is not declared");
    }
    bool corrections = opts.corrections && any_inv;

    CompiledInstance ci;
    GadgetIndex& ix = ci.index;
    ix.variables = s.variables;
    TrainingInstance& inst = ci.instance;
    Architecture& arch = inst.arch;

    for (const std::string& x : s.variables) {
        ix.i[x] = "i:" + x;
        ix.j[x] = "j:" + x;
        arch.neurons.push_back({ix.i[x], Role::input, ""});
        arch.neurons.push_back({ix.j[x], Role::hidden, "id"});
    }
    for (size_t idx = 0; idx < s.constraints.size(); ++idx) {
        const InvFlat& c = s.constraints[idx];
        GadgetConstraint g;
        g.name = "C" + std::to_string(idx);
        g.kind = c.kind;
        g.fn = c.fn;
        g.pos_vars = position_vars(c);
        g.o = "o:" + g.name;
        arch.neurons.push_back({g.o, Role::output, "id"});
        for (size_t k = 1; k <= g.pos_vars.size(); ++k) {
            std::string suffix = g.name + ":" + std::to_string(k);
            bool fun_arg = c.kind == InvFlat::Kind::fun && k == 2;
            g.h.push_back("h:" + suffix);
            g.q.push_back("q:" + suffix);
            g.p.push_back("p:" + suffix);
            arch.neurons.push_back({g.h.back(), Role::hidden, fun_arg ? c.fn : "id"});
            arch.neurons.push_back({g.q.back(), Role::hidden, "id"});
            arch.neurons.push_back({g.p.back(), Role::input, ""});
        }
        if (c.kind == InvFlat::Kind::inv) {
            g.e = "e:" + g.name;
            arch.neurons.push_back({g.e, Role::input, ""});
        }
        if (corrections && c.kind == InvFlat::Kind::fun) {
            g.r = "r:" + g.name;
            g.t = "t:" + g.name;
            arch.neurons.push_back({g.r, Role::input, ""});
            arch.neurons.push_back({g.t, Role::hidden, "id"});
        }
        ix.constraints.push_back(std::move(g));
    }

    auto add_edge = [&](const std::string& from, const std::string& to, bool active) {
        arch.edges.push_back({from, to});
        if (active) inst.active_edges.push_back(edge_key(arch.edges.back()));
    };
    for (const std::string& x : s.variables) add_edge(ix.i.at(x), ix.j.at(x), true);
    for (const GadgetConstraint& g : ix.constraints) {
        for (size_t k = 1; k <= g.pos_vars.size(); ++k) {
            bool inv_arm = g.kind == InvFlat::Kind::inv && k == 2;
            add_edge(ix.j.at(g.pos_vars[k - 1]), g.h[k - 1], inv_arm);
            add_edge(g.q[k - 1], g.h[k - 1], false);
            add_edge(g.p[k - 1], g.q[k - 1], true);
            add_edge(g.h[k - 1], g.o, false);
        }
        if (g.kind == InvFlat::Kind::inv) add_edge(g.e, ix.j.at(g.pos_vars[1]), false);
        if (!g.r.empty()) {
            add_edge(g.r, g.t, true);
            add_edge(g.t, g.o, false);
        }
    }
    if (corrections) {
        // One cancellation edge per (inversion, other constraint reading
        // the inverted variable): active, weight trained to absorb the
        // value e_C pushes through j_y in the first inversion data point.
        for (const GadgetConstraint& g : ix.constraints) {
            if (g.kind != InvFlat::Kind::inv) continue;
            const std::string& y = g.pos_vars[1];
            for (const GadgetConstraint& other : ix.constraints) {
                if (other.name == g.name) continue;
                if (std::find(other.pos_vars.begin(), other.pos_vars.end(), y) ==
                    other.pos_vars.end())
                    continue;
                ix.leak_edges.push_back({g.e, other.q[0]});
                add_edge(g.e, other.q[0], true);
            }
        }
    }

    // Every bias stays fixed at zero.
    inst.active_neurons = {};

    std::map<std::string, Rational> zeros;
    for (const Neuron& n : arch.neurons)
        if (n.role != Role::hidden) zeros[n.id] = 0;

    DataPoint da;
    da.values = zeros;
    for (const std::string& x : s.variables) da.values[ix.i.at(x)] = 1;
    for (const GadgetConstraint& g : ix.constraints) {
        if (g.kind == InvFlat::Kind::inv)
            for (const std::string& p : g.p) da.values[p] = 1;
        if (g.kind == InvFlat::Kind::unit) da.values[g.o] = 1;
    }
    inst.data.push_back(da);

    for (const GadgetConstraint& g : ix.constraints) {
        if (g.kind != InvFlat::Kind::inv) continue;
        const std::string &x = g.pos_vars[0], &y = g.pos_vars[1];
        DataPoint d1, d2;
        d1.values = zeros;
        d2.values = zeros;
        d1.values[ix.i.at(x)] = 1;
        d1.values[g.e] = 1;
        d2.values[ix.i.at(y)] = 1;
        d2.values[g.o] = 1;
        for (const GadgetConstraint& other : ix.constraints) {
            if (other.name == g.name) continue;
            for (size_t k = 0; k < other.pos_vars.size(); ++k) {
                if (other.pos_vars[k] == x) d1.values[other.p[k]] = 1;
                if (other.pos_vars[k] == y) d2.values[other.p[k]] = 1;
            }
            if (!other.r.empty()) {
                d1.values[other.r] = 1;
                d2.values[other.r] = 1;
            }
        }
        inst.data.push_back(d1);
        inst.data.push_back(d2);
    }

    inst.cost = squared_error_cost(int(ix.constraints.size()));
    inst.prec = Prec::eq;
    inst.delta = 0;
    log::info("compiled " + std::to_string(s.constraints.size()) + " constraints into " +
              std::to_string(arch.neurons.size()) + " neurons, " +
              std::to_string(arch.edges.size()) + " edges, " + std::to_string(inst.data.size()) +
              " data points");
    return ci;
}

namespace {

// Weight the forward construction puts on the edge from j of a variable
// into position k of the given gadget.
Rational j_edge_weight(const GadgetConstraint& g, size_t k,
                       const std::map<std::string, Rational>& s) {
    if (g.kind == InvFlat::Kind::inv && k == 2) return -s.at(g.pos_vars[0]);
    return 1;
}

} // namespace

WeightAssignment witness_forward(const CompiledInstance& ci,
                                 const std::map<std::string, Rational>& s) {
    const GadgetIndex& ix = ci.index;
    for (const std::string& x : ix.variables)
        if (!s.count(x)) bad("assignment misses variable '" + x + "'");
    for (const auto& [x, v] : s)
        if (ix.i.find(x) == ix.i.end()) bad("assignment names unknown variable '" + x + "'");

    WeightAssignment wb;
    for (const Neuron& n : ci.instance.arch.neurons)
        if (n.role != Role::input) wb.b[n.id] = weight_of(Rational(0));
    for (const Edge& e : ci.instance.arch.edges) wb.w[edge_key(e)] = weight_of(Rational(1));

    for (const std::string& x : ix.variables)
        wb.w[ix.i.at(x) + "->" + ix.j.at(x)] = weight_of(s.at(x));
    for (const GadgetConstraint& g : ix.constraints) {
        for (size_t k = 1; k <= g.pos_vars.size(); ++k) {
            const std::string& u = g.pos_vars[k - 1];
            if (g.kind == InvFlat::Kind::inv && k == 2) {
                wb.w[ix.j.at(u) + "->" + g.h[k - 1]] = weight_of(j_edge_weight(g, k, s));
                wb.w[g.p[k - 1] + "->" + g.q[k - 1]] =
                    weight_of(s.at(g.pos_vars[0]) * s.at(g.pos_vars[1]));
            } else {
                wb.w[g.p[k - 1] + "->" + g.q[k - 1]] = weight_of(Rational(-s.at(u)));
            }
        }
        if (!g.r.empty())
            wb.w[g.r + "->" + g.t] =
                weight_of_term(mk_neg(mk_apply(g.fn, mk_const(Rational(0)))));
    }
    for (const Edge& leak : ix.leak_edges) {
        const GadgetConstraint* inv = nullptr;
        const GadgetConstraint* reader = nullptr;
        for (const GadgetConstraint& g : ix.constraints) {
            if (!g.e.empty() && g.e == leak.from) inv = &g;
            if (!g.q.empty() && g.q[0] == leak.to) reader = &g;
        }
        if (!inv || !reader) throw Error(Errc::internal, "dangling leak edge " + edge_key(leak));
        const std::string& y = inv->pos_vars[1];
        Rational total = 0;
        for (size_t k = 1; k <= reader->pos_vars.size(); ++k)
            if (reader->pos_vars[k - 1] == y) total += j_edge_weight(*reader, k, s);
        wb.w[edge_key(leak)] = weight_of(Rational(-total));
    }
    return wb;
}

std::map<std::string, Rational> witness_backward(const CompiledInstance& ci,
                                                 const WeightAssignment& wb,
                                                 const Signature& sig) {
    std::map<std::string, Rational> s;
    for (const std::string& x : ci.index.variables) {
        std::string key = ci.index.i.at(x) + "->" + ci.index.j.at(x);
        auto it = wb.w.find(key);
        if (it == wb.w.end()) bad("missing weight for edge " + key);
        s[x] = weight_exact(it->second, sig);
    }
    return s;
}

} // namespace etrnn
