#include "etrnn/json_io.hpp"

#include <cstdint>
#include <set>

#include "etrnn/error.hpp"

namespace etrnn {

namespace {

[[noreturn]] void bad_doc(const std::string& what) { throw Error(Errc::io, what); }

// Wraps the strongly typed nlohmann accessors so schema violations become
// document errors instead of leaking library exception types.
template <typename F>
auto doc_scope(const char* doc, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw Error(Errc::io, std::string(doc) + ": " + e.what());
    }
}

std::string role_name(Role r) {
    switch (r) {
        case Role::input: return "input";
        case Role::hidden: return "hidden";
        case Role::output: return "output";
    }
    throw Error(Errc::internal, "bad role");
}

Role role_of(const std::string& s) {
    if (s == "input") return Role::input;
    if (s == "hidden") return Role::hidden;
    if (s == "output") return Role::output;
    bad_doc("unknown neuron role \"" + s + "\"");
}

std::string prec_name(Prec p) {
    switch (p) {
        case Prec::eq: return "eq";
        case Prec::leq: return "leq";
        case Prec::lt: return "lt";
    }
    throw Error(Errc::internal, "bad prec");
}

Prec prec_of(const std::string& s) {
    if (s == "eq") return Prec::eq;
    if (s == "leq") return Prec::leq;
    if (s == "lt") return Prec::lt;
    bad_doc("unknown prec \"" + s + "\"");
}

std::string kind_name(InvFlat::Kind k) {
    switch (k) {
        case InvFlat::Kind::unit: return "unit";
        case InvFlat::Kind::add: return "add";
        case InvFlat::Kind::inv: return "inv";
        case InvFlat::Kind::fun: return "fun";
    }
    throw Error(Errc::internal, "bad kind");
}

InvFlat::Kind kind_of(const std::string& s) {
    if (s == "unit") return InvFlat::Kind::unit;
    if (s == "add") return InvFlat::Kind::add;
    if (s == "inv") return InvFlat::Kind::inv;
    if (s == "fun") return InvFlat::Kind::fun;
    bad_doc("unknown constraint kind \"" + s + "\"");
}

std::string op_name(SchedOp op) {
    switch (op) {
        case SchedOp::term: return "term";
        case SchedOp::sqrt_exact: return "sqrt_exact";
        case SchedOp::sqrt_or_zero: return "sqrt_or_zero";
        case SchedOp::inv_or_zero: return "inv_or_zero";
    }
    throw Error(Errc::internal, "bad schedule op");
}

SchedOp op_of(const std::string& s) {
    if (s == "term") return SchedOp::term;
    if (s == "sqrt_exact") return SchedOp::sqrt_exact;
    if (s == "sqrt_or_zero") return SchedOp::sqrt_or_zero;
    if (s == "inv_or_zero") return SchedOp::inv_or_zero;
    bad_doc("unknown schedule op \"" + s + "\"");
}

Json rat_json(const Rational& q) { return rat_to_string(q); }

Rational rat_of(const Json& j) {
    if (!j.is_string()) bad_doc("expected a rational string");
    return rat_from_string(j.get<std::string>());
}

Json strings_json(const std::vector<std::string>& v) { return Json(v); }

std::vector<std::string> strings_of(const Json& j) {
    return j.get<std::vector<std::string>>();
}

} // namespace

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 15];
    return out;
}

Json term_to_json(const Term& t) {
    if (!t) throw Error(Errc::internal, "null term");
    return std::visit(
        [](const auto& n) -> Json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar>) return Json{{"var", n.name}};
            else if constexpr (std::is_same_v<T, TConst>) return Json{{"const", rat_json(n.value)}};
            else if constexpr (std::is_same_v<T, TAdd>)
                return Json{{"add", Json::array({term_to_json(n.lhs), term_to_json(n.rhs)})}};
            else if constexpr (std::is_same_v<T, TMul>)
                return Json{{"mul", Json::array({term_to_json(n.lhs), term_to_json(n.rhs)})}};
            else if constexpr (std::is_same_v<T, TNeg>)
                return Json{{"neg", term_to_json(n.arg)}};
            else if constexpr (std::is_same_v<T, TDiv>)
                return Json{{"div", Json::array({term_to_json(n.num), term_to_json(n.den)})}};
            else
                return Json{{"apply", Json::array({Json(n.fn), term_to_json(n.arg)})}};
        },
        t->v);
}

Term term_from_json(const Json& j) {
    return doc_scope("term", [&]() -> Term {
        if (!j.is_object() || j.size() != 1) bad_doc("term node must be a single-key object");
        const std::string& key = j.begin().key();
        const Json& val = j.begin().value();
        if (key == "var") return mk_var(val.get<std::string>());
        if (key == "const") return mk_const(rat_of(val));
        if (key == "add") return mk_add(term_from_json(val.at(0)), term_from_json(val.at(1)));
        if (key == "mul") return mk_mul(term_from_json(val.at(0)), term_from_json(val.at(1)));
        if (key == "neg") return mk_neg(term_from_json(val));
        if (key == "div") return mk_div(term_from_json(val.at(0)), term_from_json(val.at(1)));
        if (key == "apply")
            return mk_apply(val.at(0).get<std::string>(), term_from_json(val.at(1)));
        bad_doc("unknown term node \"" + key + "\"");
    });
}

Json schedule_to_json(const WitnessExtension& sched) {
    Json arr = Json::array();
    for (const SchedEntry& e : sched.entries)
        arr.push_back(Json{{"expr", term_to_json(e.expr)},
                           {"op", op_name(e.op)},
                           {"var", e.var}});
    return arr;
}

WitnessExtension schedule_from_json(const Json& j) {
    return doc_scope("schedule", [&] {
        WitnessExtension sched;
        for (const Json& e : j)
            sched.entries.push_back(SchedEntry{e.at("var").get<std::string>(),
                                               op_of(e.at("op").get<std::string>()),
                                               term_from_json(e.at("expr"))});
        return sched;
    });
}

Json instance_to_json(const TrainingInstance& inst, const Json& meta) {
    Json neurons = Json::array();
    std::set<std::string> active_n(inst.active_neurons.begin(), inst.active_neurons.end());
    std::map<std::string, Role> roles;
    for (const Neuron& n : inst.arch.neurons) {
        roles[n.id] = n.role;
        Json jn{{"active", active_n.count(n.id) > 0},
                {"id", n.id},
                {"role", role_name(n.role)}};
        if (!n.activation.empty()) jn["activation"] = n.activation;
        neurons.push_back(std::move(jn));
    }
    Json edges = Json::array();
    std::set<std::string> active_e(inst.active_edges.begin(), inst.active_edges.end());
    for (const Edge& e : inst.arch.edges)
        edges.push_back(Json{{"active", active_e.count(edge_key(e)) > 0},
                             {"from", e.from},
                             {"to", e.to}});
    Json data = Json::array();
    for (const DataPoint& d : inst.data) {
        Json in = Json::object(), out = Json::object();
        for (const auto& [id, v] : d.values)
            (roles.at(id) == Role::input ? in : out)[id] = rat_json(v);
        data.push_back(Json{{"inputs", std::move(in)}, {"outputs", std::move(out)}});
    }
    return Json{{"cost", term_to_json(inst.cost)},
                {"data_points", std::move(data)},
                {"delta", rat_json(inst.delta)},
                {"edges", std::move(edges)},
                {"meta", meta},
                {"neurons", std::move(neurons)},
                {"prec", prec_name(inst.prec)}};
}

InstanceDocument instance_from_json(const Json& j, const Signature& sig) {
    InstanceDocument doc = doc_scope("instance", [&] {
        InstanceDocument d;
        TrainingInstance& inst = d.instance;
        for (const Json& jn : j.at("neurons")) {
            Neuron n;
            n.id = jn.at("id").get<std::string>();
            n.role = role_of(jn.at("role").get<std::string>());
            if (jn.contains("activation")) n.activation = jn.at("activation").get<std::string>();
            inst.arch.neurons.push_back(n);
            if (jn.at("active").get<bool>()) inst.active_neurons.push_back(n.id);
        }
        for (const Json& je : j.at("edges")) {
            Edge e{je.at("from").get<std::string>(), je.at("to").get<std::string>()};
            inst.arch.edges.push_back(e);
            if (je.at("active").get<bool>()) inst.active_edges.push_back(edge_key(e));
        }
        for (const Json& jd : j.at("data_points")) {
            DataPoint p;
            for (const auto& [id, v] : jd.at("inputs").items()) p.values[id] = rat_of(v);
            for (const auto& [id, v] : jd.at("outputs").items()) p.values[id] = rat_of(v);
            inst.data.push_back(std::move(p));
        }
        inst.cost = term_from_json(j.at("cost"));
        inst.prec = prec_of(j.at("prec").get<std::string>());
        inst.delta = rat_of(j.at("delta"));
        d.meta = j.value("meta", Json::object());
        return d;
    });
    validate_instance(doc.instance, sig);
    return doc;
}

Json make_meta(const TrainingInstance& inst, const std::string& source_hash) {
    return Json{{"counts",
                 Json{{"active_edges", inst.active_edges.size()},
                      {"active_neurons", inst.active_neurons.size()},
                      {"data_points", inst.data.size()},
                      {"edges", inst.arch.edges.size()},
                      {"neurons", inst.arch.neurons.size()}}},
                {"source", "fnv1a:" + source_hash},
                {"tool", "etrnn 0.1.0"}};
}

namespace {

Json weight_value_json(const WeightValue& wv) {
    if (wv.definition) return Json{{"term", term_to_json(wv.definition)}};
    return rat_json(wv.value);
}

WeightValue weight_value_of(const Json& j) {
    if (j.is_string()) return weight_of(rat_of(j));
    if (j.is_object() && j.contains("term")) return weight_of_term(term_from_json(j.at("term")));
    bad_doc("weight must be a rational string or {\"term\": ...}");
}

} // namespace

Json weights_to_json(const WeightAssignment& wb) {
    Json w = Json::object(), b = Json::object();
    for (const auto& [key, wv] : wb.w) w[key] = weight_value_json(wv);
    for (const auto& [id, wv] : wb.b) b[id] = weight_value_json(wv);
    return Json{{"b", std::move(b)}, {"w", std::move(w)}};
}

WeightAssignment weights_from_json(const Json& j) {
    return doc_scope("weights", [&] {
        WeightAssignment wb;
        for (const auto& [key, v] : j.at("w").items()) wb.w[key] = weight_value_of(v);
        for (const auto& [id, v] : j.at("b").items()) wb.b[id] = weight_value_of(v);
        return wb;
    });
}

Json assignment_to_json(const std::map<std::string, Rational>& a) {
    Json out = Json::object();
    for (const auto& [var, q] : a) out[var] = rat_json(q);
    return out;
}

std::map<std::string, Rational> assignment_from_json(const Json& j) {
    return doc_scope("assignment", [&] {
        std::map<std::string, Rational> a;
        for (const auto& [var, q] : j.items()) a[var] = rat_of(q);
        return a;
    });
}

Json box_to_json(const std::map<std::string, RatInterval>& box) {
    Json out = Json::object();
    for (const auto& [var, iv] : box)
        out[var] = Json::array({rat_json(iv.lo), rat_json(iv.hi)});
    return out;
}

std::map<std::string, RatInterval> box_from_json(const Json& j) {
    return doc_scope("box", [&] {
        std::map<std::string, RatInterval> box;
        for (const auto& [var, arr] : j.items())
            box[var] = iv_make(rat_of(arr.at(0)), rat_of(arr.at(1)));
        return box;
    });
}

Json sidecar_to_json(const Sidecar& sc) {
    Json constraints = Json::array();
    for (const GadgetConstraint& g : sc.index.constraints) {
        Json jg{{"h", strings_json(g.h)},
                {"kind", kind_name(g.kind)},
                {"name", g.name},
                {"o", g.o},
                {"p", strings_json(g.p)},
                {"pos_vars", strings_json(g.pos_vars)},
                {"q", strings_json(g.q)}};
        if (!g.fn.empty()) jg["fn"] = g.fn;
        if (!g.e.empty()) jg["e"] = g.e;
        if (!g.r.empty()) jg["r"] = g.r;
        if (!g.t.empty()) jg["t"] = g.t;
        constraints.push_back(std::move(jg));
    }
    Json leaks = Json::array();
    for (const Edge& e : sc.index.leak_edges)
        leaks.push_back(Json{{"from", e.from}, {"to", e.to}});
    Json i = Json::object(), jj = Json::object();
    for (const auto& [var, id] : sc.index.i) i[var] = id;
    for (const auto& [var, id] : sc.index.j) jj[var] = id;
    return Json{{"constraints", std::move(constraints)},
                {"i", std::move(i)},
                {"j", std::move(jj)},
                {"leak_edges", std::move(leaks)},
                {"schedule", schedule_to_json(sc.schedule)},
                {"source_variables", strings_json(sc.source_variables)},
                {"variables", strings_json(sc.index.variables)}};
}

Sidecar sidecar_from_json(const Json& j) {
    return doc_scope("sidecar", [&] {
        Sidecar sc;
        sc.index.variables = strings_of(j.at("variables"));
        for (const auto& [var, id] : j.at("i").items()) sc.index.i[var] = id.get<std::string>();
        for (const auto& [var, id] : j.at("j").items()) sc.index.j[var] = id.get<std::string>();
        for (const Json& jg : j.at("constraints")) {
            GadgetConstraint g;
            g.name = jg.at("name").get<std::string>();
            g.kind = kind_of(jg.at("kind").get<std::string>());
            g.fn = jg.value("fn", "");
            g.pos_vars = strings_of(jg.at("pos_vars"));
            g.o = jg.at("o").get<std::string>();
            g.h = strings_of(jg.at("h"));
            g.q = strings_of(jg.at("q"));
            g.p = strings_of(jg.at("p"));
            g.e = jg.value("e", "");
            g.r = jg.value("r", "");
            g.t = jg.value("t", "");
            sc.index.constraints.push_back(std::move(g));
        }
        for (const Json& je : j.at("leak_edges"))
            sc.index.leak_edges.push_back(
                Edge{je.at("from").get<std::string>(), je.at("to").get<std::string>()});
        sc.schedule = schedule_from_json(j.at("schedule"));
        sc.source_variables = strings_of(j.at("source_variables"));
        return sc;
    });
}

} // namespace etrnn
