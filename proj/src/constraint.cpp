#include "etrnn/constraint.hpp"

#include <set>
#include <sstream>

namespace etrnn {

std::vector<std::string> constraint_vars(const InvFlat& c) {
    switch (c.kind) {
        case InvFlat::Kind::unit: return {c.x};
        case InvFlat::Kind::add: return {c.x, c.y, c.z};
        case InvFlat::Kind::inv: return {c.x, c.y};
        case InvFlat::Kind::fun: return {c.x, c.y};
    }
    throw Error(Errc::internal, "bad constraint kind");
}

namespace {

Rational lookup(const ExactEnv& env, const std::string& v) {
    auto it = env.find(v);
    if (it == env.end()) throw Error(Errc::symbol, "unbound variable '" + v + "'");
    return it->second;
}

RatInterval lookup_box(const BoxEnv& env, const std::string& v) {
    auto it = env.find(v);
    if (it == env.end()) throw Error(Errc::symbol, "unbound variable '" + v + "'");
    return it->second;
}

} // namespace

Rational constraint_residual(const InvFlat& c, const ExactEnv& env, const Signature& sig) {
    switch (c.kind) {
        case InvFlat::Kind::unit: return lookup(env, c.x) - 1;
        case InvFlat::Kind::add: return lookup(env, c.x) + lookup(env, c.y) + lookup(env, c.z);
        case InvFlat::Kind::inv: return lookup(env, c.x) * lookup(env, c.y) + 1;
        case InvFlat::Kind::fun: {
            const ActivationSpec& spec = sig.find(c.fn);
            Rational a = lookup(env, c.y);
            Rational fv;
            if (spec.exact_eval) fv = spec.exact_eval(a);
            else if (a == 0 && spec.value_at_zero) fv = *spec.value_at_zero;
            else throw Error(Errc::eval, "no exact value for " + c.fn + "(" + rat_to_string(a) + ")");
            return lookup(env, c.x) + fv;
        }
    }
    throw Error(Errc::internal, "bad constraint kind");
}

RatInterval constraint_residual_interval(const InvFlat& c, const BoxEnv& env, const Signature& sig,
                                         int depth) {
    switch (c.kind) {
        case InvFlat::Kind::unit:
            return iv_sub(lookup_box(env, c.x), iv_point(Rational(1)));
        case InvFlat::Kind::add:
            return iv_add(iv_add(lookup_box(env, c.x), lookup_box(env, c.y)),
                          lookup_box(env, c.z));
        case InvFlat::Kind::inv:
            return iv_add(iv_mul(lookup_box(env, c.x), lookup_box(env, c.y)),
                          iv_point(Rational(1)));
        case InvFlat::Kind::fun: {
            const ActivationSpec& spec = sig.find(c.fn);
            return iv_add(lookup_box(env, c.x), spec.interval_eval(lookup_box(env, c.y), depth));
        }
    }
    throw Error(Errc::internal, "bad constraint kind");
}

std::string to_text(const ConstraintSystem& s) {
    std::string out;
    for (const InvFlat& c : s.constraints) {
        switch (c.kind) {
            case InvFlat::Kind::unit: out += "unit " + c.x; break;
            case InvFlat::Kind::add: out += "add " + c.x + " " + c.y + " " + c.z; break;
            case InvFlat::Kind::inv: out += "inv " + c.x + " " + c.y; break;
            case InvFlat::Kind::fun: out += "fun " + c.x + " " + c.fn + " " + c.y; break;
        }
        out += "\n";
    }
    return out;
}

ConstraintSystem system_from_text(std::string_view text, const Signature& sig) {
    ConstraintSystem sys;
    std::set<std::string> seen;
    auto touch = [&](const std::string& v) {
        if (seen.insert(v).second) sys.variables.push_back(v);
    };
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto need = [&](size_t n) {
            if (tok.size() != n)
                throw Error(Errc::parse, lineno, 1,
                            "'" + tok[0] + "' expects " + std::to_string(n - 1) + " arguments");
        };
        InvFlat c;
        if (tok[0] == "unit") {
            need(2);
            c = {InvFlat::Kind::unit, tok[1], "", "", ""};
        } else if (tok[0] == "add") {
            need(4);
            c = {InvFlat::Kind::add, tok[1], tok[2], tok[3], ""};
        } else if (tok[0] == "inv") {
            need(3);
            c = {InvFlat::Kind::inv, tok[1], tok[2], "", ""};
        } else if (tok[0] == "fun") {
            need(4);
            if (!sig.has(tok[2]))
                throw Error(Errc::symbol, lineno, 1, "unknown function symbol '" + tok[2] + "'");
            c = {InvFlat::Kind::fun, tok[1], tok[3], "", tok[2]};
        } else {
            throw Error(Errc::parse, lineno, 1, "unknown constraint '" + tok[0] + "'");
        }
        for (const std::string& v : constraint_vars(c)) touch(v);
        sys.constraints.push_back(std::move(c));
        sys.provenance.push_back("line " + std::to_string(lineno));
    }
    return sys;
}

} // namespace etrnn
