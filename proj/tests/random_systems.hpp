#pragma once

// Deterministic random flat constraint systems with planted rational
// witnesses, shared by the unit tests and the acceptance checks.

#include <cstdint>
#include <string>
#include <vector>

#include "etrnn/constraint.hpp"

namespace etrnn::testgen {

struct Lcg {
    std::uint64_t s;
    std::uint64_t next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return s >> 33;
    }
    long pick(long lo, long hi) { return lo + long(next() % std::uint64_t(hi - lo + 1)); }
    Rational rat() { return Rational(pick(-6, 6), pick(1, 6)); }
};

struct PlantedSystem {
    ConstraintSystem system;
    std::map<std::string, Rational> witness;
};

// Grows a satisfiable system constraint by constraint, planting values as
// it goes. Reuses existing variables when their planted value fits, so
// variables are shared across constraints (including inversion arguments,
// which exercises the cross-gadget cancellation machinery).
inline PlantedSystem random_system(Lcg& rng, int constraints) {
    static const char* funs[] = {"id", "relu", "abs", "square"};
    PlantedSystem ps;
    auto fresh = [&](const Rational& value) {
        std::string name = "x" + std::to_string(ps.system.variables.size());
        ps.system.variables.push_back(name);
        ps.witness[name] = value;
        return name;
    };
    auto pool_pick = [&]() {
        return ps.system.variables[size_t(rng.pick(0, long(ps.system.variables.size()) - 1))];
    };
    // A variable with the wanted value: reuse when one exists and the
    // coin says so, otherwise mint a fresh one.
    auto var_with = [&](const Rational& value) {
        if (rng.pick(0, 1) == 0)
            for (const std::string& v : ps.system.variables)
                if (ps.witness.at(v) == value) return v;
        return fresh(value);
    };
    fresh(rng.rat());
    for (int c = 0; c < constraints; ++c) {
        switch (rng.pick(0, 3)) {
        case 0: ps.system.constraints.push_back({InvFlat::Kind::unit, var_with(1), "", "", ""}); break;
        case 1: {
            std::string a = pool_pick(), b = pool_pick();
            std::string z = var_with(-(ps.witness.at(a) + ps.witness.at(b)));
            ps.system.constraints.push_back({InvFlat::Kind::add, a, b, z, ""});
            break;
        }
        case 2: {
            std::string a = pool_pick();
            if (ps.witness.at(a) == 0) a = fresh(rng.pick(1, 6));
            std::string b = var_with(Rational(-1) / ps.witness.at(a));
            ps.system.constraints.push_back({InvFlat::Kind::inv, a, b, "", ""});
            break;
        }
        default: {
            const char* f = funs[rng.pick(0, 3)];
            std::string b = pool_pick();
            Rational v = ps.witness.at(b);
            Rational image = std::string(f) == "id"     ? v
                             : std::string(f) == "relu" ? (v > 0 ? v : Rational(0))
                             : std::string(f) == "abs"  ? (v < 0 ? Rational(-v) : v)
                                                        : v * v;
            ps.system.constraints.push_back(
                {InvFlat::Kind::fun, var_with(Rational(-image)), b, "", f});
            break;
        }
        }
        ps.system.provenance.push_back("g" + std::to_string(c));
    }
    ps.system.source_variables = ps.system.variables;
    return ps;
}

} // namespace etrnn::testgen
