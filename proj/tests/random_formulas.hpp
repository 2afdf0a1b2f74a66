#pragma once

// Deterministic random formulas with planted rational witnesses, shared by
// the acceptance checks. Terms evaluate exactly at the planted point: only
// the exactly evaluable activations appear and division denominators are
// nonzero at the witness. Strict atoms that must hold get a perfect
// rational square as margin, so the slack variable (a square root of the
// gap) stays rational and the schedule extends the witness exactly.
// Violated atoms appear only as disjunction branches next to a holding one.

#include "etrnn/eval.hpp"
#include "etrnn/formula.hpp"
#include "random_systems.hpp"

namespace etrnn::testgen {

struct PlantedFormula {
    Formula formula;
    std::map<std::string, Rational> witness;
};

inline Term planted_term(Lcg& rng, const std::vector<std::string>& vars, const ExactEnv& env,
                         const Signature& sig, int depth) {
    static const char* funs[] = {"id", "relu", "abs", "square", "shifted_square"};
    long k = depth <= 0 ? rng.pick(0, 1) : rng.pick(0, 6);
    switch (k) {
    case 0: return mk_const(rng.rat());
    case 1: return mk_var(vars[size_t(rng.pick(0, long(vars.size()) - 1))]);
    case 2:
        return mk_add(planted_term(rng, vars, env, sig, depth - 1),
                      planted_term(rng, vars, env, sig, depth - 1));
    case 3:
        return mk_mul(planted_term(rng, vars, env, sig, depth - 1),
                      planted_term(rng, vars, env, sig, depth - 1));
    case 4: return mk_neg(planted_term(rng, vars, env, sig, depth - 1));
    case 5: {
        Term den = planted_term(rng, vars, env, sig, depth - 1);
        if (eval_term_exact(den, env, sig) == 0) den = mk_add(den, mk_const(1));
        return mk_div(planted_term(rng, vars, env, sig, depth - 1), den);
    }
    default:
        return mk_apply(funs[rng.pick(0, 4)], planted_term(rng, vars, env, sig, depth - 1));
    }
}

inline Rational square_margin(Lcg& rng) {
    Rational g(rng.pick(1, 9), rng.pick(1, 9));
    return g * g;
}

// An atom satisfied at the witness, where t evaluates to v.
inline Formula holding_atom(Lcg& rng, const Term& t, const Rational& v) {
    switch (rng.pick(0, 2)) {
    case 0: return mk_lt(t, mk_const(v + square_margin(rng)));
    case 1: return mk_lt(mk_const(v - square_margin(rng)), t);
    default: return mk_eq(t, mk_const(v));
    }
}

// An atom violated at the witness by a plain rational margin.
inline Formula violated_atom(Lcg& rng, const Term& t, const Rational& v) {
    Rational m(rng.pick(1, 9), rng.pick(1, 9));
    switch (rng.pick(0, 2)) {
    case 0: return mk_lt(t, mk_const(v - m));
    case 1: return mk_lt(mk_const(v + m), t);
    default: return mk_eq(t, mk_const(v + m));
    }
}

// Conjunction of atoms over 2 to 4 variables, each variable mentioned at
// least once, with occasional disjunctions whose other branch fails at the
// witness. A random prefix of the variables is bound by exists.
inline PlantedFormula random_formula(Lcg& rng, const Signature& sig, int atoms) {
    int nvars = int(rng.pick(2, 4));
    if (atoms < nvars) atoms = nvars;
    std::vector<std::string> vars;
    PlantedFormula pf;
    for (int i = 0; i < nvars; ++i) {
        vars.push_back("u" + std::to_string(i));
        pf.witness[vars.back()] = rng.rat();
    }
    // The first nvars atoms each anchor one variable so every planted
    // value is actually constrained.
    auto atom_term = [&](int i) {
        if (i < nvars)
            return mk_add(mk_var(vars[size_t(i)]), planted_term(rng, vars, pf.witness, sig, 2));
        return planted_term(rng, vars, pf.witness, sig, 3);
    };
    Formula f;
    for (int i = 0; i < atoms; ++i) {
        Term t = atom_term(i);
        Formula a = holding_atom(rng, t, eval_term_exact(t, pf.witness, sig));
        if (rng.pick(0, 3) == 0) {
            Term u = planted_term(rng, vars, pf.witness, sig, 2);
            Formula b = violated_atom(rng, u, eval_term_exact(u, pf.witness, sig));
            a = rng.pick(0, 1) == 0 ? mk_or(a, b) : mk_or(b, a);
        }
        f = f ? mk_and(f, a) : a;
    }
    for (long i = rng.pick(0, nvars); i > 0; --i) f = mk_exists(vars[size_t(i - 1)], f);
    pf.formula = f;
    return pf;
}

} // namespace etrnn::testgen
