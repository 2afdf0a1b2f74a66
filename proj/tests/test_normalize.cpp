#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "etrnn/normalize.hpp"
#include "etrnn/parser.hpp"

using namespace etrnn;

namespace {

const Signature& sig() {
    static Signature s = Signature::builtins();
    return s;
}

Formula fparse(const std::string& s) { return parse_formula(s, sig()); }

bool apply_args_are_vars(const Term& t) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TConst>) return true;
            else if constexpr (std::is_same_v<T, TAdd> || std::is_same_v<T, TMul>)
                return apply_args_are_vars(n.lhs) && apply_args_are_vars(n.rhs);
            else if constexpr (std::is_same_v<T, TNeg>) return apply_args_are_vars(n.arg);
            else if constexpr (std::is_same_v<T, TDiv>)
                return apply_args_are_vars(n.num) && apply_args_are_vars(n.den);
            else
                return std::holds_alternative<TVar>(n.arg->v);
        },
        t->v);
}

bool apply_args_are_vars(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt> || std::is_same_v<T, FEq>)
                return apply_args_are_vars(n.lhs) && apply_args_are_vars(n.rhs);
            else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>)
                return apply_args_are_vars(n.lhs) && apply_args_are_vars(n.rhs);
            else if constexpr (std::is_same_v<T, FNot>)
                return apply_args_are_vars(n.arg);
            else
                return apply_args_are_vars(n.body);
        },
        f->v);
}

bool term_has_minus_div(const Term& t) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TVar> || std::is_same_v<T, TConst>) return false;
            else if constexpr (std::is_same_v<T, TAdd> || std::is_same_v<T, TMul>)
                return term_has_minus_div(n.lhs) || term_has_minus_div(n.rhs);
            else if constexpr (std::is_same_v<T, TApply>)
                return term_has_minus_div(n.arg);
            else
                return true;
        },
        t->v);
}

bool formula_has_minus_div(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FLt> || std::is_same_v<T, FEq>)
                return term_has_minus_div(n.lhs) || term_has_minus_div(n.rhs);
            else if constexpr (std::is_same_v<T, FAnd> || std::is_same_v<T, FOr>)
                return formula_has_minus_div(n.lhs) || formula_has_minus_div(n.rhs);
            else if constexpr (std::is_same_v<T, FNot>)
                return formula_has_minus_div(n.arg);
            else
                return formula_has_minus_div(n.body);
        },
        f->v);
}

void check_system_invariants(const ConstraintSystem& cs) {
    std::set<std::string> vars(cs.variables.begin(), cs.variables.end());
    CHECK(vars.size() == cs.variables.size());
    CHECK(cs.provenance.size() == cs.constraints.size());
    for (const InvFlat& c : cs.constraints)
        for (const std::string& v : constraint_vars(c)) CHECK(vars.count(v) == 1);
    // Every non-source variable has exactly one defining schedule entry.
    std::set<std::string> defined;
    for (const SchedEntry& e : cs.schedule.entries) {
        CHECK(defined.insert(e.var).second);
        CHECK(vars.count(e.var) == 1);
    }
    std::set<std::string> sources(cs.source_variables.begin(), cs.source_variables.end());
    for (const std::string& v : cs.variables) {
        bool is_source = sources.count(v) > 0;
        CHECK(defined.count(v) == (is_source ? 0u : 1u));
    }
}

// Plants the witness, extends it through the schedule, and demands an
// exact extension with every constraint residual exactly zero.
void check_exact_roundtrip(const std::string& text, const ExactEnv& witness) {
    CAPTURE(text);
    ConstraintSystem cs = normalize(fparse(text), sig());
    check_system_invariants(cs);
    Extension ext = extend_witness(cs.schedule, witness, sig());
    CAPTURE(ext.inexact.empty() ? "" : ext.inexact.front());
    CAPTURE(ext.failed.empty() ? "" : ext.failed.front());
    REQUIRE(ext.complete());
    for (const InvFlat& c : cs.constraints) {
        CAPTURE(to_text(ConstraintSystem{{c}, {}, {}, {}, {}}));
        CHECK(constraint_residual(c, ext.values, sig()) == 0);
    }
}

// Same round trip where exact values are unavailable: the extension may
// carry enclosures, but no variable may fail outright, and no interval
// residual may exclude zero.
void check_interval_roundtrip(const std::string& text, const ExactEnv& witness, int depth = 30) {
    CAPTURE(text);
    ConstraintSystem cs = normalize(fparse(text), sig());
    check_system_invariants(cs);
    Extension ext = extend_witness(cs.schedule, witness, sig(), depth);
    CAPTURE(ext.failed.empty() ? "" : ext.failed.front());
    REQUIRE(ext.failed.empty());
    for (const InvFlat& c : cs.constraints) {
        RatInterval r = constraint_residual_interval(c, ext.boxes, sig(), depth);
        CHECK(iv_contains(r, Rational(0)));
    }
}

} // namespace

TEST_CASE("function flattening pins every apply argument to a variable") {
    RewriteResult r = flatten_functions(fparse("exp(x * sin(x)) < 2"), sig());
    CHECK(apply_args_are_vars(r.formula));
    CHECK(r.schedule.entries.size() == 2);
    // Inner pin first so the outer definition can reference it.
    CHECK(r.schedule.entries[0].op == SchedOp::term);
    Extension ext = extend_witness(r.schedule, {{"x", Rational(0)}}, sig());
    REQUIRE(ext.complete());
    // sin argument pin x, then the product pin x * sin-var.
    CHECK(ext.values.at(r.schedule.entries[0].var) == 0);
    CHECK(ext.values.at(r.schedule.entries[1].var) == 0);

    // Formulas without applies come back structurally unchanged.
    Formula plain = fparse("x + y < 2 & x = y");
    CHECK(formula_equal(flatten_functions(plain, sig()).formula, plain));
}

TEST_CASE("flattening rejects unknown function symbols") {
    Formula f = mk_eq(mk_apply("frob", mk_var("x")), mk_const(Rational(1)));
    CHECK_THROWS_AS(flatten_functions(f, sig()), Error);
}

TEST_CASE("minus and division elimination leaves neither node behind") {
    Formula f = fparse("-x / (y + 1) = 2 & z - x < 1");
    RewriteResult r = eliminate_minus_div(f);
    CHECK(!formula_has_minus_div(r.formula));
    // One pin for the negation, one for the quotient, one for z - x.
    CHECK(r.schedule.entries.size() == 3);
    Extension ext =
        extend_witness(r.schedule, {{"x", Rational(-4)}, {"y", Rational(1)}, {"z", Rational(0)}},
                       sig());
    REQUIRE(ext.complete());
    CHECK(ext.values.at(r.schedule.entries[0].var) == 4);
    CHECK(ext.values.at(r.schedule.entries[1].var) == 2);

    // Negative constants are values, not operations, and stay put.
    Formula c = fparse("x = 0 - 3");
    CHECK(formula_equal(eliminate_minus_div(c).formula, c));
}

TEST_CASE("invflat expansion matches the documented shapes") {
    EqSystem s;
    s.variables = {"x", "y", "z"};
    s.constraints.push_back({EqConstraint::Kind::add, "x", "y", "z", ""});
    s.provenance.push_back("p0");
    ConstraintSystem cs = to_invflat(s);
    REQUIRE(cs.constraints.size() == 3);
    CHECK(cs.constraints[0].kind == InvFlat::Kind::add);
    CHECK(cs.constraints[1].kind == InvFlat::Kind::add);
    CHECK(cs.constraints[2].kind == InvFlat::Kind::add);
    // v = 0 via v + v + v = 0.
    const InvFlat& c0 = cs.constraints[0];
    CHECK(c0.x == c0.y);
    CHECK(c0.y == c0.z);
    // z + u + v = 0 and x + y + u = 0 share u and v.
    CHECK(cs.constraints[1].x == "z");
    CHECK(cs.constraints[1].z == c0.x);
    CHECK(cs.constraints[2].x == "x");
    CHECK(cs.constraints[2].y == "y");
    CHECK(cs.constraints[2].z == cs.constraints[1].y);
    CHECK(cs.provenance == std::vector<std::string>(3, "p0"));
    Extension ext = extend_witness(
        cs.schedule, {{"x", Rational(1)}, {"y", Rational(2)}, {"z", Rational(3)}}, sig());
    REQUIRE(ext.complete());
    for (const InvFlat& c : cs.constraints) CHECK(constraint_residual(c, ext.values, sig()) == 0);

    EqSystem si;
    si.variables = {"x", "y"};
    si.constraints.push_back({EqConstraint::Kind::invmul, "x", "y", "", ""});
    si.provenance.push_back("p1");
    ConstraintSystem ci = to_invflat(si);
    REQUIRE(ci.constraints.size() == 3);
    CHECK(ci.constraints[2].kind == InvFlat::Kind::inv);
    CHECK(ci.constraints[2].x == "x");
    // The inversion partner is the negated y.
    CHECK(ci.constraints[1].x == "y");
    CHECK(ci.constraints[2].y == ci.constraints[1].y);
    Extension exti = extend_witness(ci.schedule, {{"x", Rational(4)}, {"y", Rational(1, 4)}},
                                    sig());
    REQUIRE(exti.complete());
    for (const InvFlat& c : ci.constraints) CHECK(constraint_residual(c, exti.values, sig()) == 0);

    EqSystem sf;
    sf.variables = {"x", "y"};
    sf.constraints.push_back({EqConstraint::Kind::fun, "x", "y", "", "relu"});
    sf.provenance.push_back("p2");
    ConstraintSystem cf = to_invflat(sf);
    REQUIRE(cf.constraints.size() == 3);
    CHECK(cf.constraints[2].kind == InvFlat::Kind::fun);
    CHECK(cf.constraints[2].fn == "relu");
    CHECK(cf.constraints[2].y == "y");
    Extension extf = extend_witness(cf.schedule, {{"x", Rational(7)}, {"y", Rational(7)}}, sig());
    REQUIRE(extf.complete());
    for (const InvFlat& c : cf.constraints) CHECK(constraint_residual(c, extf.values, sig()) == 0);

    EqSystem su;
    su.variables = {"x"};
    su.constraints.push_back({EqConstraint::Kind::unit, "x", "", "", ""});
    su.provenance.push_back("p3");
    ConstraintSystem cu = to_invflat(su);
    REQUIRE(cu.constraints.size() == 1);
    CHECK(cu.constraints[0].kind == InvFlat::Kind::unit);
    CHECK(cu.constraints[0].x == "x");
}

TEST_CASE("normalization round trips planted witnesses exactly") {
    check_exact_roundtrip("x = 1", {{"x", Rational(1)}});
    check_exact_roundtrip("x + y = 3", {{"x", Rational(1)}, {"y", Rational(2)}});
    check_exact_roundtrip("2 * x = 3", {{"x", Rational(3, 2)}});
    check_exact_roundtrip("x * x = 25/16", {{"x", Rational(-5, 4)}});
    check_exact_roundtrip("x * y = 6 & y < x", {{"x", Rational(3)}, {"y", Rational(2)}});
    check_exact_roundtrip("exists x (1 < x & x * x < 17/8)", {{"x", Rational(5, 4)}});
    check_exact_roundtrip("exp(x - 3) = y", {{"x", Rational(3)}, {"y", Rational(1)}});
    check_exact_roundtrip("relu(x - 2) = 0", {{"x", Rational(1)}});
    check_exact_roundtrip("abs(x) = 5/2", {{"x", Rational(-5, 2)}});
    check_exact_roundtrip("square(x) = 9/4", {{"x", Rational(3, 2)}});
    check_exact_roundtrip("shifted_square(x) = 5/4", {{"x", Rational(1, 2)}});
    check_exact_roundtrip("x / y = 3/2", {{"x", Rational(3)}, {"y", Rational(2)}});
    check_exact_roundtrip("x < 1 | 2 < x", {{"x", Rational(3)}});
    // Disjunction where only the first branch holds, slack a perfect square.
    check_exact_roundtrip("x < 1 | 2 < x", {{"x", Rational(0)}});
    // Equality under disjunction.
    check_exact_roundtrip("x = 5 | x = 7", {{"x", Rational(7)}});
    // Conjunction under disjunction.
    check_exact_roundtrip("(x = 2 & y = 3) | x < y", {{"x", Rational(2)}, {"y", Rational(3)}});
}

TEST_CASE("negation desugars before translation") {
    Formula f = mk_not(mk_eq(mk_var("x"), mk_const(Rational(1))));
    ConstraintSystem cs = normalize(f, sig());
    check_system_invariants(cs);
    Extension ext = extend_witness(cs.schedule, {{"x", Rational(2)}}, sig());
    REQUIRE(ext.complete());
    for (const InvFlat& c : cs.constraints) CHECK(constraint_residual(c, ext.values, sig()) == 0);
}

TEST_CASE("normalization falls back to sound enclosures") {
    check_interval_roundtrip("exists x (1 < x & x * x < 2)", {{"x", Rational(13, 10)}});
    check_interval_roundtrip("0 < sin(x) + 2", {{"x", Rational(1)}});
    check_interval_roundtrip("sigmoid(x) < 1", {{"x", Rational(2)}});
}

TEST_CASE("source variables cover free and bound names") {
    ConstraintSystem cs = normalize(fparse("(exists y x < y) & 0 < x"), sig());
    CHECK(cs.source_variables == std::vector<std::string>{"x", "y"});
}

TEST_CASE("minimal equality produces the documented constraint mix") {
    ConstraintSystem cs = normalize(fparse("x = 1"), sig());
    int units = 0, adds = 0, invs = 0, funs = 0;
    for (const InvFlat& c : cs.constraints) {
        switch (c.kind) {
            case InvFlat::Kind::unit: ++units; break;
            case InvFlat::Kind::add: ++adds; break;
            case InvFlat::Kind::inv: ++invs; break;
            case InvFlat::Kind::fun: ++funs; break;
        }
    }
    CHECK(units == 1);
    CHECK(adds == 6);
    CHECK(invs == 0);
    CHECK(funs == 0);
}

TEST_CASE("provenance names the source atom") {
    ConstraintSystem cs = normalize(fparse("x = 1 & (exists y x < y)"), sig());
    std::set<std::string> seen(cs.provenance.begin(), cs.provenance.end());
    CHECK(seen.count("x = 1") == 1);
    CHECK(seen.count("x < y") == 1);
    for (const std::string& p : cs.provenance) CHECK((p == "x = 1" || p == "x < y"));
}

TEST_CASE("binder hygiene is enforced") {
    CHECK_THROWS_AS(normalize(fparse("(exists x 0 < x) & (exists x x < 0)"), sig()), Error);
    CHECK_THROWS_AS(normalize(fparse("(exists x x = 2) & x = 1"), sig()), Error);
}

TEST_CASE("division must be eliminated before the equational pass") {
    CHECK_THROWS_AS(to_equational(fparse("x / y = 1"), sig()), Error);
}
