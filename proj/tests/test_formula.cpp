#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "etrnn/eval.hpp"
#include "etrnn/parser.hpp"
#include "etrnn/schedule.hpp"

using namespace etrnn;

namespace {
const Signature& sig() {
    static Signature s = Signature::builtins();
    return s;
}

Formula fparse(const std::string& s) { return parse_formula(s, sig()); }
Term tparse(const std::string& s) { return parse_term(s, sig()); }
} // namespace

TEST_CASE("parse and render round trips") {
    for (const char* text : {
             "x + y < 2",
             "exists x 1 < x & x * x < 2",
             "exists x (1 < x & x * x < 2)",
             "x = 1",
             "x * y = 1 & x + y = z",
             "-1/100 < sin(y) & sin(y) < 1/100 & 4 < y & y < 7",
             "x - y < z | z < x - y",
             "exists x exists y x + y < 1",
             "(x + y) * z < 1",
             "x + (y + z) < 1",
             "x * (y * z) < 1",
             "2 / x < 3",
             "exp(x + 1) < sigmoid(y)",
             "relu(x) = abs(y) | shifted_square(z) = square(z)",
             "(exists x x < y) & 0 < y",
         }) {
        Formula f = fparse(text);
        std::string r = render(f);
        CHECK(formula_equal(fparse(r), f));
    }
}

TEST_CASE("rendering is canonical for chosen forms") {
    CHECK(render(fparse("exists x (1 < x & x * x < 2)")) == "exists x 1 < x & x * x < 2");
    CHECK(render(fparse("((x))+((y)) < ((2))")) == "x + y < 2");
    CHECK(render(tparse("x - y")) == "x - y");
    CHECK(render(tparse("-(x + y)")) == "-(x + y)");
    CHECK(render(tparse("3/2")) == "3/2");
    CHECK(render(tparse("-3/2")) == "-3/2");
    CHECK(render(tparse("x - 3/2")) == "x - 3/2");
    CHECK(render(tparse("1.25")) == "5/4");
}

TEST_CASE("constant folding keeps literals parseable") {
    Term t = tparse("3/2");
    CHECK(std::holds_alternative<TConst>(t->v));
    CHECK(std::get<TConst>(t->v).value == Rational(3, 2));
    Term n = tparse("-7");
    CHECK(std::holds_alternative<TConst>(n->v));
    CHECK(std::get<TConst>(n->v).value == -7);
    CHECK_THROWS_AS(tparse("1/0"), Error);
}

TEST_CASE("parse errors carry position") {
    try {
        fparse("x <\n  < y");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse);
        CHECK(e.line() == 2);
        CHECK(e.col() == 3);
    }
    try {
        fparse("x ! y");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse);
        CHECK(std::string(e.what()).find("'!'") != std::string::npos);
    }
}

TEST_CASE("unknown function symbols are a distinct error") {
    try {
        fparse("cos(x) < 1");
        FAIL("expected a symbol error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::symbol);
        CHECK(std::string(e.what()).find("cos") != std::string::npos);
    }
}

TEST_CASE("operator kind mismatches are rejected") {
    CHECK_THROWS_AS(fparse("(x < 1) + 2 < 3"), Error);
    CHECK_THROWS_AS(fparse("x & y"), Error);
    CHECK_THROWS_AS(fparse("sin(x < 1) < 0"), Error);
    CHECK_THROWS_AS(fparse("x + exists y y < 1 < 2"), Error);
    CHECK_THROWS_AS(fparse("x + 1"), Error);
    CHECK_THROWS_AS(parse_term("x < 1", sig()), Error);
}

TEST_CASE("free and bound variables in first occurrence order") {
    Formula f = fparse("exists x x + y < z & y < x | w = 1");
    auto fv = free_variables(f);
    REQUIRE(fv.size() == 3);
    CHECK(fv[0] == "y");
    CHECK(fv[1] == "z");
    CHECK(fv[2] == "w");
    auto bv = bound_variables(f);
    REQUIRE(bv.size() == 1);
    CHECK(bv[0] == "x");

    auto tv = free_variables(tparse("z * (y + z) - x"));
    REQUIRE(tv.size() == 3);
    CHECK(tv[0] == "z");
    CHECK(tv[1] == "y");
    CHECK(tv[2] == "x");
}

TEST_CASE("negation desugars away") {
    Formula lt = fparse("x < 1");
    Formula f = desugar_negation(mk_not(lt));
    CHECK(formula_equal(f, fparse("1 < x | x = 1")));

    Formula eq = fparse("x = y");
    CHECK(formula_equal(desugar_negation(mk_not(eq)), fparse("x < y | y < x")));

    Formula both = desugar_negation(mk_not(mk_and(lt, eq)));
    CHECK(formula_equal(both, fparse("(1 < x | x = 1) | (x < y | y < x)")));

    CHECK(formula_equal(desugar_negation(mk_not(mk_not(lt))), lt));
    CHECK_THROWS_AS(desugar_negation(mk_not(fparse("exists x x < 1"))), Error);
}

TEST_CASE("strict fragment recognition") {
    CHECK(is_strict_fragment(fparse("exists x 1 < x & x * x < 2")));
    CHECK(is_strict_fragment(fparse("x < 1 | y < 2")));
    CHECK(!is_strict_fragment(fparse("x = 1")));
    CHECK(!is_strict_fragment(fparse("x < 1 & y = 2")));
    CHECK(!is_strict_fragment(mk_not(fparse("x < 1"))));
}

TEST_CASE("exact term evaluation") {
    ExactEnv env{{"x", Rational(3)}, {"y", Rational(-1, 2)}};
    CHECK(eval_term_exact(tparse("x * y + 1/2"), env, sig()) == -1);
    CHECK(eval_term_exact(tparse("abs(y) + relu(-x)"), env, sig()) == Rational(1, 2));
    CHECK(eval_term_exact(tparse("x / y"), env, sig()) == -6);
    CHECK(eval_term_exact(tparse("exp(x - 3)"), env, sig()) == 1);
    CHECK(eval_term_exact(tparse("sin(x - 3)"), env, sig()) == 0);
    CHECK_THROWS_AS(eval_term_exact(tparse("exp(x)"), env, sig()), Error);
    CHECK_THROWS_AS(eval_term_exact(tparse("x / (y + 1/2)"), env, sig()), Error);
    CHECK_THROWS_AS(eval_term_exact(tparse("x + z"), env, sig()), Error);
}

TEST_CASE("interval term evaluation encloses and nests") {
    // A point environment: interval dependency width vanishes and the
    // product must pin down 1 tightly.
    BoxEnv env{{"x", iv_point(Rational(3, 2))}};
    Term t = tparse("exp(x) * exp(-x)");
    RatInterval prev = eval_term_interval(t, env, sig(), 1);
    CHECK(iv_contains(prev, Rational(1)));
    for (int d = 2; d <= 15; ++d) {
        RatInterval cur = eval_term_interval(t, env, sig(), d);
        CHECK(iv_contains(cur, Rational(1)));
        CHECK(iv_subset(cur, prev));
        prev = cur;
    }
    CHECK(iv_width(prev) <= pow2(-10));

    // Over a genuine box the result must still cover the image.
    BoxEnv box{{"x", {Rational(1), Rational(2)}}};
    RatInterval r = eval_term_interval(t, box, sig(), 10);
    CHECK(iv_contains(r, Rational(1)));
}

TEST_CASE("interval division that cannot exclude zero fails cleanly") {
    BoxEnv env{{"x", {Rational(-1), Rational(1)}}};
    CHECK_THROWS_AS(eval_term_interval(tparse("1 / x"), env, sig(), 10), Error);
    // A divisor bounded away from zero works even when loose early passes
    // would not manage on their own.
    BoxEnv env2{{"x", {Rational(2), Rational(3)}}};
    RatInterval r = eval_term_interval(tparse("1 / x"), env2, sig(), 10);
    CHECK(r.lo >= Rational(1, 3));
    CHECK(r.hi <= Rational(1, 2));
}

TEST_CASE("witness extension runs schedules in order") {
    WitnessExtension sched;
    sched.entries.push_back({"a", SchedOp::term, tparse("x + 1")});
    sched.entries.push_back({"b", SchedOp::sqrt_exact, tparse("a * a")});
    sched.entries.push_back({"c", SchedOp::inv_or_zero, tparse("b - 3")});
    sched.entries.push_back({"d", SchedOp::sqrt_or_zero, tparse("1 - a")});

    Extension ext = extend_witness(sched, {{"x", Rational(2)}}, sig());
    CHECK(ext.complete());
    CHECK(ext.values.at("a") == 3);
    CHECK(ext.values.at("b") == 3);
    CHECK(ext.values.at("c") == 0);
    CHECK(ext.values.at("d") == 0); // negative argument takes the zero branch

    Extension e2 = extend_witness(sched, {{"x", Rational(3)}}, sig());
    CHECK(e2.values.at("b") == 4);
    CHECK(e2.values.at("c") == 1);
    CHECK(e2.values.at("d") == 0);
}

TEST_CASE("sqrt-or-zero keeps positive non-squares as enclosures") {
    WitnessExtension sched;
    sched.entries.push_back({"d", SchedOp::sqrt_or_zero, tparse("x + 1")});

    Extension sq = extend_witness(sched, {{"x", Rational(3)}}, sig());
    CHECK(sq.complete());
    CHECK(sq.values.at("d") == 2);

    Extension ir = extend_witness(sched, {{"x", Rational(2)}}, sig());
    CHECK(!ir.complete());
    REQUIRE(ir.inexact == std::vector<std::string>{"d"});
    CHECK(iv_contains(ir.boxes.at("d"), rat_from_string("1.7320508075688772")));
    Rational sq3 = ir.boxes.at("d").lo * ir.boxes.at("d").lo;
    CHECK(sq3 <= 3);
    CHECK(ir.boxes.at("d").hi * ir.boxes.at("d").hi >= 3);
}

TEST_CASE("witness extension reports partial results") {
    WitnessExtension sched;
    sched.entries.push_back({"s", SchedOp::term, tparse("sin(x)")});
    sched.entries.push_back({"t", SchedOp::term, tparse("s + 1")});
    sched.entries.push_back({"u", SchedOp::term, tparse("x + 1")});
    sched.entries.push_back({"w", SchedOp::sqrt_exact, tparse("0 - 1")});
    sched.entries.push_back({"v", SchedOp::term, tparse("w + 1")});

    Extension ext = extend_witness(sched, {{"x", Rational(1)}}, sig(), 25);
    CHECK(!ext.complete());
    // sin(1) is irrational: enclosed, not valued.
    CHECK(ext.values.count("s") == 0);
    CHECK(ext.boxes.count("s") == 1);
    REQUIRE(ext.inexact.size() == 2);
    CHECK(ext.inexact[0] == "s");
    CHECK(ext.inexact[1] == "t");
    // The enclosure of t = sin(1) + 1 still flows through.
    CHECK(iv_contains(ext.boxes.at("t"), rat_from_string("1.8414709848")));
    // Independent entries still evaluate; sqrt of a negative fails, and the
    // failure propagates to its dependents.
    CHECK(ext.values.at("u") == 2);
    REQUIRE(ext.failed.size() == 2);
    CHECK(ext.failed[0] == "w");
    CHECK(ext.failed[1] == "v");
}

TEST_CASE("witness extension enclosures cover irrational square roots") {
    WitnessExtension sched;
    sched.entries.push_back({"r", SchedOp::sqrt_exact, tparse("x")});
    Extension ext = extend_witness(sched, {{"x", Rational(2)}}, sig(), 30);
    CHECK(ext.values.count("r") == 0);
    RatInterval r = ext.boxes.at("r");
    CHECK(r.lo * r.lo <= 2);
    CHECK(r.hi * r.hi >= 2);
}
