#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "etrnn/parser.hpp"
#include "etrnn/polynomial.hpp"

using namespace etrnn;

namespace {

const Signature& sig() {
    static Signature s = Signature::builtins();
    return s;
}

Formula fparse(const std::string& s) { return parse_formula(s, sig()); }

TauPolynomial square(const TauPolynomial& p) { return poly_mul(p, p); }

} // namespace

TEST_CASE("polynomial arithmetic and degree") {
    TauPolynomial x = poly_var("x"), y = poly_var("y");
    TauPolynomial p = poly_mul(poly_add(x, y), poly_sub(x, y));
    CHECK(poly_equal(p, poly_sub(poly_mul(x, x), poly_mul(y, y))));
    CHECK(poly_degree(p) == 2);
    CHECK(render(p) == "x^2 - y^2");

    CHECK(poly_is_zero(poly_sub(p, p)));
    CHECK(poly_degree(poly_sub(p, p)) == 0);
    CHECK(render(poly_sub(p, p)) == "0");

    TauPolynomial c = poly_const(Rational(-3, 2));
    CHECK(render(poly_add(poly_mul(c, x), poly_const(Rational(1)))) == "1 - 3/2 * x");
    CHECK(poly_degree(c) == 0);

    TauPolynomial s = poly_apply("sin", "x");
    CHECK(render(poly_mul(s, s)) == "sin(x)^2");
    CHECK(poly_degree(poly_mul(s, poly_mul(x, x))) == 3);
    // Plain variables precede applied atoms of the same variable.
    CHECK(render(poly_add(poly_mul(x, s), x)) == "x + x * sin(x)");
}

TEST_CASE("polynomial evaluation, exact and interval") {
    TauPolynomial p =
        poly_add(poly_mul(poly_var("x"), poly_var("y")), poly_apply("square", "x"));
    ExactEnv env{{"x", Rational(3)}, {"y", Rational(-2)}};
    CHECK(eval_poly_exact(p, env, sig()) == 3); // -6 + 9

    BoxEnv box{{"x", iv_point(Rational(3))}, {"y", {Rational(-2), Rational(-1)}}};
    RatInterval r = eval_poly_interval(p, box, sig(), 10);
    CHECK(r.lo <= 3);
    CHECK(r.hi >= 6);
    CHECK(iv_contains(r, Rational(4)));

    CHECK_THROWS_AS(eval_poly_exact(poly_var("z"), env, sig()), Error);
    // exp(3) has no exact rational value.
    CHECK_THROWS_AS(eval_poly_exact(poly_apply("exp", "x"), env, sig()), Error);
    RatInterval e = eval_poly_interval(poly_apply("exp", "x"), box, sig(), 20);
    CHECK(e.lo > Rational(20));
    CHECK(e.hi < Rational(21));
}

TEST_CASE("conjunction of equalities gives the sum-of-squares polynomial") {
    Feas4 f = build_4feas(fparse("x * y = 1 & x + y = z"), sig());
    TauPolynomial expect = poly_add(
        square(poly_sub(poly_mul(poly_var("x"), poly_var("y")), poly_const(Rational(1)))),
        square(poly_sub(poly_add(poly_var("x"), poly_var("y")), poly_var("z"))));
    CHECK(poly_equal(f.poly, expect));
    CHECK(poly_degree(f.poly) == 4);
    CHECK(f.schedule.entries.empty());
    CHECK(f.variables == std::vector<std::string>{"x", "y", "z"});

    ExactEnv good{{"x", Rational(2)}, {"y", Rational(1, 2)}, {"z", Rational(5, 2)}};
    CHECK(eval_poly_exact(f.poly, good, sig()) == 0);
    ExactEnv bad{{"x", Rational(2)}, {"y", Rational(1, 2)}, {"z", Rational(3)}};
    CHECK(eval_poly_exact(f.poly, bad, sig()) != 0);
}

TEST_CASE("single equality gives a squared residual") {
    Feas4 f = build_4feas(fparse("x = 1"), sig());
    CHECK(poly_equal(f.poly, square(poly_sub(poly_var("x"), poly_const(Rational(1))))));
    CHECK(poly_degree(f.poly) == 2);
}

TEST_CASE("strict inequality uses the inverted-slack encoding") {
    Feas4 f = build_4feas(fparse("0 < x"), sig());
    CHECK(poly_degree(f.poly) <= 4);
    REQUIRE(f.schedule.entries.size() == 3);
    CHECK(f.schedule.entries[1].op == SchedOp::sqrt_exact);

    Extension ext = extend_witness(f.schedule, {{"x", Rational(4)}}, sig());
    REQUIRE(ext.complete());
    CHECK(eval_poly_exact(f.poly, ext.values, sig()) == 0);

    Extension e2 = extend_witness(f.schedule, {{"x", Rational(9, 4)}}, sig());
    REQUIRE(e2.complete());
    CHECK(eval_poly_exact(f.poly, e2.values, sig()) == 0);
}

TEST_CASE("products past degree two are re-flattened through fresh variables") {
    Feas4 f = build_4feas(fparse("x * x * x * x = 16"), sig());
    CHECK(poly_degree(f.poly) <= 4);
    REQUIRE(f.schedule.entries.size() == 2);
    Extension ext = extend_witness(f.schedule, {{"x", Rational(2)}}, sig());
    REQUIRE(ext.complete());
    CHECK(eval_poly_exact(f.poly, ext.values, sig()) == 0);
    Extension bad = extend_witness(f.schedule, {{"x", Rational(1)}}, sig());
    CHECK(eval_poly_exact(f.poly, bad.values, sig()) != 0);
}

TEST_CASE("syntactically equal factors share one linearization variable") {
    Feas4 f = build_4feas(fparse("(x * x) * (x * x) = 16"), sig());
    CHECK(poly_degree(f.poly) <= 4);
    CHECK(f.schedule.entries.size() == 1);
    Extension ext = extend_witness(f.schedule, {{"x", Rational(-2)}}, sig());
    REQUIRE(ext.complete());
    CHECK(eval_poly_exact(f.poly, ext.values, sig()) == 0);
}

TEST_CASE("disjunction multiplies captured branch residuals") {
    Feas4 f = build_4feas(fparse("x = 5 | x = 7"), sig());
    CHECK(poly_degree(f.poly) <= 4);
    for (const Rational& w : {Rational(5), Rational(7)}) {
        Extension ext = extend_witness(f.schedule, {{"x", w}}, sig());
        REQUIRE(ext.complete());
        CHECK(eval_poly_exact(f.poly, ext.values, sig()) == 0);
    }
    Extension bad = extend_witness(f.schedule, {{"x", Rational(6)}}, sig());
    CHECK(eval_poly_exact(f.poly, bad.values, sig()) != 0);
}

TEST_CASE("nested disjunction with inequalities and conjunction") {
    Feas4 f = build_4feas(fparse("(x < 1 & x = 0) | 2 < x | x = 3/2"), sig());
    CHECK(poly_degree(f.poly) <= 4);
    // x = 0: first branch (slack 1 is a perfect square); x = 3: middle
    // branch (slack 1); x = 3/2: last branch.
    for (const Rational& w : {Rational(0), Rational(3), Rational(3, 2)}) {
        CAPTURE(rat_to_string(w));
        Extension ext = extend_witness(f.schedule, {{"x", w}}, sig());
        REQUIRE(ext.complete());
        CHECK(eval_poly_exact(f.poly, ext.values, sig()) == 0);
    }
    Extension bad = extend_witness(f.schedule, {{"x", Rational(7, 4)}}, sig());
    CHECK(eval_poly_exact(f.poly, bad.values, sig()) != 0);
}

TEST_CASE("pipeline handles functions, minus, and division") {
    Feas4 f = build_4feas_pipeline(fparse("exp(x) = 1 & -x / (y + 1) = 0"), sig());
    CHECK(poly_degree(f.poly) <= 4);
    CHECK(f.source_variables == std::vector<std::string>{"x", "y"});
    Extension ext =
        extend_witness(f.schedule, {{"x", Rational(0)}, {"y", Rational(4)}}, sig());
    REQUIRE(ext.complete());
    CHECK(eval_poly_exact(f.poly, ext.values, sig()) == 0);
}

TEST_CASE("pipeline falls back to interval certification") {
    Feas4 f = build_4feas_pipeline(fparse("exists x (1 < x & x * x < 2)"), sig());
    CHECK(poly_degree(f.poly) <= 4);
    Extension ext = extend_witness(f.schedule, {{"x", Rational(13, 10)}}, sig());
    CHECK(!ext.complete());
    REQUIRE(ext.failed.empty());
    RatInterval r = eval_poly_interval(f.poly, ext.boxes, sig(), 30);
    CHECK(iv_contains(r, Rational(0)));

    Feas4 g = build_4feas_pipeline(fparse("0 < sin(x) + 2"), sig());
    Extension e2 = extend_witness(g.schedule, {{"x", Rational(1)}}, sig());
    REQUIRE(e2.failed.empty());
    CHECK(iv_contains(eval_poly_interval(g.poly, e2.boxes, sig(), 30), Rational(0)));
}

TEST_CASE("the builder rejects non-flat input") {
    CHECK_THROWS_AS(build_4feas(fparse("exp(x + 1) = 1"), sig()), Error);
    CHECK_THROWS_AS(build_4feas(fparse("x / y = 1"), sig()), Error);
    CHECK_THROWS_AS(build_4feas(mk_not(fparse("x = 1")), sig()), Error);
    CHECK_THROWS_AS(build_4feas(fparse("(exists x x = 2) & x = 1"), sig()), Error);
}
