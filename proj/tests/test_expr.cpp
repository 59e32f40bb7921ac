#include "doctest.h"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "finslernav/expr.hpp"
#include "finslernav/fd.hpp"
#include "finslernav/rng.hpp"

using namespace finslernav;

namespace {

double eval_at(const Expr& e, std::vector<double> x, const Params& p = {}) {
    return e.eval_d(x, p);
}

} // namespace

TEST_SUITE("expr") {

TEST_CASE("stereographic factor parses and evaluates") {
    Expr e = parse("4/(1+x1^2+x2^2)^2", 2);
    CHECK(eval_at(e, {0.0, 0.0}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(eval_at(e, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    Jet j = eval_jet(e, std::vector<double>{0.0, 0.0}, 2);
    CHECK(j.val() == doctest::Approx(4.0));
    CHECK(std::fabs(j.d1(0)) < 1e-15);
    CHECK(std::fabs(j.d1(1)) < 1e-15);
}

TEST_CASE("variable index beyond the dimension is rejected") {
    CHECK_THROWS_AS(parse("x3", 2), DimensionOutOfRangeError);
    CHECK_NOTHROW(parse("x3", 3));
}

TEST_CASE("trailing operator is a syntax error with its byte offset") {
    try {
        parse("sin(x1)*", 1);
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 8);
    }
}

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(parse("", 1), ParseError);
}

TEST_CASE("unknown identifiers are rejected unless declared as parameters") {
    CHECK_THROWS_AS(parse("q+1", 2), UnknownIdentifierError);
    Expr e = parse("q+1", 2, {"q"});
    CHECK(eval_at(e, {0.0, 0.0}, {{"q", 2.5}}) == doctest::Approx(3.5));
    CHECK_THROWS_AS(eval_at(e, {0.0, 0.0}, {}), EvaluationError);
}

TEST_CASE("jet of x1^2 at x1=3") {
    Expr e = parse("x1^2", 1);
    Jet j = eval_jet(e, std::vector<double>{3.0}, 2);
    CHECK(j.val() == doctest::Approx(9.0));
    CHECK(j.d1(0) == doctest::Approx(6.0));
    CHECK(j.d2(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("pole evaluation raises DomainError") {
    Expr e = parse("1/x1", 1);
    CHECK_THROWS_AS(eval_jet(e, std::vector<double>{0.0}, 1), DomainError);
    CHECK_THROWS_AS(parse("ln(x1)", 1).eval_d(std::vector<double>{-1.0}), DomainError);
    CHECK_THROWS_AS(parse("sqrt(x1)", 1).eval_d(std::vector<double>{-4.0}), DomainError);
}

TEST_CASE("power semantics") {
    // right associativity
    CHECK(eval_at(parse("2^3^2", 1), {0.0}) == doctest::Approx(512.0));
    // unary minus binds looser than the power
    CHECK(eval_at(parse("-x1^2", 1), {3.0}) == doctest::Approx(-9.0));
    // exponent may itself be negated
    CHECK(eval_at(parse("x1^-2", 1), {2.0}) == doctest::Approx(0.25));
    // rational constant exponents
    Expr r = parse("x1^(3/2)", 1);
    CHECK(eval_at(r, {4.0}) == doctest::Approx(8.0).epsilon(1e-14));
    Jet j = eval_jet(r, std::vector<double>{4.0}, 1);
    CHECK(j.d1(0) == doctest::Approx(3.0).epsilon(1e-13));
    // non-constant exponent over a positive literal base becomes exp/ln
    CHECK(eval_at(parse("2^x1", 1), {3.0}) == doctest::Approx(8.0).epsilon(1e-13));
    // non-constant exponent over a general base is rejected
    CHECK_THROWS_AS(parse("x1^x2", 2), ParseError);
}

TEST_CASE("integer power of a negative base stays exact") {
    CHECK(eval_at(parse("x1^3", 1), {-2.0}) == doctest::Approx(-8.0));
    CHECK(eval_at(parse("(0-2)^2", 1), {0.0}) == doctest::Approx(4.0));
}

TEST_CASE("abs evaluates and differentiates away from zero") {
    Expr e = parse("abs(x1)", 1);
    CHECK(eval_at(e, {-3.0}) == doctest::Approx(3.0));
    Jet j = eval_jet(e, std::vector<double>{-3.0}, 1);
    CHECK(j.d1(0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(eval_jet(e, std::vector<double>{0.0}, 1), DomainError);
}

TEST_CASE("random cubic polynomials differentiate exactly") {
    // Dyadic coefficients and sample points keep every operation exact in
    // binary64, so the comparison is equality, not a tolerance.
    CounterRng rng(99);
    const std::array<double, 6> points{-1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    for (int trial = 0; trial < 30; ++trial) {
        SampleStream s(rng, static_cast<std::uint64_t>(trial));
        // c0 + c1 x + c2 y + c3 x^2 + c4 x y + c5 y^2 + c6 x^3 + c7 x^2 y + c8 x y^2 + c9 y^3
        std::array<int, 10> c;
        for (auto& v : c) v = static_cast<int>(s.uniform(0.0, 7.0)) - 3;
        std::string text = std::to_string(c[0]) + "+" + std::to_string(c[1]) + "*x1+" +
                           std::to_string(c[2]) + "*x2+" + std::to_string(c[3]) + "*x1^2+" +
                           std::to_string(c[4]) + "*x1*x2+" + std::to_string(c[5]) + "*x2^2+" +
                           std::to_string(c[6]) + "*x1^3+" + std::to_string(c[7]) + "*x1^2*x2+" +
                           std::to_string(c[8]) + "*x1*x2^2+" + std::to_string(c[9]) + "*x2^3";
        Expr e = parse(text, 2);
        double X = points[static_cast<std::size_t>(s.uniform(0.0, 6.0))];
        double Y = points[static_cast<std::size_t>(s.uniform(0.0, 6.0))];
        Jet j = eval_jet(e, std::vector<double>{X, Y}, 3);

        double fx = c[1] + 2.0 * c[3] * X + c[4] * Y + 3.0 * c[6] * X * X + 2.0 * c[7] * X * Y + c[8] * Y * Y;
        double fy = c[2] + c[4] * X + 2.0 * c[5] * Y + c[7] * X * X + 2.0 * c[8] * X * Y + 3.0 * c[9] * Y * Y;
        double fxx = 2.0 * c[3] + 6.0 * c[6] * X + 2.0 * c[7] * Y;
        double fxy = c[4] + 2.0 * c[7] * X + 2.0 * c[8] * Y;
        double fyy = 2.0 * c[5] + 2.0 * c[8] * X + 6.0 * c[9] * Y;
        double fxxy = 2.0 * c[7];

        CHECK(j.d1(0) == fx);
        CHECK(j.d1(1) == fy);
        CHECK(j.d2(0, 0) == fxx);
        CHECK(j.d2(0, 1) == fxy);
        CHECK(j.d2(1, 1) == fyy);
        CHECK(j.d3(0, 0, 1) == fxxy);
        CHECK(j.d3(0, 0, 0) == 6.0 * c[6]);
    }
}

TEST_CASE("jet first derivatives of all supported functions match central differences") {
    const std::vector<std::pair<std::string, double>> cases = {
        {"sqrt(x1+2)", 0.7},   {"exp(x1)", -0.4},       {"ln(x1+3)", 0.2},
        {"sin(x1)", 1.1},      {"cos(x1)", -2.0},       {"abs(x1)", 0.8},
        {"x1^2", 1.3},         {"x1^(1/2)", 2.2},       {"1/(1+x1^2)", 0.5},
        {"2^x1", 0.9},         {"x1^3/(2+sin(x1))", 0.6},
    };
    FDOracle oracle(1e-5);
    for (const auto& [text, x0] : cases) {
        Expr e = parse(text, 1);
        Jet j = eval_jet(e, std::vector<double>{x0}, 1);
        ScalarFn f = [&](std::span<const double> p) { return e.eval_d(p); };
        std::vector<double> x{x0};
        double fd = fd_gradient(f, x, oracle)[0];
        double scale = std::max(1.0, std::fabs(fd));
        CHECK(std::fabs(j.d1(0) - fd) / scale < 1e-6);
    }
}

TEST_CASE("round trip: parse(print(parse(s))) equals parse(s) on a grammar corpus") {
    const std::vector<std::string> corpus = {
        "1", "0.5", "1e-3", "2.5e2", "x1", "x2", "-x1", "--x1",
        "x1+x2", "x1-x2", "x1*x2", "x1/x2", "x1+x2+x1", "x1-x2-x1",
        "x1-(x2-x1)", "x1/(x2/x1)", "x1*x2+x1", "(x1+x2)*x1",
        "x1^2", "x1^3", "x1^-1", "x1^(3/2)", "2^3^2", "-x1^2", "(-x1)^2",
        "sqrt(x1^2+x2^2)", "exp(-x1)", "ln(1+x1^2)", "sin(x1)*cos(x2)",
        "abs(x1-x2)", "4/(1+x1^2+x2^2)^2", "1/(2*x1)", "x1*x1*x1",
        "(x1+x2)^2", "(x1*x2)^3", "x1^2*x2^2", "x1^2+x2^2-1",
        "0.3*x1", "-0.15*x1", "-(x1+x2)", "1-x1^2-x2^2",
        "(x1^2+x2^2-1)/2-x1^2", "-x2-x1*x2", "x1-x2*x1",
        "sin(cos(x1))", "sqrt(abs(x1))", "exp(ln(x1+2))",
        "1/2", "3/4*x1", "x1/2/3", "2*x1^2-3*x2^2+x1*x2",
        "c*x1", "c+d*x2", "2^x1",
    };
    int checked = 0;
    for (const auto& s : corpus) {
        Expr first = parse(s, 2, {"c", "d"});
        Expr second = parse(print(first), 2, {"c", "d"});
        CHECK_MESSAGE(first == second, "round trip failed for: ", s, " -> ", print(first));
        ++checked;
    }
    CHECK(checked >= 50);
}

TEST_CASE("printer emits minimal parentheses that preserve structure") {
    CHECK(print(parse("x1+x2*x1", 2)) == "x1+x2*x1");
    CHECK(print(parse("(x1+x2)*x1", 2)) == "(x1+x2)*x1");
    CHECK(print(parse("x1-(x2-x1)", 2)) == "x1-(x2-x1)");
    CHECK(print(parse("x1^2", 2)) == "x1^2");
}

TEST_CASE("expression construction helpers mirror parsed forms") {
    Expr sum = Expr::add(Expr::var(0), Expr::number(1.0));
    CHECK(sum == parse("x1+1", 1));
    Expr p = Expr::pow_int(Expr::var(1), 2);
    CHECK(p == parse("x2^2", 2));
    CHECK(Expr::mul(Expr::neg(Expr::number(0.5)), Expr::var(0)) == parse("-0.5*x1", 1));
}

TEST_CASE("max_var reports the highest referenced coordinate") {
    CHECK(parse("x1+x2", 3).max_var() == 2);
    CHECK(parse("1+2", 3).max_var() == 0);
}

} // TEST_SUITE
