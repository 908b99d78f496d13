#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "solnil/expr.hpp"

using namespace solnil;

static double eval(const std::string& text, const std::vector<double>& y, int dim = 3) {
    return expr::evaluate(expr::parse(text, dim), y);
}

TEST_CASE("expression parser basics") {
    REQUIRE(eval("1 + 2*3", {}) == 7.0);
    REQUIRE(eval("(1 + 2)*3", {}) == 9.0);
    REQUIRE(eval("-y1 + y2/2", {4.0, 6.0, 0.0}) == -1.0);
    REQUIRE(eval("y1*y1 - y3", {2.0, 0.0, 1.0}) == 3.0);
    REQUIRE(eval("exp(2*y3)", {0.0, 0.0, 0.5}) == Catch::Approx(std::exp(1.0)));
    REQUIRE(eval("pow(y1, 3)", {2.0, 0.0, 0.0}) == 8.0);
    REQUIRE(eval("y1^2 + 1", {3.0, 0.0, 0.0}) == 10.0);
    REQUIRE(eval("2e-3 * y2", {0.0, 500.0, 0.0}) == 1.0);
}

TEST_CASE("expression parse errors") {
    REQUIRE_THROWS_AS(expr::parse("y1 +", 3), ParseError);
    REQUIRE_THROWS_AS(expr::parse("y4", 3), ParseError);
    REQUIRE_THROWS_AS(expr::parse("foo(y1)", 3), ParseError);
    REQUIRE_THROWS_AS(expr::parse("pow(y1, y2)", 3), ParseError);   // exponent must be constant
    REQUIRE_THROWS_AS(expr::parse("y1 ^ y2", 3), ParseError);
    REQUIRE_THROWS_AS(expr::parse("(y1", 3), ParseError);
    REQUIRE_THROWS_AS(expr::parse("y1 y2", 3), ParseError);
}

TEST_CASE("symbolic derivatives match finite differences") {
    const std::vector<std::string> exprs = {
        "exp(2*y3)", "y1*y1*y2 - y3/(1 + y2*y2)", "pow(1 + y1*y1, 2)",
        "exp(-y2)*y1 + y3^3", "(y1 + 2*y2)*(y3 - 1)/(2 + y1*y1)"};
    const std::vector<double> p{0.7, -0.4, 0.3};
    const double h = 1e-5;
    for (const auto& text : exprs) {
        expr::NodePtr e = expr::parse(text, 3);
        for (int var = 0; var < 3; ++var) {
            expr::NodePtr d = expr::simplify(expr::differentiate(e, var));
            std::vector<double> pp = p, pm = p;
            pp[var] += h;
            pm[var] -= h;
            const double fd = (expr::evaluate(e, pp) - expr::evaluate(e, pm)) / (2.0 * h);
            REQUIRE(expr::evaluate(d, p) == Catch::Approx(fd).margin(1e-8));
        }
    }
}

TEST_CASE("simplify folds constants") {
    auto e = expr::parse("0*y1 + 1*y2 + 0 + 2*3", 3);
    // evaluates correctly and the tree is small enough to print compactly
    REQUIRE(expr::evaluate(e, {5.0, 7.0, 0.0}) == 13.0);
    REQUIRE(expr::to_string(e).size() < 30);
}
