#include <cmath>
#include <random>

#include "doctest.h"
#include "opkernel/func_expr.hpp"

using namespace opkernel;

TEST_CASE("parse with constant folding and scaling") {
    const FuncExpr f = FuncExpr::parse("2/3.14159*(cos(t))");
    CHECK(f(0.0) == doctest::Approx(2.0 / 3.14159));
    CHECK(f(1.0) == doctest::Approx(2.0 / 3.14159 * std::cos(1.0)));
}

TEST_CASE("parse indicators") {
    const FuncExpr f = FuncExpr::parse("ind(0,0.5)");
    CHECK(f(0.25) == 1.0);
    CHECK(f(0.75) == 0.0);
    CHECK(f(0.5) == 1.0);  // closed-set convention
    CHECK(f(0.0) == 1.0);
}

TEST_CASE("piecewise polynomial factor expression") {
    const FuncExpr f = FuncExpr::parse("ind(0,0.25)*(t^4+1)-ind(0.5,0.75)");
    CHECK(f(0.1) == doctest::Approx(1.0001));
    CHECK(f(0.6) == doctest::Approx(-1.0));
    CHECK(f(0.9) == 0.0);
}

TEST_CASE("eval basics") {
    CHECK(FuncExpr::indicator(LebesgueSet::interval(0, 1))(0.5) == 1.0);
    CHECK(FuncExpr::indicator(LebesgueSet::interval(0, 1))(2.0) == 0.0);
    CHECK(FuncExpr::parse("ind(0,0.25)*(t^4+1)")(0.1) == doctest::Approx(1.0001));
    CHECK(FuncExpr::parse("exp(0-t)")(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(FuncExpr::parse("-t^2")(3.0) == doctest::Approx(-9.0));
}

TEST_CASE("breakpoints collect indicator endpoints plus window ends") {
    auto b = FuncExpr::parse("ind(0,0.5)").breakpoints(0.0, 1.0);
    CHECK(b == std::vector<double>{0.0, 0.5, 1.0});

    const double pi = 3.14159265358979323846;
    b = FuncExpr::parse("sin(t)").breakpoints(0.0, pi);
    CHECK(b == std::vector<double>{0.0, pi});

    b = FuncExpr::parse("ind(0.25,0.5)*(t^2+1)+ind(0.75,1)").breakpoints(0.0, 1.0);
    CHECK(b == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("print/parse round trip is stable") {
    const char* samples[] = {
        "2/3.14159*(cos(t))",
        "ind(0,0.25)*(t^4+1)-ind(0.5,0.75)",
        "sin(2*t)*cos(t)+exp(0-t^2)",
        "-t^3+0.5*t-1",
        "ind(0.25,0.5)*(t^2+1)+ind(0.75,1)",
    };
    for (const char* text : samples) {
        const FuncExpr once = FuncExpr::parse(text);
        const FuncExpr twice = FuncExpr::parse(once.to_string());
        CHECK(once == twice);
        CHECK(once.to_string() == twice.to_string());
    }
}

TEST_CASE("evaluation is continuous away from breakpoints") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    const FuncExpr f = FuncExpr::parse("ind(0,0.25)*(t^4+1)-ind(0.5,0.75)+sin(3*t)");
    const auto breaks = f.breakpoints(0.0, 1.0);
    const double h = 1e-8;
    for (int i = 0; i < 200; ++i) {
        const double t = pick(rng);
        bool near_break = false;
        for (double b : breaks) {
            if (std::abs(t - b) < 1e-6) near_break = true;
        }
        if (near_break) continue;
        const double left = f(t - h), right = f(t + h);
        CHECK(std::abs(left - right) <= 1e-6 * (1.0 + std::abs(f(t))));
    }
}

TEST_CASE("simple function equals its expression expansion") {
    const OrderedPartition part(0.0, 1.0,
                                {LebesgueSet::interval(0.0, 0.25),
                                 LebesgueSet::interval(0.25, 0.7),
                                 LebesgueSet::interval(0.7, 1.0)});
    const SimpleFunction sf(part, {2.0, -1.0, 0.5});
    const FuncExpr expanded = sf.to_expr();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double t = pick(rng);
        if (std::abs(t - 0.25) < 1e-9 || std::abs(t - 0.7) < 1e-9) continue;
        CHECK(sf(t) == doctest::Approx(expanded(t)));
    }
    CHECK_THROWS_AS(SimpleFunction(part, {1.0}), std::invalid_argument);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(FuncExpr::parse("2*+3"), ParseError);
    CHECK_THROWS_AS(FuncExpr::parse("sin(t"), ParseError);
    CHECK_THROWS_AS(FuncExpr::parse("t^-1"), ParseError);
    CHECK_THROWS_AS(FuncExpr::parse("2/t"), ParseError);
    CHECK_THROWS_AS(FuncExpr::parse("1/0"), ParseError);
    CHECK_THROWS_AS(FuncExpr::parse("1/(2-2)"), ParseError);

    try {
        FuncExpr::parse("2*foo(t)");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 2);
        CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
}

TEST_CASE("bivariate expressions") {
    const FuncExpr k = FuncExpr::parse_bivariate("cos(t)*sin(s)+ind(0,0.5,s)");
    CHECK(k(0.0, 1.0) == doctest::Approx(std::sin(1.0)));
    CHECK(k(0.0, 0.25) == doctest::Approx(std::sin(0.25) + 1.0));
    CHECK(k.uses_axis(Axis::S));
    CHECK(k.breakpoints(0.0, 1.0, Axis::S) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(k.breakpoints(0.0, 1.0, Axis::T) == std::vector<double>{0.0, 1.0});

    CHECK_THROWS_AS(FuncExpr::parse("cos(s)"), ParseError);
    const FuncExpr rt = FuncExpr::parse_bivariate(k.to_string());
    CHECK(rt == k);
}
