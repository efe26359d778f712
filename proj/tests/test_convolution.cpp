#include <cmath>

#include "doctest.h"
#include "opkernel/convolution.hpp"
#include "test_helpers.hpp"

using namespace opkernel;
using namespace opkernel::testing;

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

QuadratureRule conv_rule() { return rule_of(12, 0.0); }

double direct_convolution_at(const FuncExpr& f, const FuncExpr& g, double t,
                             const Interval& window) {
    // independent oracle: integrate f(t-u) g(u) over the window with its own
    // panel alignment
    const QuadratureRule rule = rule_of(16, (window.hi - window.lo) / 64);
    std::vector<double> breaks = g.breakpoints(window.lo, window.hi);
    for (double b : f.breakpoints(t - window.hi, t - window.lo)) breaks.push_back(t - b);
    std::sort(breaks.begin(), breaks.end());
    const Grid1D grid = build_grid(LebesgueSet::interval(window.lo, window.hi), breaks, rule);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        acc += grid.weights[i] * f(t - grid.points[i]) * g(grid.points[i]);
    }
    return acc;
}

}  // namespace

TEST_CASE("indicator convolution is the triangular hat") {
    const FuncExpr box = FuncExpr::parse("ind(0,1)");
    const GridFunction conv = convolve(box, box, Interval{-20.0, 20.0}, conv_rule());
    for (std::size_t i = 0; i < conv.size(); ++i) {
        const double t = conv.grid.points[i];
        const double expected = (t >= 0.0 && t <= 2.0) ? 1.0 - std::abs(t - 1.0) : 0.0;
        CHECK(std::abs(conv.values[i] - expected) < 1e-10);
    }
}

TEST_CASE("convolving with zero vanishes") {
    const GridFunction conv = convolve(FuncExpr::parse("ind(0,1)"), FuncExpr::constant(0),
                                       Interval{-20.0, 20.0}, conv_rule());
    for (double v : conv.values) CHECK(v == 0.0);
}

TEST_CASE("convolution norm inequality holds on the fixture profiles") {
    const Interval window{-20.0, 20.0};
    const QuadratureRule rule = conv_rule();
    const LebesgueSet dom = LebesgueSet::interval(window.lo, window.hi);
    const std::pair<const char*, const char*> pairs[] = {
        {"ind(0,1)", "ind(0,1)"},
        {"exp(0-t^2)", "exp(0-t^2/2)"},
        {"ind(-1,1)", "exp(0-t^2)"},
        {"ind(0,1)-ind(1,2)", "exp(0-t^2/3)"},
    };
    for (auto [ftext, gtext] : pairs) {
        const FuncExpr f = FuncExpr::parse(ftext);
        const FuncExpr g = FuncExpr::parse(gtext);
        const GridFunction conv = convolve(f, g, window, rule);
        const double f1 = lp_norm(f, dom, 1.0, rule);
        for (double p : {1.0, 2.0, kInfNorm}) {
            CHECK(lp_norm(conv, p) <= f1 * lp_norm(g, dom, p, rule) + 1e-9);
        }
    }
}

TEST_CASE("convolution commutes") {
    const Interval window{-20.0, 20.0};
    const QuadratureRule rule = conv_rule();
    const std::pair<const char*, const char*> pairs[] = {
        {"ind(0,1)", "ind(2,3)"},
        {"exp(0-t^2)", "exp(0-t^2/2)"},
        {"ind(0,1)", "exp(0-t^2)"},
    };
    for (auto [ftext, gtext] : pairs) {
        const FuncExpr f = FuncExpr::parse(ftext);
        const FuncExpr g = FuncExpr::parse(gtext);
        const GridFunction fg = convolve(f, g, window, rule);
        const GridFunction gf = convolve(g, f, window, rule);
        REQUIRE(fg.size() == gf.size());
        double scale = lp_norm(fg, kInfNorm);
        for (std::size_t i = 0; i < fg.size(); ++i) {
            CHECK(std::abs(fg.values[i] - gf.values[i]) <= 1e-10 * (1.0 + scale));
        }
    }
}

TEST_CASE("support additivity for compact profiles") {
    const QuadratureRule rule = conv_rule();
    const Interval window{-20.0, 20.0};
    const AeTolerance tol = AeTolerance::defaults_for(40.0);
    const FuncExpr f = FuncExpr::parse("ind(0,1)");
    const FuncExpr g = FuncExpr::parse("ind(2,3)");
    const GridFunction conv = convolve(f, g, window, rule);
    double lo = 0.0, hi = 0.0;
    REQUIRE(numeric_support(conv, tol, &lo, &hi));
    const double panel = 40.0 / 32.0;
    CHECK(std::abs(lo - 2.0) <= panel);
    CHECK(std::abs(hi - 4.0) <= panel);
}

TEST_CASE("fast and direct convolution paths agree") {
    const Interval window{-20.0, 20.0};
    const QuadratureRule rule = conv_rule();
    const FuncExpr f = FuncExpr::parse("exp(0-t^2)");
    const FuncExpr g = FuncExpr::parse("exp(0-t^2/2)");
    const GridFunction fast = convolve(f, g, window, rule);  // smooth: fft path
    double scale = lp_norm(fast, kInfNorm);
    for (int probe = 0; probe < 15; ++probe) {
        const std::size_t i = (probe * 131) % fast.size();
        const double t = fast.grid.points[i];
        const double direct = direct_convolution_at(f, g, t, window);
        CHECK(std::abs(fast.values[i] - direct) <= 1e-8 * (1.0 + scale));
    }
}

TEST_CASE("divergent truncation is rejected") {
    CHECK_THROWS_AS(convolve(FuncExpr::parse("exp(t)"), FuncExpr::parse("ind(0,1)"),
                             Interval{-20.0, 20.0}, conv_rule()),
                    std::invalid_argument);
}

TEST_CASE("transform grids") {
    const QuadratureRule rule = conv_rule();
    const auto s_grid = default_laplace_grid();
    REQUIRE(s_grid.size() == 101);
    CHECK(s_grid.front() == doctest::Approx(-3.0));
    CHECK(s_grid.back() == doctest::Approx(3.0));

    SUBCASE("box profile matches the closed form") {
        const LaplaceGrid lg = laplace_transform(FuncExpr::parse("ind(0,1)"), s_grid,
                                                 Interval{-20.0, 20.0}, rule);
        for (std::size_t i = 0; i < lg.s_points.size(); ++i) {
            const double s = lg.s_points[i];
            const double expected = std::abs(s) < 1e-12 ? 1.0 : (1.0 - std::exp(-s)) / s;
            CHECK(lg.values[i] == doctest::Approx(expected).epsilon(1e-10));
            CHECK(lg.stable[i]);
        }
    }

    SUBCASE("zero profile transforms to zero") {
        const LaplaceGrid lg = laplace_transform(FuncExpr::constant(0), s_grid,
                                                 Interval{-20.0, 20.0}, rule);
        for (double v : lg.values) CHECK(v == 0.0);
    }

    SUBCASE("gaussian transform matches the square completion") {
        const LaplaceGrid lg = laplace_transform(FuncExpr::parse("exp(0-t^2)"), s_grid,
                                                 Interval{-20.0, 20.0}, rule);
        for (std::size_t i = 0; i < lg.s_points.size(); ++i) {
            const double s = lg.s_points[i];
            const double expected = kSqrtPi * std::exp(s * s / 4.0);
            CHECK(lg.values[i] == doctest::Approx(expected).epsilon(1e-8));
        }
    }

    SUBCASE("two-sided exponential growth is flagged unstable") {
        const LaplaceGrid lg = laplace_transform(FuncExpr::parse("exp(0-t)"), s_grid,
                                                 Interval{-20.0, 20.0}, rule);
        CHECK_FALSE(lg.stable_everywhere());
    }
}

TEST_CASE("transform-support check for the polynomial relation") {
    const QuadratureRule rule = conv_rule();
    const AeTolerance tol = AeTolerance::defaults_for(6.0);
    const FuncExpr g1 = FuncExpr::parse("exp(0-t^2)");
    const FuncExpr g2 = FuncExpr::parse("exp(0-t^2/2)");

    SUBCASE("the identity polynomial always passes") {
        const CheckReport report = check_conv_poly(g1, g2, Polynomial({0.0, 1.0}), tol, rule);
        CHECK(report.verdict == "pass");
        CHECK(report.conditions[0].violation_measure == 0.0);
        CHECK(report.direct_residual < kOracleResidualPass);
    }

    SUBCASE("the quadratic fails with a fat overlap") {
        const CheckReport report =
            check_conv_poly(g1, g2, Polynomial({0.0, 0.0, 1.0}), tol, rule);
        CHECK(report.verdict == "fail");
        CHECK(report.conditions[0].violation_measure > 1.0);
        CHECK(report.direct_residual > 1e-3);
    }

    SUBCASE("a vanishing right profile passes vacuously") {
        const CheckReport report =
            check_conv_poly(g1, FuncExpr::constant(0), Polynomial({0.0, 0.0, 1.0}), tol, rule);
        CHECK(report.verdict == "pass");
    }

    SUBCASE("a nonzero constant term is rejected") {
        CHECK_THROWS_AS(check_conv_poly(g1, g2, Polynomial({1.0, 1.0}), tol, rule),
                        std::invalid_argument);
    }
}

TEST_CASE("profile-convolution check for monomial relations") {
    const QuadratureRule rule = conv_rule();
    const AeTolerance tol = AeTolerance::defaults_for(40.0);

    SUBCASE("disjoint boxes fail: their convolution is a hat") {
        const CheckReport report = check_conv_monomial(
            FuncExpr::parse("ind(0,1)"), FuncExpr::parse("ind(2,3)"), 1.0, 2, tol, rule);
        CHECK(report.verdict == "fail");
        CHECK(report.direct_residual > 1e-3);
        bool diagnostic = false;
        for (const auto& note : report.notes) {
            if (note.find("support additivity") != std::string::npos) diagnostic = true;
        }
        CHECK(diagnostic);
    }

    SUBCASE("zero left profile passes") {
        const CheckReport report = check_conv_monomial(
            FuncExpr::constant(0), FuncExpr::parse("ind(0,1)"), 1.0, 2, tol, rule);
        CHECK(report.verdict == "pass");
    }

    SUBCASE("gaussian pair fails with a large direct residual") {
        const CheckReport report = check_conv_monomial(
            FuncExpr::parse("exp(0-t^2)"), FuncExpr::parse("exp(0-t^2/2)"), 1.0, 2, tol, rule);
        CHECK(report.verdict == "fail");
        CHECK(report.direct_residual > 1e-3);
    }

    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(check_conv_monomial(FuncExpr::constant(0), FuncExpr::constant(0), 0.0,
                                            2, tol, rule),
                        std::invalid_argument);
        CHECK_THROWS_AS(check_conv_monomial(FuncExpr::constant(0), FuncExpr::constant(0), 1.0,
                                            1, tol, rule),
                        std::invalid_argument);
    }
}

TEST_CASE("one-sided monomial relations are impossible for nonzero profiles") {
    const QuadratureRule rule = conv_rule();
    const AeTolerance tol = AeTolerance::defaults_for(40.0);

    SUBCASE("two boxes fail with numerical corroboration") {
        const CheckReport report = check_one_sided_monomial(
            FuncExpr::parse("ind(0,1)"), FuncExpr::parse("ind(0,1)"), 1.0, 2, tol, rule);
        CHECK(report.verdict == "fail");
        CHECK(report.direct_residual > 1e-3);
    }

    SUBCASE("zero right profile is degenerate and passes") {
        const CheckReport report = check_one_sided_monomial(
            FuncExpr::parse("ind(0,1)"), FuncExpr::constant(0), 1.0, 2, tol, rule);
        CHECK(report.verdict == "pass");
    }

    SUBCASE("decaying exponential against a box fails") {
        const CheckReport report = check_one_sided_monomial(
            FuncExpr::parse("exp(0-t)*ind(0,20)"), FuncExpr::parse("ind(0,1)"), 1.0, 2, tol,
            rule);
        CHECK(report.verdict == "fail");
        CHECK(report.direct_residual > 1e-3);
    }

    SUBCASE("negative-support profiles are rejected") {
        CHECK_THROWS_AS(check_one_sided_monomial(FuncExpr::parse("ind(-1,1)"),
                                                 FuncExpr::parse("ind(0,1)"), 1.0, 2, tol,
                                                 rule),
                        std::invalid_argument);
    }
}
