#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace opkernel;
using namespace opkernel::testing;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("kernel evaluation per structural form") {
    const LebesgueSet unit = LebesgueSet::interval(0, 1);

    const Kernel sep = Kernel::separable(FuncExpr::parse("sin(t)"), FuncExpr::parse("cos(t)"),
                                         LebesgueSet::interval(0.0, kPi));
    CHECK(sep(kPi / 2, 0.0) == doctest::Approx(1.0));

    const Kernel vol = unit_volterra(0.0, 0.0, 1.0);
    CHECK(vol(0.3, 0.7) == 0.0);   // above the diagonal
    CHECK(vol(0.7, 0.3) == 1.0);
    CHECK(vol(0.7, 0.7) == 1.0);   // diagonal included
    CHECK(vol(0.5, -0.1) == 0.0);  // below the lower limit

    CHECK(trig_kernel_a()(0.0, 0.0) == doctest::Approx(2.0 / kPi));

    const Kernel conv = Kernel::convolution(FuncExpr::parse("exp(0-t^2)"), true, unit);
    CHECK(conv(1.0, 2.0) == 0.0);  // one-sided cut
    CHECK(conv(2.0, 1.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("composition of constant kernels") {
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    const Kernel one = Kernel::separable(FuncExpr::constant(1), FuncExpr::constant(1), unit);
    const GridKernel out = compose_kernels(one, unit, one, rule_of(6, 0.25));
    for (double v : out.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("composition of the trig pair matches the orthogonality oracle") {
    const Kernel ka = trig_kernel_a();
    const Kernel kb = trig_kernel_b();
    const GridKernel out =
        compose_kernels(ka, LebesgueSet::interval(0.0, kPi), kb, rule_of(12, kPi / 32));
    double worst = 0.0;
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        for (std::size_t j = 0; j < out.s.size(); ++j) {
            const double expected = trig_ab_composition(out.t.points[i], out.s.points[j]);
            worst = std::max(worst, std::abs(out.at(i, j) - expected));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("composition of the unit volterra kernel is exact across the diagonal") {
    const Kernel vol = unit_volterra(0.0, 0.0, 1.0);
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    const GridKernel out = compose_kernels(vol, unit, vol, rule_of(8, 0.125));
    double worst = 0.0;
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        const double t = out.t.points[i];
        for (std::size_t j = 0; j < out.s.size(); ++j) {
            const double s = out.s.points[j];
            const double expected = s <= t ? t - s : 0.0;
            worst = std::max(worst, std::abs(out.at(i, j) - expected));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("iterated kernels") {
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    const Kernel vol = unit_volterra(0.0, 0.0, 1.0);
    const QuadratureRule rule = rule_of(8, 0.25);

    SUBCASE("order zero samples the kernel") {
        const GridKernel k0 = iterated_kernel(vol, unit, 0, rule);
        for (std::size_t i = 0; i < k0.t.size(); ++i) {
            for (std::size_t j = 0; j < k0.s.size(); ++j) {
                CHECK(k0.at(i, j) == vol(k0.t.points[i], k0.s.points[j]));
            }
        }
    }

    SUBCASE("order one equals plain composition") {
        const GridKernel k1 = iterated_kernel(vol, unit, 1, rule);
        const GridKernel direct = compose_kernels(vol, unit, vol, rule);
        for (std::size_t i = 0; i < k1.values.size(); ++i) {
            CHECK(std::abs(k1.values[i] - direct.values[i]) < 1e-13);
        }
    }

    SUBCASE("second volterra iterate matches the closed form") {
        const GridKernel k2 = iterated_kernel(vol, unit, 2, rule);
        double worst = 0.0;
        for (std::size_t i = 0; i < k2.t.size(); ++i) {
            const double t = k2.t.points[i];
            for (std::size_t j = 0; j < k2.s.size(); ++j) {
                const double s = k2.s.points[j];
                const double expected = s <= t ? 0.5 * (t - s) * (t - s) : 0.0;
                worst = std::max(worst, std::abs(k2.at(i, j) - expected));
            }
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("iterated kernels match the brute-force nested oracle") {
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    const QuadratureRule impl_rule = rule_of(12, 0.125);
    const QuadratureRule oracle_rule = rule_of(8, 0.125);
    std::mt19937_64 rng(29);

    SUBCASE("fixed-structure kernel") {
        const Kernel k = random_general_kernel(rng);
        const GridKernel k2 = iterated_kernel(k, unit, 2, impl_rule);
        double scale = k2.sup_abs();
        for (int probe = 0; probe < 12; ++probe) {
            const std::size_t i = (probe * 37) % k2.t.size();
            const std::size_t j = (probe * 53) % k2.s.size();
            const double oracle = nested_oracle(k, unit, 2, k2.t.points[i], k2.s.points[j],
                                                oracle_rule);
            CHECK(std::abs(k2.at(i, j) - oracle) < 1e-9 * (1.0 + scale));
        }
    }

    SUBCASE("triangular kernel") {
        const Kernel vol = unit_volterra(0.0, 0.0, 1.0);
        const GridKernel k2 = iterated_kernel(vol, unit, 2, rule_of(6, 0.25));
        for (int probe = 0; probe < 8; ++probe) {
            const std::size_t i = (probe * 41) % k2.t.size();
            const std::size_t j = (probe * 59) % k2.s.size();
            const double oracle = nested_oracle(vol, unit, 2, k2.t.points[i], k2.s.points[j],
                                                oracle_rule);
            CHECK(std::abs(k2.at(i, j) - oracle) < 1e-9);
        }
    }
}

TEST_CASE("polynomial kernel calculus") {
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    const Kernel vol = unit_volterra(0.0, 0.0, 1.0);
    const QuadratureRule rule = rule_of(8, 0.25);

    SUBCASE("F(z) = z returns the sampled kernel") {
        const GridKernel out = polynomial_kernel(vol, unit, Polynomial({0.0, 1.0}), rule);
        for (std::size_t i = 0; i < out.t.size(); ++i) {
            for (std::size_t j = 0; j < out.s.size(); ++j) {
                CHECK(out.at(i, j) == doctest::Approx(vol(out.t.points[i], out.s.points[j])));
            }
        }
    }

    SUBCASE("F(z) = z^2 yields the first iterate") {
        const GridKernel out = polynomial_kernel(vol, unit, Polynomial({0.0, 0.0, 1.0}), rule);
        for (std::size_t i = 0; i < out.t.size(); ++i) {
            const double t = out.t.points[i];
            for (std::size_t j = 0; j < out.s.size(); ++j) {
                const double s = out.s.points[j];
                const double expected = s <= t ? t - s : 0.0;
                CHECK(std::abs(out.at(i, j) - expected) < 1e-12);
            }
        }
    }

    SUBCASE("constant F has a zero integral part") {
        const GridKernel out = polynomial_kernel(vol, unit, Polynomial({3.5}), rule);
        for (double v : out.values) CHECK(v == 0.0);
    }

    SUBCASE("linear in the coefficients") {
        std::mt19937_64 rng(31);
        const Kernel k = random_general_kernel(rng);
        const Polynomial f1({0.0, 0.5, 2.0});
        const Polynomial f2({0.0, -1.0, 0.25, 0.5});
        const Polynomial sum({0.0, -0.5, 2.25, 0.5});
        const GridKernel a = polynomial_kernel(k, unit, f1, rule);
        const GridKernel b = polynomial_kernel(k, unit, f2, rule);
        const GridKernel c = polynomial_kernel(k, unit, sum, rule);
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            CHECK(std::abs(c.values[i] - (a.values[i] + b.values[i])) <
                  1e-12 * (1.0 + std::abs(c.values[i])));
        }
    }
}

TEST_CASE("composition is associative on a shared grid") {
    std::mt19937_64 rng(37);
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    const QuadratureRule rule = rule_of(8, 0.125);
    const Kernel k1 = random_general_kernel(rng);
    const Kernel k2 = random_general_kernel(rng);
    const Kernel k3 = random_general_kernel(rng);

    std::vector<double> breaks;
    for (const Kernel* k : {&k1, &k2, &k3}) {
        auto b = k->static_breakpoints_t(0.0, 1.0);
        breaks.insert(breaks.end(), b.begin(), b.end());
        b = k->static_breakpoints_s(0.0, 1.0);
        breaks.insert(breaks.end(), b.begin(), b.end());
    }
    std::sort(breaks.begin(), breaks.end());
    const Grid1D grid = build_grid(unit, breaks, rule);

    const GridKernel k12 = compose_kernels(k1, unit, k2, rule, grid, grid);
    const GridKernel left = compose_grid_left(k12, k3);
    const GridKernel k23 = compose_kernels(k2, unit, k3, rule, grid, grid);
    const GridKernel right = compose_grid_right(k1, k23, grid);

    double scale = std::max(left.sup_abs(), right.sup_abs());
    for (std::size_t i = 0; i < left.values.size(); ++i) {
        CHECK(std::abs(left.values[i] - right.values[i]) <= 1e-9 * (1.0 + scale));
    }
}

TEST_CASE("kernel norm bounds") {
    const QuadratureRule rule = rule_of(10, 0.125);
    const LebesgueSet unit = LebesgueSet::interval(0, 1);

    SUBCASE("constant kernel") {
        const Kernel one = Kernel::separable(FuncExpr::constant(1), FuncExpr::constant(1), unit);
        CHECK(kernel_norm_bound(one, Interval{0, 1}, kInfNorm, rule) == doctest::Approx(1.0));
        CHECK(kernel_norm_bound(one, Interval{0, 1}, 1.0, rule) == doctest::Approx(1.0));
        CHECK(kernel_norm_bound(one, Interval{0, 1}, 2.0, rule) == doctest::Approx(1.0));
    }

    SUBCASE("zero kernel") {
        const Kernel zero = Kernel::separable(FuncExpr::constant(0), FuncExpr::constant(1), unit);
        for (double p : {1.0, 2.0, kInfNorm}) {
            CHECK(kernel_norm_bound(zero, Interval{0, 1}, p, rule) == 0.0);
        }
        CHECK_THROWS_AS(kernel_norm_bound(zero, Interval{0, 1}, 0.5, rule),
                        std::invalid_argument);
    }

    SUBCASE("trig kernel stays under the crude analytic cap") {
        const Kernel ka = trig_kernel_a();
        const double bound =
            kernel_norm_bound(ka, Interval{0.0, kPi}, 2.0, rule_of(12, kPi / 32));
        CHECK(bound > 0.0);
        CHECK(bound < std::sqrt(36.0 * kPi * kPi));  // 6^p (beta-alpha) pi at p = 2
    }
}

TEST_CASE("polynomial basics") {
    const Polynomial f({1.0, 0.0, 2.0});
    CHECK(f.degree() == 2);
    CHECK(f(2.0) == doctest::Approx(9.0));
    CHECK(Polynomial({0.0, 0.0}).is_zero());
    CHECK(Polynomial::monomial(3.0, 2).coeff(2) == 3.0);
    CHECK(Polynomial::affine(1.0, -2.0)(0.5) == doctest::Approx(0.0));
    CHECK_THROWS_AS(Polynomial::monomial(1.0, -1), std::invalid_argument);
}
