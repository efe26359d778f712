// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Runs single-threaded so the timing gate is honest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "opkernel/convolution.hpp"
#include "opkernel/fixtures.hpp"
#include "opkernel/report.hpp"
#include "opkernel/volterra.hpp"

using namespace opkernel;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++g_failures;
}

QuadratureRule rule_of(int nodes, double width) {
    QuadratureRule r;
    r.nodes_per_panel = nodes;
    r.max_panel_width = width;
    return r;
}

std::string fmt(const char* pattern, double v) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

double action_sup(const IntegralOperator& op, const std::vector<GridFunction>& battery) {
    double worst = 0.0;
    for (const auto& x : battery) {
        worst = std::max(worst, l2_norm(apply(op, x)) / (1.0 + l2_norm(x)));
    }
    return worst;
}

Kernel random_general_kernel(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> freq(1, 3);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> cell(0, 3);
    auto factor = [&](Axis axis) {
        const FuncExpr v = FuncExpr::var(axis);
        switch (kind(rng)) {
            case 0: return sin(v.scaled(freq(rng))).scaled(coef(rng));
            case 1: return cos(v.scaled(freq(rng))).scaled(coef(rng));
            default: {
                const int c = cell(rng);
                return FuncExpr::indicator(LebesgueSet::interval(0.25 * c, 0.25 * (c + 1)),
                                           axis)
                    .scaled(coef(rng));
            }
        }
    };
    FuncExpr expr = factor(Axis::T) * factor(Axis::S) + factor(Axis::T) * factor(Axis::S);
    return Kernel::general(expr, LebesgueSet::interval(0.0, 1.0));
}

double nested_oracle(const Kernel& k, const LebesgueSet& g, int m, double t, double tau,
                     const QuadratureRule& rule) {
    if (m == 0) return k(t, tau);
    const LebesgueSet range = intersect(intersect(g, k.s_support_at(t)), k.t_support_at(tau));
    if (range.empty()) return 0.0;
    auto breaks = k.static_breakpoints_t(g.inf(), g.sup());
    auto more = k.static_breakpoints_s(g.inf(), g.sup());
    breaks.insert(breaks.end(), more.begin(), more.end());
    std::sort(breaks.begin(), breaks.end());
    const Grid1D grid = build_grid(range, breaks, rule);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        acc += grid.weights[i] * k(t, grid.points[i]) *
               nested_oracle(k, g, m - 1, grid.points[i], tau, rule);
    }
    return acc;
}

// ---------------------------------------------------------------------------

void criterion_1_and_2() {
    const auto start = std::chrono::steady_clock::now();

    const QuadratureRule rule = rule_of(12, kPi / 32);
    auto pair = fixtures::make_trig_pair(rule);
    const AeTolerance tol = AeTolerance::defaults_for(kPi * kPi);
    const auto battery = make_battery(pair.grid, 10, 1);
    const CheckReport check = check_monomial(pair.a, pair.b, 1.0, 2, tol, rule, battery);

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const bool pass1 = check.verdict == "pass" && check.conditions.size() == 1 &&
                       check.conditions[0].sup_residual < 1e-8 &&
                       check.direct_residual < 1e-8 && elapsed < 5.0;
    report(1, pass1,
           "trig pair satisfies AB = B A^2 (sup residual " +
               fmt("%.2e", check.conditions.empty() ? 1.0 : check.conditions[0].sup_residual) +
               ", direct " + fmt("%.2e", check.direct_residual) + ", " +
               fmt("%.2f", elapsed) + " s single-threaded)");

    const IntegralOperator a2 = compose_ops(pair.a, pair.a, pair.grid);
    const IntegralOperator ba2 = compose_ops(pair.b, a2, pair.grid);
    const bool nonvanishing = check_nonvanishing(ba2, tol, rule);
    const double sup = ba2.grid_kernel().sup_abs();
    const double golden = 1.8594164340869392;  // frozen from this build's quadrature
    const bool pass2 = nonvanishing && sup > 1e-3 && std::abs(sup - golden) < 1e-6;
    report(2, pass2,
           "composed B A^2 does not vanish (kernel sup " + fmt("%.12g", sup) + ", golden " +
               fmt("%.12g", golden) + ")");
}

void criterion_3() {
    const QuadratureRule rule = rule_of(12, 1.0 / 32);
    VolterraFactors f;
    f.a = FuncExpr::indicator(LebesgueSet::interval(0.0, 0.5));
    f.b = FuncExpr::indicator(LebesgueSet::interval(0.5, 1.0));
    f.c = FuncExpr::constant(1.0);
    f.e = FuncExpr::constant(1.0);

    const SeparableVolterra sva{f.a, f.c, 0.0, 1.0};
    const SeparableVolterra svb{f.b, f.e, 0.0, 1.0};
    const IntegralOperator a = sva.make_operator(2.0, rule);
    const IntegralOperator b = svb.make_operator(2.0, rule);
    const FuncExpr exprs[] = {f.a, f.b};
    const Grid1D grid = build_grid_for(LebesgueSet::interval(0, 1), exprs, rule);
    const auto battery = make_battery(grid, 10, 1);

    double ab = 0.0, ba2 = 0.0;
    for (const auto& x : battery) {
        const double nx = 1.0 + l2_norm(x);
        ab = std::max(ab, l2_norm(apply(a, apply(b, x))) / nx);
        ba2 = std::max(ba2, l2_norm(apply(b, apply(a, apply(a, x)))) / nx);
    }
    const bool pass = ab < 1e-10 && ba2 < 1e-10;
    report(3, pass,
           "half-split factors give AB = B A^2 = 0 (AB sup " + fmt("%.2e", ab) +
               ", B A^2 sup " + fmt("%.2e", ba2) +
               (pass ? ")" : ") -- B A^2 accumulates mass from [0,1/2] and is not zero"));
}

void criterion_4() {
    const QuadratureRule rule = rule_of(12, 1.0 / 32);
    VolterraFactors f;
    f.a = FuncExpr::parse("ind(0,0.25)-ind(0.75,1)");
    f.b = FuncExpr::parse("ind(0.25,0.75)");
    f.c = FuncExpr::constant(1.0);
    f.e = FuncExpr::constant(1.0);
    const AeTolerance tol = AeTolerance::defaults_for(1.0);
    const CheckReport check = check_simple_necessary(f, Polynomial::monomial(1.0, 2), tol, rule);

    const bool support_ok = !check.conditions.empty() && check.conditions[0].pass;
    const bool relation_holds = check.direct_residual < kOracleResidualPass;
    const bool pass = support_ok && !relation_holds && check.direct_residual > 1e-3;
    report(4, pass,
           "support condition holds while the relation fails (direct residual " +
               fmt("%.3e", check.direct_residual) + " > 1e-3)");
}

void criterion_5() {
    const QuadratureRule rule = rule_of(12, 1.0 / 32);
    const AeTolerance tol = AeTolerance::defaults_for(1.0);
    VolterraFactors f;
    f.a = FuncExpr::parse("ind(0,0.25)-ind(0.5,0.75)");
    f.b = FuncExpr::parse("ind(0.5,1)");
    f.c = FuncExpr::parse("ind(0,0.5)");
    f.e = FuncExpr::parse("ind(0.25,0.5)+ind(0.75,1)");

    bool pass = true;
    double worst = 0.0;
    for (int n : {2, 3}) {
        const CheckReport check =
            check_simple_sufficient(f, Polynomial::monomial(1.0, n), tol, rule);
        pass = pass && check.verdict == "pass";
        for (const auto& c : check.conditions) {
            if (c.region.find("action") != std::string::npos) {
                pass = pass && c.sup_residual < 1e-9;
                worst = std::max(worst, c.sup_residual);
            }
        }
    }

    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    const FuncExpr t = FuncExpr::var();
    const FuncExpr pa = FuncExpr::parse("ind(0,0.25)*(t^4+1)-ind(0.5,0.75)");
    const FuncExpr pe = FuncExpr::parse("ind(0.25,0.5)*(t^2+1)+ind(0.75,1)");
    const CheckReport both = check_both_zero(Kernel::separable(pa, f.c, unit),
                                             Kernel::separable(f.b, pe, unit), 0.0, 1.0, tol,
                                             rule);
    pass = pass && both.verdict == "pass" && both.direct_residual < 1e-9;
    worst = std::max(worst, both.direct_residual);
    report(5, pass,
           "disjoint-support families vanish: AB = B A^n = 0 (n = 2, 3) and AB = BA = 0 "
           "(worst residual " + fmt("%.2e", worst) + ")");
}

void criterion_6() {
    const QuadratureRule rule = rule_of(12, 1.0 / 16);
    const QuadratureRule oracle_rule = rule_of(8, 1.0 / 16);
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    std::mt19937_64 rng(2024);

    bool compose_ok = true, iterate_ok = true, verdict_ok = true;
    double worst_compose = 0.0, worst_iterate = 0.0;
    int agreements = 0;

    for (int trial = 0; trial < 50; ++trial) {
        const Kernel k1 = random_general_kernel(rng);
        const Kernel k2 = random_general_kernel(rng);
        std::vector<double> breaks;
        for (const Kernel* k : {&k1, &k2}) {
            auto b = k->static_breakpoints_t(0.0, 1.0);
            breaks.insert(breaks.end(), b.begin(), b.end());
            b = k->static_breakpoints_s(0.0, 1.0);
            breaks.insert(breaks.end(), b.begin(), b.end());
        }
        std::sort(breaks.begin(), breaks.end());
        const Grid1D grid = build_grid(unit, breaks, rule);
        const IntegralOperator a(k1, unit, 2.0, rule);
        const IntegralOperator b(k2, unit, 2.0, rule);

        const IntegralOperator ab = compose_ops(a, b, grid);
        const auto battery = make_battery(grid, 5, 3000 + trial);
        for (const auto& x : battery) {
            const double res =
                l2_distance(apply(ab, x), apply(a, apply(b, x))) / (1.0 + l2_norm(x));
            worst_compose = std::max(worst_compose, res);
            compose_ok = compose_ok && res < 1e-9;
        }

        if (trial < 10) {
            const int m = trial < 7 ? 2 : 3;
            const GridKernel km = iterated_kernel(k1, unit, m, rule);
            const double scale = 1.0 + km.sup_abs();
            for (int probe = 0; probe < 4; ++probe) {
                const std::size_t i = (probe * 37 + trial) % km.t.size();
                const std::size_t j = (probe * 53 + 2 * trial) % km.s.size();
                const double oracle = nested_oracle(k1, unit, m, km.t.points[i],
                                                    km.s.points[j], oracle_rule);
                const double err = std::abs(km.at(i, j) - oracle);
                worst_iterate = std::max(worst_iterate, err / scale);
                iterate_ok = iterate_ok && err < 1e-9 * scale;
            }
        }

        const AeTolerance tol = AeTolerance::defaults_for(1.0);
        const CheckReport check = check_covariance(a, b, Polynomial::monomial(1.0, 2), tol,
                                                   rule, battery);
        const bool oracle_pass = check.direct_residual < kOracleResidualPass;
        if (check.overall_pass == oracle_pass && check.verdict != "inconclusive") {
            ++agreements;
        }
        verdict_ok = verdict_ok && check.overall_pass == oracle_pass;
    }

    const bool pass = compose_ok && iterate_ok && verdict_ok && agreements == 50;
    report(6, pass,
           "oracle equivalence on 50 random kernel pairs (compose worst " +
               fmt("%.2e", worst_compose) + ", iterate worst " + fmt("%.2e", worst_iterate) +
               ", verdict agreement " + std::to_string(agreements) + "/50)");
}

void criterion_7() {
    const QuadratureRule rule = rule_of(12, 0.0);
    const Interval window{-20.0, 20.0};
    const AeTolerance tol = AeTolerance::defaults_for(window.hi - window.lo);

    bool commut_ok = true, young_ok = true, titchmarsh_ok = true;
    const std::pair<const char*, const char*> smooth_pairs[] = {
        {"exp(0-t^2)", "exp(0-t^2/2)"},
        {"ind(0,1)", "ind(2,3)"},
        {"ind(0,1)", "exp(0-t^2)"},
    };
    for (auto [ftext, gtext] : smooth_pairs) {
        const FuncExpr f = FuncExpr::parse(ftext);
        const FuncExpr g = FuncExpr::parse(gtext);
        const GridFunction fg = convolve(f, g, window, rule);
        const GridFunction gf = convolve(g, f, window, rule);
        const double scale = 1.0 + lp_norm(fg, kInfNorm);
        for (std::size_t i = 0; i < fg.size(); ++i) {
            commut_ok =
                commut_ok && std::abs(fg.values[i] - gf.values[i]) <= 1e-10 * scale;
        }
        const LebesgueSet dom = LebesgueSet::interval(window.lo, window.hi);
        const double f1 = lp_norm(f, dom, 1.0, rule);
        for (double p : {1.0, 2.0, kInfNorm}) {
            young_ok = young_ok && lp_norm(fg, p) <= f1 * lp_norm(g, dom, p, rule) + 1e-9;
        }
    }

    {
        const FuncExpr f = FuncExpr::parse("ind(0,1)");
        const FuncExpr g = FuncExpr::parse("ind(2,3)");
        const GridFunction conv = convolve(f, g, window, rule);
        double lo = 0.0, hi = 0.0;
        const bool nonzero = numeric_support(conv, tol, &lo, &hi);
        const double panel = (window.hi - window.lo) / 32.0;
        titchmarsh_ok = nonzero && std::abs(lo - 2.0) <= panel && std::abs(hi - 4.0) <= panel;
    }

    const std::pair<const char*, const char*> compact_pairs[] = {
        {"ind(0,1)", "ind(0,1)"},
        {"ind(0,1)", "ind(2,3)"},
        {"ind(-1,1)", "ind(0,2)"},
        {"ind(0,1)-ind(1,2)", "ind(0,1)"},
        {"ind(0,0.5)", "ind(0.5,1.5)"},
        {"ind(-2,-1)", "ind(1,2)"},
        {"ind(0,1)+ind(2,3)", "ind(0,1)"},
        {"ind(0,1)*2", "ind(0,2)"},
        {"ind(-1,0)", "ind(-1,0)"},
        {"ind(0,3)", "ind(1,2)"},
    };
    int detected = 0;
    for (auto [ftext, gtext] : compact_pairs) {
        const CheckReport check = check_conv_monomial(FuncExpr::parse(ftext),
                                                      FuncExpr::parse(gtext), 1.0, 2, tol,
                                                      rule);
        if (check.verdict == "fail") ++detected;
    }

    const bool pass = commut_ok && young_ok && titchmarsh_ok && detected == 10;
    report(7, pass,
           "convolution suite: commutativity, the L1-Lp norm inequality, support "
           "additivity, and monomial rejection " + std::to_string(detected) + "/10");
}

void criterion_8() {
    const QuadratureRule rule = rule_of(12, 1.0 / 16);
    const LebesgueSet unit = LebesgueSet::interval(0, 1);
    std::mt19937_64 rng(4096);

    std::vector<Kernel> fixtures;
    fixtures.push_back(random_general_kernel(rng));
    fixtures.push_back(random_general_kernel(rng));
    fixtures.push_back(Kernel::volterra(
        Kernel::separable(FuncExpr::constant(1.0), FuncExpr::constant(1.0), unit), 0.0, unit));
    fixtures.push_back(Kernel::separable(FuncExpr::parse("ind(0,0.5)*(t^4+1)"),
                                         FuncExpr::parse("cos(2*t)"), unit));

    bool pass = true;
    double tightest = std::numeric_limits<double>::infinity();
    for (const auto& kern : fixtures) {
        std::vector<double> breaks = kern.static_breakpoints_t(0.0, 1.0);
        auto sb = kern.static_breakpoints_s(0.0, 1.0);
        breaks.insert(breaks.end(), sb.begin(), sb.end());
        std::sort(breaks.begin(), breaks.end());
        const Grid1D grid = build_grid(unit, breaks, rule);
        const auto battery = make_battery(grid, 50, 8192);
        for (double p : {1.0, 2.0, kInfNorm}) {
            const IntegralOperator op(kern, unit, p, rule);
            for (const auto& x : battery) {
                const double lhs = lp_norm(apply(op, x), p);
                const double rhs = op.norm_bound() * lp_norm(x, p) + 1e-9;
                pass = pass && lhs <= rhs;
                if (rhs - lhs < tightest) tightest = rhs - lhs;
            }
        }
    }
    report(8, pass,
           "operator actions stay under the kernel norm bound for p in {1, 2, inf} "
           "(tightest margin " + fmt("%.2e", tightest) + ")");
}

void criterion_9() {
    QuadratureRule rule;  // library defaults
    std::string first, second;
    for (int run = 0; run < 2; ++run) {
        std::string all;
        for (const auto& name : fixtures::fixture_names()) {
            const auto result = fixtures::run_fixture(name, rule, 42);
            all += fixtures::format_table(result);
            all += report_to_json(result.report);
        }
        static const std::regex timing_line("\\s*\"wall_time_ms\": [^\\n]*\\n");
        all = std::regex_replace(all, timing_line, "\n");
        (run == 0 ? first : second) = std::move(all);
    }
    const bool pass = !first.empty() && first == second;
    report(9, pass, "two same-seed runs of the fixture suite serialize byte-identically");
}

}  // namespace

int main() {
    setenv("OPKERNEL_THREADS", "1", 1);

    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
