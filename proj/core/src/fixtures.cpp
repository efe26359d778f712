#include "opkernel/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace opkernel {
namespace fixtures {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

FixtureRow row(std::string name, std::string expected, std::string observed) {
    FixtureRow r;
    r.name = std::move(name);
    r.expected = std::move(expected);
    r.observed = std::move(observed);
    r.match = r.expected == r.observed;
    return r;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

double chained_sup(const std::vector<const IntegralOperator*>& chain,
                   const std::vector<GridFunction>& battery) {
    double worst = 0.0;
    for (const auto& x : battery) {
        GridFunction y = x;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) y = apply(**it, y);
        worst = std::max(worst, l2_norm(y) / (1.0 + l2_norm(x)));
    }
    return worst;
}

VolterraFactors ab0_factors() {
    VolterraFactors f;
    f.a = FuncExpr::indicator(LebesgueSet::interval(0.0, 0.5));
    f.b = FuncExpr::indicator(LebesgueSet::interval(0.5, 1.0));
    f.c = FuncExpr::constant(1.0);
    f.e = FuncExpr::constant(1.0);
    f.alpha = 0.0;
    f.beta = 1.0;
    return f;
}

VolterraFactors counterexample_factors() {
    VolterraFactors f;
    f.a = FuncExpr::indicator(LebesgueSet::interval(0.0, 0.25)) -
          FuncExpr::indicator(LebesgueSet::interval(0.75, 1.0));
    f.b = FuncExpr::indicator(LebesgueSet::interval(0.25, 0.75));
    f.c = FuncExpr::constant(1.0);
    f.e = FuncExpr::constant(1.0);
    return f;
}

VolterraFactors sufficient_factors() {
    VolterraFactors f;
    f.a = FuncExpr::indicator(LebesgueSet::interval(0.0, 0.25)) -
          FuncExpr::indicator(LebesgueSet::interval(0.5, 0.75));
    f.b = FuncExpr::indicator(LebesgueSet::interval(0.5, 1.0));
    f.c = FuncExpr::indicator(LebesgueSet::interval(0.0, 0.5));
    f.e = FuncExpr::indicator(LebesgueSet::interval(0.25, 0.5)) +
          FuncExpr::indicator(LebesgueSet::interval(0.75, 1.0));
    return f;
}

// the separable factors with polynomial weights; supports match the
// indicator version, so both zero-product hypotheses still hold
std::pair<Kernel, Kernel> bothzero_kernels() {
    const FuncExpr t = FuncExpr::var();
    const FuncExpr a =
        FuncExpr::indicator(LebesgueSet::interval(0.0, 0.25)) * (t.pow(4) + FuncExpr::constant(1.0)) -
        FuncExpr::indicator(LebesgueSet::interval(0.5, 0.75));
    const FuncExpr b = FuncExpr::indicator(LebesgueSet::interval(0.5, 1.0));
    const FuncExpr c = FuncExpr::indicator(LebesgueSet::interval(0.0, 0.5));
    const FuncExpr e =
        FuncExpr::indicator(LebesgueSet::interval(0.25, 0.5)) * (t.pow(2) + FuncExpr::constant(1.0)) +
        FuncExpr::indicator(LebesgueSet::interval(0.75, 1.0));
    const LebesgueSet dom = LebesgueSet::interval(0.0, 1.0);
    return {Kernel::separable(a, c, dom), Kernel::separable(b, e, dom)};
}

}  // namespace

bool FixtureResult::all_match() const {
    for (const auto& r : rows) {
        if (!r.match) return false;
    }
    return true;
}

TrigPair make_trig_pair(const QuadratureRule& rule) {
    const FuncExpr t = FuncExpr::var(Axis::T);
    const FuncExpr s = FuncExpr::var(Axis::S);
    const FuncExpr gate = FuncExpr::indicator(LebesgueSet::interval(0.0, kPi));
    const FuncExpr ka_expr =
        (gate * (cos(t) * cos(s) + sin(t) * sin(s) + cos(t) * sin(s))).scaled(2.0 / kPi);
    const FuncExpr kb_expr =
        (gate * (cos(t) * cos(s) + sin(t) * sin(s).scaled(2.0))).scaled(2.0 / kPi);
    const LebesgueSet dom = LebesgueSet::interval(0.0, kPi);

    IntegralOperator a(Kernel::general(ka_expr, dom), dom, 2.0, rule);
    IntegralOperator b(Kernel::general(kb_expr, dom), dom, 2.0, rule);
    const Grid1D grid = build_grid(dom, {}, rule);
    return TrigPair{std::move(a), std::move(b), grid};
}

std::vector<std::string> fixture_names() {
    return {"example1",           "volterra_ab0",       "volterra_counterexample",
            "volterra_sufficient", "volterra_bothzero", "conv_commute"};
}

FixtureResult run_fixture(const std::string& name, const QuadratureRule& rule,
                          std::uint64_t seed) {
    FixtureResult result;
    result.fixture = name;
    VolterraCheckOptions vopt;
    vopt.seed = seed;

    if (name == "example1") {
        TrigPair pair = make_trig_pair(rule);
        const AeTolerance tol = AeTolerance::defaults_for(kPi * kPi);
        const auto battery = make_battery(pair.grid, 10, seed);
        result.report = check_monomial(pair.a, pair.b, 1.0, 2, tol, rule, battery);
        result.rows.push_back(row("AB = B A^2 verdict", "pass", result.report.verdict));
        result.rows.push_back(row("direct residual < 1e-8", "yes",
                                  yes_no(result.report.direct_residual < 1e-8)));
        const IntegralOperator a2 = compose_ops(pair.a, pair.a, pair.grid);
        const IntegralOperator ba2 = compose_ops(pair.b, a2, pair.grid);
        const bool nonvanishing = check_nonvanishing(ba2, tol, rule);
        result.rows.push_back(row("B A^2 nonvanishing", "true", nonvanishing ? "true" : "false"));
        return result;
    }

    if (name == "volterra_ab0") {
        const VolterraFactors f = ab0_factors();
        const AeTolerance tol = AeTolerance::defaults_for(1.0);
        result.report = check_simple_necessary(f, Polynomial::monomial(1.0, 2), tol, rule, vopt);
        const SeparableVolterra sva{f.a, f.c, f.alpha, f.beta};
        const SeparableVolterra svb{f.b, f.e, f.alpha, f.beta};
        const IntegralOperator a = sva.make_operator(2.0, rule);
        const IntegralOperator b = svb.make_operator(2.0, rule);
        const FuncExpr exprs[] = {f.a, f.b};
        const Grid1D grid = build_grid_for(LebesgueSet::interval(0, 1), exprs, rule);
        const auto battery = make_battery(grid, 10, seed);
        const double ab = chained_sup({&a, &b}, battery);
        const double ba2 = chained_sup({&b, &a, &a}, battery);
        result.rows.push_back(row("supp(a*b*c*e) a.e. zero", "true",
                                  result.report.conditions.front().pass ? "true" : "false"));
        result.rows.push_back(row("AB action a.e. zero", "true",
                                  ab < 1e-10 ? "true" : "false (sup " + fmt(ab) + ")"));
        result.rows.push_back(row("B A^2 action a.e. zero", "true",
                                  ba2 < 1e-10 ? "true" : "false (sup " + fmt(ba2) + ")"));
        return result;
    }

    if (name == "volterra_counterexample") {
        const VolterraFactors f = counterexample_factors();
        const AeTolerance tol = AeTolerance::defaults_for(1.0);
        result.report = check_simple_necessary(f, Polynomial::monomial(1.0, 2), tol, rule, vopt);
        const bool support_ok = result.report.conditions.front().pass;
        const bool relation = result.report.direct_residual < kOracleResidualPass;
        result.rows.push_back(row("support_ok", "true", support_ok ? "true" : "false"));
        result.rows.push_back(row("relation_holds", "false", relation ? "true" : "false"));
        result.rows.push_back(row("direct residual > 1e-3", "yes",
                                  yes_no(result.report.direct_residual > 1e-3)));
        return result;
    }

    if (name == "volterra_sufficient") {
        const VolterraFactors f = sufficient_factors();
        const AeTolerance tol = AeTolerance::defaults_for(1.0);
        result.report = check_simple_sufficient(f, Polynomial::monomial(1.0, 2), tol, rule, vopt);
        CheckReport second =
            check_simple_sufficient(f, Polynomial::monomial(1.0, 3), tol, rule, vopt);
        result.rows.push_back(row("hypothesis (a*e = b*c = 0 a.e.)", "holds",
                                  result.report.conditions[0].pass &&
                                          result.report.conditions[1].pass
                                      ? "holds"
                                      : "fails"));
        result.rows.push_back(
            row("AB = B A^2 = 0", "pass", result.report.verdict));
        result.rows.push_back(row("AB = B A^3 = 0", "pass", second.verdict));
        return result;
    }

    if (name == "volterra_bothzero") {
        auto [ka, kb] = bothzero_kernels();
        const AeTolerance tol = AeTolerance::defaults_for(1.0);
        result.report = check_both_zero(ka, kb, 0.0, 1.0, tol, rule, vopt);
        result.rows.push_back(row("AB = BA = 0 verdict", "pass", result.report.verdict));
        result.rows.push_back(row("direct residual < 1e-9", "yes",
                                  yes_no(result.report.direct_residual < 1e-9)));
        return result;
    }

    if (name == "conv_commute") {
        const FuncExpr g1 = FuncExpr::parse("exp(0-t^2)");
        const FuncExpr g2 = FuncExpr::parse("exp(0-t^2/2)");
        const AeTolerance tol = AeTolerance::defaults_for(6.0);
        ConvCheckOptions opt;
        opt.seed = seed;
        result.report = check_conv_poly(g1, g2, Polynomial({0.0, 1.0}), tol, rule, opt);
        result.rows.push_back(row("commutation verdict", "pass", result.report.verdict));
        result.rows.push_back(row("direct residual < 1e-7", "yes",
                                  yes_no(result.report.direct_residual < kOracleResidualPass)));
        return result;
    }

    throw ConfigError("unknown fixture \"" + name + "\"");
}

std::string format_table(const FixtureResult& result) {
    std::ostringstream os;
    os << "fixture: " << result.fixture << "\n";
    std::size_t w = 10;
    for (const auto& r : result.rows) w = std::max(w, r.name.size());
    for (const auto& r : result.rows) {
        os << "  " << r.name;
        os << std::string(w - r.name.size() + 2, ' ');
        os << "expected=" << r.expected << "  observed=" << r.observed
           << (r.match ? "" : "  [MISMATCH]") << "\n";
    }
    os << "result: " << (result.all_match() ? "as expected" : "MISMATCHES PRESENT") << "\n";
    return os.str();
}

}  // namespace fixtures
}  // namespace opkernel
