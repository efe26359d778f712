#include "opkernel/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace opkernel {

namespace {

using nlohmann::json;

double endpoint_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ConfigError("set endpoint must be a number or \"inf\"/\"-inf\"");
}

LebesgueSet set_from(const json& j) {
    if (!j.is_array()) throw ConfigError("set literal must be an array of [lo,hi] pairs");
    std::vector<Interval> ivs;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            throw ConfigError("set literal must be an array of [lo,hi] pairs");
        }
        ivs.push_back(Interval{endpoint_from(pair[0]), endpoint_from(pair[1])});
    }
    try {
        return LebesgueSet{std::move(ivs)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad set literal: ") + e.what());
    }
}

FuncExpr expr_from(const json& j, bool bivariate, const char* field) {
    if (!j.is_string()) throw ConfigError(std::string(field) + " must be an expression string");
    try {
        return bivariate ? FuncExpr::parse_bivariate(j.get<std::string>())
                         : FuncExpr::parse(j.get<std::string>());
    } catch (const ParseError& e) {
        throw ConfigError(std::string("in ") + field + ": " + e.what());
    }
}

Kernel kernel_from(const json& j) {
    if (!j.is_object()) throw ConfigError("kernel spec must be a JSON object");
    const std::string type = j.value("type", "");
    LebesgueSet support = j.contains("G") ? set_from(j.at("G")) : LebesgueSet::interval(0, 1);

    if (type == "general") {
        return Kernel::general(expr_from(j.at("expr"), true, "expr"), support);
    }
    if (type == "separable") {
        return Kernel::separable(expr_from(j.at("a"), false, "a"),
                                 expr_from(j.at("c"), false, "c"), support);
    }
    if (type == "convolution") {
        return Kernel::convolution(expr_from(j.at("profile"), false, "profile"),
                                   j.value("one_sided", false), support);
    }
    if (type == "volterra") {
        if (!j.contains("inner")) throw ConfigError("volterra kernel needs an \"inner\" spec");
        Kernel inner = kernel_from(j.at("inner"));
        const double gamma = j.value("gamma", 0.0);
        if (!j.contains("G")) support = inner.support();
        return Kernel::volterra(std::move(inner), gamma, support);
    }
    if (type == "volterra_separable") {
        SeparableVolterra sv;
        sv.outer = expr_from(j.at("outer"), false, "outer");
        sv.inner = expr_from(j.at("inner"), false, "inner");
        sv.alpha = j.value("alpha", 0.0);
        sv.beta = j.value("beta", 1.0);
        return sv.kernel();
    }
    throw ConfigError("unknown kernel type \"" + type + "\"");
}

Polynomial poly_from(const json& j) {
    if (!j.is_array()) throw ConfigError("F must be a coefficient list [d0,...,dn]");
    std::vector<double> c;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError("F coefficients must be numbers");
        c.push_back(v.get<double>());
    }
    return Polynomial(std::move(c));
}

json parse_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open spec file: " + file.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed spec: ") + e.what());
    }
}

std::pair<FuncExpr, FuncExpr> separable_factors(const json& j, const char* name) {
    if (!j.is_object() || j.value("type", "") != "volterra_separable") {
        throw ConfigError(std::string(name) +
                          " must be a volterra_separable kernel spec for this checker");
    }
    return {expr_from(j.at("outer"), false, "outer"), expr_from(j.at("inner"), false, "inner")};
}

}  // namespace

LebesgueSet parse_set_json(const std::string& json_text) {
    try {
        return set_from(json::parse(json_text));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed set literal: ") + e.what());
    }
}

Kernel parse_kernel_json(const std::string& json_text) {
    try {
        return kernel_from(json::parse(json_text));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed kernel spec: ") + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& file) {
    const json j = parse_file(file);
    RunConfig cfg;
    cfg.checker = j.value("checker", "");

    if (j.contains("rule")) {
        const auto& r = j.at("rule");
        cfg.rule.nodes_per_panel = r.value("nodes_per_panel", cfg.rule.nodes_per_panel);
        cfg.rule.max_panel_width = r.value("max_panel_width", cfg.rule.max_panel_width);
        try {
            cfg.rule.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("bad rule: ") + e.what());
        }
    }
    if (j.contains("tolerance")) {
        const auto& t = j.at("tolerance");
        cfg.tolerance.eps_value = t.value("eps_value", cfg.tolerance.eps_value);
        cfg.tolerance.eps_rel = t.value("eps_rel", cfg.tolerance.eps_rel);
        cfg.tolerance.eps_measure = t.value("eps_measure", cfg.tolerance.eps_measure);
        cfg.tolerance_given = true;
        try {
            cfg.tolerance.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("bad tolerance: ") + e.what());
        }
    }
    cfg.p = j.value("p", 2.0);
    cfg.battery_size = j.value("battery_size", 10);
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("window")) {
        const LebesgueSet w = set_from(j.at("window"));
        cfg.window = w.hull();
    }
    if (j.contains("X")) cfg.x_domain = set_from(j.at("X"));
    if (j.contains("F")) {
        cfg.poly = poly_from(j.at("F"));
        cfg.has_f = true;
    }
    cfg.delta = j.value("delta", 1.0);
    cfg.power = j.value("d", j.value("n", 1));
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("m")) cfg.iterate_m = j.at("m").get<int>();
    cfg.alpha = j.value("alpha", 0.0);
    cfg.beta = j.value("beta", 1.0);
    cfg.region.gamma_a = j.value("gamma_a", cfg.alpha);
    cfg.region.gamma_b = j.value("gamma_b", cfg.region.gamma_a);
    cfg.region.beta = cfg.beta;

    const bool conv_kind = cfg.checker.rfind("conv_", 0) == 0;
    const bool factor_kind = cfg.checker == "volterra_necessary" ||
                             cfg.checker == "volterra_sufficient";

    if (j.contains("A")) {
        if (conv_kind) {
            const auto& a = j.at("A");
            cfg.profile_a = expr_from(a.is_object() ? a.at("profile") : a, false, "A profile");
        } else if (factor_kind || cfg.checker == "delta_commut_necessary") {
            auto [outer, inner] = separable_factors(j.at("A"), "A");
            if (!cfg.factors) cfg.factors = VolterraFactors{};
            cfg.factors->a = outer;
            cfg.factors->c = inner;
            cfg.factors->alpha = j.at("A").value("alpha", cfg.alpha);
            cfg.factors->beta = j.at("A").value("beta", cfg.beta);
            cfg.alpha = cfg.factors->alpha;
            cfg.beta = cfg.factors->beta;
        } else {
            cfg.kernel_a = kernel_from(j.at("A"));
        }
    }
    if (j.contains("B")) {
        if (conv_kind) {
            const auto& b = j.at("B");
            cfg.profile_b = expr_from(b.is_object() ? b.at("profile") : b, false, "B profile");
        } else if (factor_kind || cfg.checker == "delta_commut_necessary") {
            auto [outer, inner] = separable_factors(j.at("B"), "B");
            if (!cfg.factors) cfg.factors = VolterraFactors{};
            cfg.factors->b = outer;
            cfg.factors->e = inner;
        } else {
            cfg.kernel_b = kernel_from(j.at("B"));
        }
    }
    return cfg;
}

namespace {

AeTolerance resolved_tolerance(const RunConfig& cfg, double base_measure) {
    if (cfg.tolerance_given) return cfg.tolerance;
    return AeTolerance::defaults_for(base_measure);
}

IntegralOperator make_general_operator(const RunConfig& cfg, const Kernel& k, bool* truncated) {
    LebesgueSet support = k.support();
    if (!support.bounded()) {
        if (!cfg.window) {
            throw ConfigError("unbounded kernel support requires a \"window\"");
        }
        support = intersect(support, LebesgueSet::interval(cfg.window->lo, cfg.window->hi));
        if (truncated) *truncated = true;
    }
    LebesgueSet x = cfg.x_domain.value_or(LebesgueSet::interval(support.inf(), support.sup()));
    return IntegralOperator(k.with_support(support), x, cfg.p, cfg.rule);
}

// grid L_q norms of the composed-kernel slices on the truncation window; the
// full-line hypothesis is only probed here, never decided
void attach_truncation_probe(CheckReport& report, const IntegralOperator& a,
                             const IntegralOperator& b, const Polynomial& f,
                             const RunConfig& cfg) {
    std::ostringstream os;
    os << "truncation active: window [" << cfg.window->lo << ", " << cfg.window->hi << "]";
    report.notes.push_back(os.str());

    QuadratureRule coarse = cfg.rule;
    coarse.nodes_per_panel = std::max(4, cfg.rule.nodes_per_panel / 2);
    const double q = a.p() > 1.0 ? a.p() / (a.p() - 1.0) : kInfNorm;
    const GridKernel k_ab = compose_kernels(a.kernel(), a.g(), b.kernel(), coarse);
    double worst = 0.0;
    for (std::size_t i = 0; i < k_ab.t.size(); ++i) {
        GridFunction slice;
        slice.grid = k_ab.s;
        slice.values.assign(k_ab.values.begin() + i * k_ab.s.size(),
                            k_ab.values.begin() + (i + 1) * k_ab.s.size());
        worst = std::max(worst, lp_norm(slice, q));
    }
    std::ostringstream probe;
    probe << "integrability probe on the window: max_t ||k_AB(t,.)||_q = " << worst
          << (std::isfinite(worst) ? " (finite)" : " (NOT finite)");
    report.notes.push_back(probe.str());
    if (!std::isfinite(worst)) {
        report.overall_pass = false;
        report.verdict = "fail";
    }
    (void)f;
}

}  // namespace

CheckReport run_configured_check(const RunConfig& cfg) {
    const std::string& kind = cfg.checker;

    if (kind == "general" || kind == "affine" || kind == "monomial") {
        if (!cfg.kernel_a || !cfg.kernel_b) throw ConfigError("checker needs kernels A and B");
        bool truncated = false;
        IntegralOperator a = make_general_operator(cfg, *cfg.kernel_a, &truncated);
        IntegralOperator b = make_general_operator(cfg, *cfg.kernel_b, &truncated);
        LebesgueSet x = cfg.x_domain.value_or(set_union(a.x_domain(), b.x_domain()));
        const LebesgueSet hull = LebesgueSet::interval(
            std::min({x.inf(), a.g().inf(), b.g().inf()}),
            std::max({x.sup(), a.g().sup(), b.g().sup()}));
        // on a truncated line the conditions and residuals are evaluated away
        // from the window edges, where the windowed compositions lose no
        // mass; the operators themselves keep the full window as output
        LebesgueSet x_eval = cfg.x_domain.value_or(hull);
        if (truncated && !cfg.x_domain) {
            const double span = hull.sup() - hull.inf();
            x_eval = LebesgueSet::interval(hull.inf() + 0.25 * span, hull.sup() - 0.25 * span);
        }
        a = IntegralOperator(a.kernel(), hull, cfg.p, cfg.rule);
        b = IntegralOperator(b.kernel(), hull, cfg.p, cfg.rule);

        std::vector<double> breaks;
        auto add = [&](std::vector<double> v) {
            breaks.insert(breaks.end(), v.begin(), v.end());
        };
        add(a.static_breakpoints(hull.inf(), hull.sup()));
        add(b.static_breakpoints(hull.inf(), hull.sup()));
        for (const auto& set : {a.g(), b.g()}) {
            for (const auto& iv : set.intervals()) {
                breaks.push_back(iv.lo);
                breaks.push_back(iv.hi);
            }
        }
        std::sort(breaks.begin(), breaks.end());
        const Grid1D grid = build_grid(hull, breaks, cfg.rule);
        const auto battery = make_battery(grid, cfg.battery_size, cfg.seed);
        const AeTolerance tol =
            resolved_tolerance(cfg, x_eval.measure() * set_union(a.g(), b.g()).measure());

        Polynomial poly = cfg.poly;
        if (kind == "affine" && !cfg.has_f) poly = Polynomial::affine(0.0, cfg.delta);
        if (kind == "monomial") poly = Polynomial::monomial(cfg.delta, cfg.power);
        if (kind == "general" && !cfg.has_f) throw ConfigError("general checker needs F");
        if (kind == "monomial" && cfg.delta == 0.0) {
            throw ConfigError("monomial checker needs a nonzero delta");
        }

        CheckReport report = kind == "affine"
                                 ? check_affine(a, b, poly.coeff(0), poly.coeff(1), tol,
                                                cfg.rule, battery, x_eval)
                                 : check_covariance(a, b, poly, tol, cfg.rule, battery, x_eval);
        std::ostringstream bounds;
        bounds << "operator norm bounds at p = " << cfg.p << ": A " << a.norm_bound() << ", B "
               << b.norm_bound();
        report.notes.push_back(bounds.str());
        if (truncated) attach_truncation_probe(report, a, b, poly, cfg);
        return report;
    }

    if (kind == "qplane" || kind == "both_zero" || kind == "commut_sufficient") {
        if (!cfg.kernel_a || !cfg.kernel_b) throw ConfigError("checker needs kernels A and B");
        Kernel ka = *cfg.kernel_a;
        Kernel kb = *cfg.kernel_b;
        TriangularRegion region = cfg.region;
        // accept wrapped volterra kernels: unwrap to the inner kernel and
        // pick the lower limits up from the wrapper
        if (ka.type() == Kernel::Type::Volterra) {
            region.gamma_a = ka.volterra_gamma();
            ka = ka.volterra_inner();
        }
        if (kb.type() == Kernel::Type::Volterra) {
            region.gamma_b = kb.volterra_gamma();
            kb = kb.volterra_inner();
        }
        VolterraCheckOptions opt;
        opt.p = cfg.p;
        opt.battery_size = cfg.battery_size;
        opt.seed = cfg.seed;
        const AeTolerance tol = resolved_tolerance(cfg, cfg.beta - cfg.alpha);
        if (kind == "qplane") {
            return check_qplane(ka, kb, region, cfg.delta, tol, cfg.rule, opt);
        }
        if (kind == "both_zero") {
            return check_both_zero(ka, kb, cfg.alpha, cfg.beta, tol, cfg.rule, opt);
        }
        return check_commut_sufficient(ka, kb, cfg.alpha, cfg.beta, cfg.lambda, tol, cfg.rule,
                                       opt);
    }

    if (kind == "volterra_necessary" || kind == "volterra_sufficient" ||
        kind == "delta_commut_necessary") {
        if (!cfg.factors) throw ConfigError("checker needs volterra_separable kernels A and B");
        VolterraCheckOptions opt;
        opt.p = cfg.p;
        opt.battery_size = cfg.battery_size;
        opt.seed = cfg.seed;
        const AeTolerance tol =
            resolved_tolerance(cfg, cfg.factors->beta - cfg.factors->alpha);
        if (kind == "volterra_necessary") {
            if (!cfg.has_f) throw ConfigError("volterra_necessary needs F");
            return check_simple_necessary(*cfg.factors, cfg.poly, tol, cfg.rule, opt);
        }
        if (kind == "volterra_sufficient") {
            const Polynomial poly =
                cfg.has_f ? cfg.poly : Polynomial::monomial(cfg.delta, cfg.power);
            return check_simple_sufficient(*cfg.factors, poly, tol, cfg.rule, opt);
        }
        return check_delta_commut_necessary(*cfg.factors, cfg.delta, tol, cfg.rule, opt);
    }

    if (kind == "conv_poly" || kind == "conv_monomial" || kind == "conv_one_sided") {
        if (!cfg.profile_a || !cfg.profile_b) {
            throw ConfigError("convolution checkers need profiles A and B");
        }
        ConvCheckOptions opt;
        if (cfg.window) {
            opt.window = *cfg.window;
            opt.one_sided_window = Interval{0.0, 2.0 * cfg.window->hi};
        }
        opt.battery_size = cfg.battery_size;
        opt.seed = cfg.seed;
        const AeTolerance tol = resolved_tolerance(cfg, opt.window.hi - opt.window.lo);
        if (kind == "conv_poly") {
            if (!cfg.has_f) throw ConfigError("conv_poly needs F");
            return check_conv_poly(*cfg.profile_a, *cfg.profile_b, cfg.poly, tol, cfg.rule,
                                   opt);
        }
        if (kind == "conv_monomial") {
            return check_conv_monomial(*cfg.profile_a, *cfg.profile_b, cfg.delta, cfg.power,
                                       tol, cfg.rule, opt);
        }
        return check_one_sided_monomial(*cfg.profile_a, *cfg.profile_b, cfg.delta, cfg.power,
                                        tol, cfg.rule, opt);
    }

    throw ConfigError("unknown checker kind \"" + kind + "\"");
}

}  // namespace opkernel
