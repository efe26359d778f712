#include "opkernel/convolution.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "opkernel/parallel.hpp"

namespace opkernel {

namespace {

using cd = std::complex<double>;

// iterative radix-2 Cooley-Tukey, in place
void fft(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? -1 : 1);
        const cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

double windowed_l1(const FuncExpr& f, const Interval& window, const QuadratureRule& rule) {
    return lp_norm(f, LebesgueSet::interval(window.lo, window.hi), 1.0, rule);
}

void check_truncation(const FuncExpr& f, const Interval& window, const QuadratureRule& rule,
                      const char* name) {
    const double base = windowed_l1(f, window, rule);
    const Interval doubled{2.0 * window.lo, 2.0 * window.hi};
    const double wide = windowed_l1(f, doubled, rule);
    if (wide - base > 1e-6 * (1.0 + base)) {
        std::ostringstream os;
        os << "divergent truncation: windowed L1 of " << name << " grows from " << base
           << " to " << wide << " under window doubling";
        throw std::invalid_argument(os.str());
    }
}

GridFunction convolve_direct(const FuncExpr& f, const FuncExpr& g, const Interval& window,
                             const QuadratureRule& rule) {
    const LebesgueSet dom = LebesgueSet::interval(window.lo, window.hi);
    // the convolution kinks exactly on the sumset of the factor breakpoints
    const auto f_breaks = f.breakpoints(window.lo, window.hi);
    const auto g_breaks = g.breakpoints(window.lo, window.hi);
    std::vector<double> out_breaks;
    for (double bf : f_breaks) {
        for (double bg : g_breaks) {
            const double sum = bf + bg;
            if (sum > window.lo && sum < window.hi) out_breaks.push_back(sum);
        }
    }
    std::sort(out_breaks.begin(), out_breaks.end());
    Grid1D out_grid = build_grid(dom, out_breaks, rule);

    GridFunction out;
    out.grid = out_grid;
    out.values.assign(out_grid.size(), 0.0);

    const double width = rule.effective_width(window.hi - window.lo);
    const GaussRule& gl = gauss_legendre(rule.nodes_per_panel);

    parallel_chunks(out_grid.size(), [&](std::size_t lo_i, std::size_t hi_i) {
        for (std::size_t i = lo_i; i < hi_i; ++i) {
            const double t = out_grid.points[i];
            // panels aligned to g's jumps and to f's jumps shifted by t
            std::vector<double> edges{window.lo, window.hi};
            for (double b : g_breaks) edges.push_back(b);
            for (double b : f.breakpoints(t - window.hi, t - window.lo)) {
                const double u = t - b;
                if (u > window.lo && u < window.hi) edges.push_back(u);
            }
            std::sort(edges.begin(), edges.end());
            double acc = 0.0;
            for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
                const double a = edges[e], b = edges[e + 1];
                if (b - a <= 1e-14) continue;
                const int pieces =
                    std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-12)));
                for (int p = 0; p < pieces; ++p) {
                    const double plo = a + (b - a) * p / pieces;
                    const double phi = a + (b - a) * (p + 1) / pieces;
                    const double mid = 0.5 * (plo + phi), half = 0.5 * (phi - plo);
                    double panel = 0.0;
                    for (int q = 0; q < gl.nodes.size(); ++q) {
                        const double u = mid + half * gl.nodes[q];
                        panel += gl.weights[q] * f(t - u) * g(u);
                    }
                    acc += half * panel;
                }
            }
            out.values[i] = acc;
        }
    });
    return out;
}

GridFunction convolve_fft(const FuncExpr& f, const FuncExpr& g, const Interval& window,
                          const QuadratureRule& rule) {
    // uniform rectangle rule; spectrally accurate for smooth decaying profiles
    const double span = window.hi - window.lo;
    std::size_t m = 1;
    const double width = rule.effective_width(span);
    const std::size_t target = static_cast<std::size_t>(
        std::ceil(span / width * std::max(4, rule.nodes_per_panel)));
    while (m < target) m <<= 1;

    const double h = span / static_cast<double>(m);
    // g sampled on the window, f on the symmetric difference grid j*h with
    // offset m, so that (f*g)(lo + k h) = h * linconv(F, g)[k + m]:
    // t - u_b = (k - b) h = F-index (k - b) + m
    std::size_t n = 1;
    while (n < 4 * m) n <<= 1;
    std::vector<cd> fa(n, cd(0.0)), ga(n, cd(0.0));
    for (std::size_t j = 0; j < 2 * m; ++j) {
        fa[j] = f((static_cast<double>(j) - static_cast<double>(m)) * h);
    }
    for (std::size_t b = 0; b < m; ++b) ga[b] = g(window.lo + b * h);
    fft(fa, false);
    fft(ga, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= ga[i];
    fft(fa, true);

    GridFunction out;
    Grid1D grid;
    grid.domain = LebesgueSet::interval(window.lo, window.hi);
    grid.points.resize(m);
    grid.weights.assign(m, h);
    grid.panel_edges = {window.lo, window.hi};
    out.values.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        grid.points[k] = window.lo + k * h;
        out.values[k] = fa[k + m].real() * h;
    }
    out.grid = std::move(grid);
    return out;
}

struct SupportInfo {
    bool nonzero = false;
    double lo = 0.0;
    double hi = 0.0;
};

SupportInfo profile_support(const FuncExpr& f, const Interval& window, const AeTolerance& tol,
                            const QuadratureRule& rule) {
    const LebesgueSet dom = LebesgueSet::interval(window.lo, window.hi);
    const FuncExpr exprs[] = {f};
    const GridFunction smp = sample(f, build_grid_for(dom, exprs, rule));
    SupportInfo info;
    info.nonzero = numeric_support(smp, tol, &info.lo, &info.hi);
    return info;
}

IntegralOperator make_conv_operator(const FuncExpr& profile, bool one_sided,
                                    const Interval& window, const QuadratureRule& rule) {
    const LebesgueSet dom = LebesgueSet::interval(window.lo, window.hi);
    return IntegralOperator(Kernel::convolution(profile, one_sided, dom), dom, 2.0, rule);
}

Grid1D conv_battery_grid(const FuncExpr& ka, const FuncExpr& kb, const Interval& window,
                         const QuadratureRule& rule) {
    const LebesgueSet dom = LebesgueSet::interval(window.lo, window.hi);
    const double span = window.hi - window.lo;
    // battery functions live in the middle half of the window, away from the
    // truncation edges where windowed convolutions lose mass
    const double core_lo = window.lo + 0.25 * span;
    const double core_hi = window.hi - 0.25 * span;
    std::vector<double> breaks{core_lo, core_hi};
    for (const FuncExpr* f : {&ka, &kb}) {
        auto b = f->breakpoints(window.lo, window.hi);
        breaks.insert(breaks.end(), b.begin(), b.end());
    }
    std::sort(breaks.begin(), breaks.end());
    return build_grid(dom, breaks, rule);
}

std::vector<GridFunction> core_battery(const Grid1D& grid, const Interval& window, int count,
                                       std::uint64_t seed) {
    const double span = window.hi - window.lo;
    const double core_lo = window.lo + 0.25 * span;
    const double core_hi = window.hi - 0.25 * span;
    std::vector<GridFunction> battery = make_battery(grid, count, seed);
    for (auto& f : battery) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double t = f.grid.points[i];
            if (t < core_lo || t > core_hi) f.values[i] = 0.0;
        }
    }
    return battery;
}

}  // namespace

bool LaplaceGrid::stable_everywhere() const {
    for (bool b : stable) {
        if (!b) return false;
    }
    return true;
}

std::vector<double> default_laplace_grid() {
    std::vector<double> s(101);
    for (int i = 0; i < 101; ++i) s[i] = -3.0 + 6.0 * i / 100.0;
    return s;
}

bool numeric_support(const GridFunction& f, const AeTolerance& tol, double* lo, double* hi) {
    double max_abs = 0.0;
    for (double v : f.values) max_abs = std::max(max_abs, std::abs(v));
    const double thr = tol.eps_value + tol.eps_rel * max_abs;
    bool found = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(f.values[i]) > thr) {
            if (!found && lo) *lo = f.grid.points[i];
            if (hi) *hi = f.grid.points[i];
            found = true;
        }
    }
    return found;
}

GridFunction convolve(const FuncExpr& f, const FuncExpr& g, const Interval& window,
                      const QuadratureRule& rule) {
    rule.validate();
    check_truncation(f, window, rule, "left profile");
    check_truncation(g, window, rule, "right profile");
    if (!f.has_jumps() && !g.has_jumps()) return convolve_fft(f, g, window, rule);
    return convolve_direct(f, g, window, rule);
}

LaplaceGrid laplace_transform(const FuncExpr& f, std::span<const double> s_grid,
                              const Interval& t_window, const QuadratureRule& rule) {
    if (std::isinf(t_window.lo) || std::isinf(t_window.hi)) {
        throw std::invalid_argument("laplace_transform needs a finite window");
    }
    LaplaceGrid out;
    out.s_points.assign(s_grid.begin(), s_grid.end());
    out.values.resize(s_grid.size());
    out.stable.resize(s_grid.size());

    const LebesgueSet dom = LebesgueSet::interval(t_window.lo, t_window.hi);
    const LebesgueSet dom2 = LebesgueSet::interval(2.0 * t_window.lo, 2.0 * t_window.hi);
    const FuncExpr texprs[] = {f};
    const Grid1D grid = build_grid_for(dom, texprs, rule);
    const Grid1D grid2 = build_grid_for(dom2, texprs, rule);

    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        const double s = s_grid[i];
        double value = 0.0, l1 = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double term = std::exp(-s * grid.points[k]) * f(grid.points[k]);
            value += grid.weights[k] * term;
            l1 += grid.weights[k] * std::abs(term);
        }
        double l1_wide = 0.0;
        for (std::size_t k = 0; k < grid2.size(); ++k) {
            l1_wide += grid2.weights[k] *
                       std::abs(std::exp(-s * grid2.points[k]) * f(grid2.points[k]));
        }
        out.values[i] = value;
        out.stable[i] =
            std::isfinite(value) && (l1_wide - l1 <= 1e-8 * (1.0 + l1));
    }
    return out;
}

CheckReport check_conv_poly(const FuncExpr& ka_profile, const FuncExpr& kb_profile,
                            const Polynomial& f, const AeTolerance& tol,
                            const QuadratureRule& rule, const ConvCheckOptions& opt) {
    tol.validate();
    if (f.coeff(0) != 0.0) {
        throw std::invalid_argument("convolution polynomial check requires F(0) = 0");
    }
    CheckReport report;
    report.tolerances = tol;

    const LaplaceGrid la = laplace_transform(ka_profile, opt.s_grid, opt.window, rule);
    const LaplaceGrid lb = laplace_transform(kb_profile, opt.s_grid, opt.window, rule);

    std::vector<double> s_pts, kb_vals, d_vals;
    for (std::size_t i = 0; i < opt.s_grid.size(); ++i) {
        if (!la.stable[i] || !lb.stable[i]) continue;
        s_pts.push_back(opt.s_grid[i]);
        kb_vals.push_back(lb.values[i]);
        double poly = 0.0;
        for (int j = 1; j <= f.degree(); ++j) {
            poly += f.coeff(j) * std::pow(la.values[i], j);
        }
        d_vals.push_back(la.values[i] - poly);
    }
    if (s_pts.empty()) {
        throw std::invalid_argument("empty common convergence window for the transforms");
    }
    if (s_pts.size() < opt.s_grid.size()) {
        report.notes.push_back("transform domains truncated to the common stable s-points");
    }

    double max_b = 0.0, max_d = 0.0;
    for (double v : kb_vals) max_b = std::max(max_b, std::abs(v));
    for (double v : d_vals) max_d = std::max(max_d, std::abs(v));
    const double thr_b = tol.eps_value + tol.eps_rel * max_b;
    const double thr_d = tol.eps_value + tol.eps_rel * max_d;

    const double cell = s_pts.size() > 1 ? (s_pts.back() - s_pts.front()) / (s_pts.size() - 1)
                                         : 1.0;
    ConditionResult cond;
    cond.region = "supp K_B n supp (K_A - F(K_A)) on the s-grid";
    for (std::size_t i = 0; i < s_pts.size(); ++i) {
        if (std::abs(kb_vals[i]) > thr_b && std::abs(d_vals[i]) > thr_d) {
            cond.violation_measure += cell;
            cond.sup_residual = std::max(cond.sup_residual, std::abs(d_vals[i]));
        }
        cond.l2_residual += cell * d_vals[i] * d_vals[i];
    }
    cond.l2_residual = std::sqrt(cond.l2_residual);
    cond.pass = cond.violation_measure <= tol.eps_measure;
    report.conditions.push_back(cond);

    const IntegralOperator a = make_conv_operator(ka_profile, false, opt.window, rule);
    const IntegralOperator b = make_conv_operator(kb_profile, false, opt.window, rule);
    const Grid1D grid = conv_battery_grid(ka_profile, kb_profile, opt.window, rule);
    const auto battery = core_battery(grid, opt.window, opt.battery_size, opt.seed);
    const DirectResidual oracle = direct_residual(a, b, f, battery);
    report.direct_residual = oracle.max_relative;
    report.notes.push_back("truncation active: window [" + std::to_string(opt.window.lo) +
                           ", " + std::to_string(opt.window.hi) + "]");
    report.finish(cond.pass, oracle.max_relative < kOracleResidualPass);
    return report;
}

CheckReport check_conv_monomial(const FuncExpr& ka_profile, const FuncExpr& kb_profile,
                                double delta, int n, const AeTolerance& tol,
                                const QuadratureRule& rule, const ConvCheckOptions& opt) {
    tol.validate();
    if (delta == 0.0) throw std::invalid_argument("delta must be nonzero");
    if (n < 2) throw std::invalid_argument("monomial degree must be >= 2");
    CheckReport report;
    report.tolerances = tol;

    const GridFunction conv = convolve(ka_profile, kb_profile, opt.window, rule);
    const AeVerdict verdict = ae_zero(conv.values, conv.grid.weights, tol);

    ConditionResult cond;
    cond.region = "profile convolution on the window";
    cond.sup_residual = verdict.max_abs;
    cond.l2_residual = l2_norm(conv);
    cond.violation_measure = verdict.violation_measure;
    cond.pass = verdict.is_ae_zero;
    report.conditions.push_back(cond);

    // support-additivity diagnostic for compactly supported nonzero profiles
    const SupportInfo sa = profile_support(ka_profile, opt.window, tol, rule);
    const SupportInfo sb = profile_support(kb_profile, opt.window, tol, rule);
    if (sa.nonzero && sb.nonzero) {
        double clo = 0.0, chi = 0.0;
        if (numeric_support(conv, tol, &clo, &chi)) {
            std::ostringstream os;
            os << "support additivity: inf supp(conv) = " << clo << " vs "
               << sa.lo + sb.lo << ", sup = " << chi << " vs " << sa.hi + sb.hi;
            report.notes.push_back(os.str());
        }
        report.notes.push_back(
            "both profiles are nonzero with compact numeric support; their convolution "
            "cannot vanish a.e.");
    }

    const IntegralOperator a = make_conv_operator(ka_profile, false, opt.window, rule);
    const IntegralOperator b = make_conv_operator(kb_profile, false, opt.window, rule);
    const Grid1D grid = conv_battery_grid(ka_profile, kb_profile, opt.window, rule);
    const auto battery = core_battery(grid, opt.window, opt.battery_size, opt.seed);
    const DirectResidual oracle = direct_residual(a, b, Polynomial::monomial(delta, n), battery);
    report.direct_residual = oracle.max_relative;
    report.finish(cond.pass, oracle.max_relative < kOracleResidualPass);
    return report;
}

CheckReport check_one_sided_monomial(const FuncExpr& ka_profile, const FuncExpr& kb_profile,
                                     double delta, int n, const AeTolerance& tol,
                                     const QuadratureRule& rule, const ConvCheckOptions& opt) {
    tol.validate();
    if (delta == 0.0) throw std::invalid_argument("delta must be nonzero");
    if (n < 2) throw std::invalid_argument("monomial degree must be >= 2");
    CheckReport report;
    report.tolerances = tol;

    // profiles must vanish on the negative axis
    const Interval neg{-opt.one_sided_window.hi, 0.0};
    for (const auto* prof : {&ka_profile, &kb_profile}) {
        const LebesgueSet dom = LebesgueSet::interval(neg.lo, neg.hi);
        const FuncExpr exprs[] = {*prof};
        const GridFunction smp = sample(*prof, build_grid_for(dom, exprs, rule));
        if (!ae_zero(smp.values, smp.grid.weights, tol).is_ae_zero) {
            throw std::invalid_argument("one-sided check requires profiles supported in [0, inf)");
        }
    }

    const Interval w = opt.one_sided_window;
    const SupportInfo sa = profile_support(ka_profile, w, tol, rule);
    const SupportInfo sb = profile_support(kb_profile, w, tol, rule);

    ConditionResult cond;
    cond.region = "one-sided profiles on [0, window]";
    if (!sa.nonzero || !sb.nonzero) {
        cond.pass = true;
        report.notes.push_back("degenerate: at least one profile is a.e. zero");
        report.conditions.push_back(cond);
        report.direct_residual = 0.0;
        report.finish(true, true);
        report.verdict = "pass";
        return report;
    }

    cond.pass = false;
    report.notes.push_back(
        "both one-sided profiles are nonzero; no such operators can satisfy the relation");

    const IntegralOperator a = make_conv_operator(ka_profile, true, w, rule);
    const IntegralOperator b = make_conv_operator(kb_profile, true, w, rule);
    const Grid1D grid = conv_battery_grid(ka_profile, kb_profile, w, rule);
    const auto battery = core_battery(grid, w, opt.battery_size, opt.seed);
    const DirectResidual oracle = direct_residual(a, b, Polynomial::monomial(delta, n), battery);
    report.direct_residual = oracle.max_relative;
    cond.sup_residual = oracle.max_relative;
    report.conditions.push_back(cond);
    report.finish(false, oracle.max_relative < kOracleResidualPass);
    return report;
}

}  // namespace opkernel
