#include "opkernel/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "opkernel/parallel.hpp"

namespace opkernel {

int worker_count() {
    static const int n = [] {
        const char* env = std::getenv("OPKERNEL_THREADS");
        if (env && *env) {
            const int v = std::atoi(env);
            if (v > 0) return v;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }();
    return n;
}

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1 || n < 64) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::monomial(double delta, int d) {
    if (d < 0) throw std::invalid_argument("monomial degree must be >= 0");
    std::vector<double> c(d + 1, 0.0);
    c[d] = delta;
    return Polynomial(std::move(c));
}

Polynomial Polynomial::affine(double delta0, double delta1) {
    return Polynomial({delta0, delta1});
}

double Polynomial::operator()(double z) const {
    double acc = 0.0;
    for (std::size_t j = coeffs_.size(); j-- > 0;) acc = acc * z + coeffs_[j];
    return acc;
}

Kernel Kernel::general(FuncExpr expr_ts, LebesgueSet support) {
    Kernel k;
    k.type_ = Type::General;
    k.expr_ = std::move(expr_ts);
    k.support_ = std::move(support);
    return k;
}

Kernel Kernel::separable(FuncExpr left_t, FuncExpr right_s, LebesgueSet support) {
    if (left_t.uses_axis(Axis::S) || right_s.uses_axis(Axis::S)) {
        throw std::invalid_argument("separable factors must be univariate in t");
    }
    Kernel k;
    k.type_ = Type::Separable;
    k.expr_ = std::move(left_t);
    k.right_ = std::move(right_s);
    k.support_ = std::move(support);
    return k;
}

Kernel Kernel::convolution(FuncExpr profile, bool one_sided, LebesgueSet support) {
    if (profile.uses_axis(Axis::S)) {
        throw std::invalid_argument("convolution profile must be univariate");
    }
    Kernel k;
    k.type_ = Type::Convolution;
    k.expr_ = std::move(profile);
    k.one_sided_ = one_sided;
    k.support_ = std::move(support);
    return k;
}

Kernel Kernel::volterra(Kernel inner, double gamma, LebesgueSet support) {
    Kernel k;
    k.type_ = Type::Volterra;
    k.gamma_ = gamma;
    k.inner_ = std::make_shared<Kernel>(std::move(inner));
    k.support_ = std::move(support);
    return k;
}

Kernel Kernel::with_support(LebesgueSet support) const {
    Kernel k = *this;
    k.support_ = std::move(support);
    return k;
}

double Kernel::operator()(double t, double s) const {
    switch (type_) {
        case Type::General: return expr_(t, s);
        case Type::Separable: return expr_(t) * right_(s);
        case Type::Convolution: {
            const double u = t - s;
            if (one_sided_ && u < 0.0) return 0.0;
            return expr_(u);
        }
        case Type::Volterra:
            if (s > t || s < gamma_) return 0.0;
            return (*inner_)(t, s);
    }
    return 0.0;
}

bool Kernel::is_triangular() const {
    if (type_ == Type::Volterra) return true;
    return type_ == Type::Convolution && one_sided_;
}

bool Kernel::has_fixed_s_structure() const {
    switch (type_) {
        case Type::General:
        case Type::Separable: return true;
        case Type::Convolution: return !one_sided_ && !expr_.has_jumps();
        case Type::Volterra: return false;
    }
    return false;
}

std::vector<double> Kernel::static_breakpoints_t(double lo, double hi) const {
    switch (type_) {
        case Type::General: return expr_.breakpoints(lo, hi, Axis::T);
        case Type::Separable: return expr_.breakpoints(lo, hi);
        case Type::Convolution: return {lo, hi};
        case Type::Volterra: {
            auto b = inner_->static_breakpoints_t(lo, hi);
            if (gamma_ > lo && gamma_ < hi) b.push_back(gamma_);
            std::sort(b.begin(), b.end());
            return b;
        }
    }
    return {lo, hi};
}

std::vector<double> Kernel::static_breakpoints_s(double lo, double hi) const {
    switch (type_) {
        case Type::General: return expr_.breakpoints(lo, hi, Axis::S);
        case Type::Separable: return right_.breakpoints(lo, hi);
        case Type::Convolution: return {lo, hi};
        case Type::Volterra: {
            auto b = inner_->static_breakpoints_s(lo, hi);
            if (gamma_ > lo && gamma_ < hi) b.push_back(gamma_);
            std::sort(b.begin(), b.end());
            return b;
        }
    }
    return {lo, hi};
}

std::vector<double> Kernel::breakpoints_s_at(double t, double lo, double hi) const {
    std::vector<double> out = static_breakpoints_s(lo, hi);
    if (type_ == Type::Convolution) {
        for (double u : expr_.breakpoints(t - hi, t - lo)) {
            const double s = t - u;
            if (s > lo && s < hi) out.push_back(s);
        }
    }
    if (type_ == Type::Volterra) {
        auto b = inner_->breakpoints_s_at(t, lo, hi);
        out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> Kernel::breakpoints_t_at(double s, double lo, double hi) const {
    std::vector<double> out = static_breakpoints_t(lo, hi);
    if (type_ == Type::Convolution) {
        for (double u : expr_.breakpoints(lo - s, hi - s)) {
            const double tt = s + u;
            if (tt > lo && tt < hi) out.push_back(tt);
        }
    }
    if (type_ == Type::Volterra) {
        auto b = inner_->breakpoints_t_at(s, lo, hi);
        out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

LebesgueSet Kernel::s_support_at(double t) const {
    switch (type_) {
        case Type::Volterra: {
            if (t < gamma_) return LebesgueSet::empty_set();
            return intersect(LebesgueSet::interval(gamma_, t), inner_->s_support_at(t));
        }
        case Type::Convolution:
            if (one_sided_) {
                return LebesgueSet::interval(-std::numeric_limits<double>::infinity(), t);
            }
            return LebesgueSet::real_line();
        default: return LebesgueSet::real_line();
    }
}

LebesgueSet Kernel::t_support_at(double tau) const {
    switch (type_) {
        case Type::Volterra: {
            if (tau < gamma_) return LebesgueSet::empty_set();
            return intersect(
                LebesgueSet::interval(tau, std::numeric_limits<double>::infinity()),
                inner_->t_support_at(tau));
        }
        case Type::Convolution:
            if (one_sided_) {
                return LebesgueSet::interval(tau, std::numeric_limits<double>::infinity());
            }
            return LebesgueSet::real_line();
        default: return LebesgueSet::real_line();
    }
}

const Kernel& Kernel::volterra_inner() const {
    if (type_ != Type::Volterra) throw std::logic_error("not a volterra kernel");
    return *inner_;
}

double Kernel::volterra_gamma() const {
    if (type_ != Type::Volterra) throw std::logic_error("not a volterra kernel");
    return gamma_;
}

const FuncExpr& Kernel::profile() const {
    if (type_ != Type::Convolution) throw std::logic_error("not a convolution kernel");
    return expr_;
}

const FuncExpr& Kernel::left_factor() const {
    if (type_ != Type::Separable) throw std::logic_error("not a separable kernel");
    return expr_;
}

const FuncExpr& Kernel::right_factor() const {
    if (type_ != Type::Separable) throw std::logic_error("not a separable kernel");
    return right_;
}

const FuncExpr& Kernel::general_expr() const {
    if (type_ != Type::General) throw std::logic_error("not a general kernel");
    return expr_;
}

double GridKernel::sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

GridKernel sample_kernel(const Kernel& k, const Grid1D& t_grid, const Grid1D& s_grid) {
    GridKernel out;
    out.t = t_grid;
    out.s = s_grid;
    out.values.resize(t_grid.size() * s_grid.size());
    parallel_chunks(t_grid.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = 0; j < s_grid.size(); ++j) {
                out.at(i, j) = k(t_grid.points[i], s_grid.points[j]);
            }
        }
    });
    return out;
}

namespace {

// Integrate f over `range` with panels split at `fixed_breaks` (plus range
// endpoints), each panel at most `width` wide, `nodes` Gauss points per panel.
template <typename F>
double integrate_range(const LebesgueSet& range, std::span<const double> fixed_breaks,
                       double width, int nodes, F&& f) {
    if (range.empty()) return 0.0;
    const GaussRule& gl = gauss_legendre(nodes);
    double acc = 0.0;
    for (const auto& iv : range.intervals()) {
        if (iv.length() <= 0.0) continue;
        std::vector<double> edges;
        edges.reserve(fixed_breaks.size() + 2);
        edges.push_back(iv.lo);
        for (double b : fixed_breaks) {
            if (b > iv.lo + 1e-13 && b < iv.hi - 1e-13) edges.push_back(b);
        }
        edges.push_back(iv.hi);
        std::sort(edges.begin(), edges.end());
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double a = edges[e], b = edges[e + 1];
            if (b - a <= 1e-14) continue;
            const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-12)));
            for (int p = 0; p < pieces; ++p) {
                const double lo = a + (b - a) * p / pieces;
                const double hi = a + (b - a) * (p + 1) / pieces;
                const double mid = 0.5 * (lo + hi);
                const double half = 0.5 * (hi - lo);
                double panel = 0.0;
                for (int q = 0; q < nodes; ++q) {
                    panel += gl.weights[q] * f(mid + half * gl.nodes[q]);
                }
                acc += half * panel;
            }
        }
    }
    return acc;
}

bool fast_pair(const Kernel& left, const Kernel& right) {
    return left.has_fixed_s_structure() && right.has_fixed_s_structure();
}

std::vector<double> union_s_breaks(const Kernel& left, const Kernel& right,
                                   const LebesgueSet& g_mid) {
    std::vector<double> breaks;
    if (g_mid.empty()) return breaks;
    const double lo = g_mid.inf(), hi = g_mid.sup();
    auto a = left.static_breakpoints_s(lo, hi);
    auto b = right.static_breakpoints_t(lo, hi);
    breaks.insert(breaks.end(), a.begin(), a.end());
    breaks.insert(breaks.end(), b.begin(), b.end());
    for (const auto& iv : g_mid.intervals()) {
        breaks.push_back(iv.lo);
        breaks.push_back(iv.hi);
    }
    std::sort(breaks.begin(), breaks.end());
    return breaks;
}

}  // namespace

GridKernel compose_kernels(const Kernel& left, const LebesgueSet& g_mid, const Kernel& right,
                           const QuadratureRule& rule, const Grid1D& t_grid,
                           const Grid1D& tau_grid) {
    rule.validate();
    GridKernel out;
    out.t = t_grid;
    out.s = tau_grid;
    out.values.assign(t_grid.size() * tau_grid.size(), 0.0);
    if (g_mid.empty() || t_grid.size() == 0 || tau_grid.size() == 0) return out;
    if (!g_mid.bounded()) {
        throw std::invalid_argument("unbounded composition domain requires truncation");
    }

    if (fast_pair(left, right)) {
        const Grid1D s_grid = build_grid(g_mid, union_s_breaks(left, right, g_mid), rule);
        const GridKernel lv = sample_kernel(left, t_grid, s_grid);
        const GridKernel rv = sample_kernel(right, s_grid, tau_grid);
        const std::size_t ns = s_grid.size(), nt = tau_grid.size();
        parallel_chunks(t_grid.size(), [&](std::size_t ilo, std::size_t ihi) {
            for (std::size_t i = ilo; i < ihi; ++i) {
                for (std::size_t k = 0; k < ns; ++k) {
                    const double lw = s_grid.weights[k] * lv.at(i, k);
                    if (lw == 0.0) continue;
                    const double* rrow = &rv.values[k * nt];
                    double* orow = &out.values[i * nt];
                    for (std::size_t j = 0; j < nt; ++j) orow[j] += lw * rrow[j];
                }
            }
        });
        return out;
    }

    // moving-support path: integrate each output pair on its exact s-range
    const double hull_w = g_mid.sup() - g_mid.inf();
    const double width = rule.effective_width(hull_w);
    const double lo = g_mid.inf(), hi = g_mid.sup();
    parallel_chunks(t_grid.size(), [&](std::size_t ilo, std::size_t ihi) {
        for (std::size_t i = ilo; i < ihi; ++i) {
            const double t = t_grid.points[i];
            const LebesgueSet left_range = intersect(g_mid, left.s_support_at(t));
            if (left_range.empty()) continue;
            std::vector<double> breaks = left.breakpoints_s_at(t, lo, hi);
            for (std::size_t j = 0; j < tau_grid.size(); ++j) {
                const double tau = tau_grid.points[j];
                const LebesgueSet range = intersect(left_range, right.t_support_at(tau));
                if (range.empty()) continue;
                std::vector<double> all = breaks;
                auto rb = right.breakpoints_t_at(tau, lo, hi);
                all.insert(all.end(), rb.begin(), rb.end());
                std::sort(all.begin(), all.end());
                out.at(i, j) = integrate_range(range, all, width, rule.nodes_per_panel,
                                               [&](double s) { return left(t, s) * right(s, tau); });
            }
        }
    });
    return out;
}

GridKernel compose_kernels(const Kernel& left, const LebesgueSet& g_mid, const Kernel& right,
                           const QuadratureRule& rule) {
    std::vector<double> breaks = union_s_breaks(left, right, g_mid);
    const Grid1D grid = build_grid(g_mid, breaks, rule);
    return compose_kernels(left, g_mid, right, rule, grid, grid);
}

namespace {

void check_matching_grid(const Grid1D& a, const Grid1D& b) {
    if (a.points.size() != b.points.size() || a.points != b.points) {
        throw std::invalid_argument("grid kernels must share the composition grid");
    }
}

}  // namespace

GridKernel compose_grid_left(const GridKernel& left, const Kernel& right) {
    GridKernel rv = sample_kernel(right, left.s, left.s);
    return compose_grid_grid(left, rv);
}

GridKernel compose_grid_right(const Kernel& left, const GridKernel& right,
                              const Grid1D& t_grid) {
    GridKernel lv = sample_kernel(left, t_grid, right.t);
    return compose_grid_grid(lv, right);
}

GridKernel compose_grid_grid(const GridKernel& left, const GridKernel& right) {
    check_matching_grid(left.s, right.t);
    GridKernel out;
    out.t = left.t;
    out.s = right.s;
    out.values.assign(left.t.size() * right.s.size(), 0.0);
    const std::size_t ns = left.s.size(), nt = right.s.size();
    parallel_chunks(left.t.size(), [&](std::size_t ilo, std::size_t ihi) {
        for (std::size_t i = ilo; i < ihi; ++i) {
            for (std::size_t k = 0; k < ns; ++k) {
                const double lw = left.s.weights[k] * left.at(i, k);
                if (lw == 0.0) continue;
                const double* rrow = &right.values[k * nt];
                double* orow = &out.values[i * nt];
                for (std::size_t j = 0; j < nt; ++j) orow[j] += lw * rrow[j];
            }
        }
    });
    return out;
}

namespace {

// (m+1)-fold nested integral for kernels whose support moves with the outer
// variables.  Exponential in m; callers keep m small.
double nested_iterate(const Kernel& k, const LebesgueSet& g, int m, double t, double tau,
                      double width, int nodes, const std::vector<double>& static_breaks) {
    if (m == 0) return k(t, tau);
    const LebesgueSet range =
        intersect(intersect(g, k.s_support_at(t)), k.t_support_at(tau));
    if (range.empty()) return 0.0;
    std::vector<double> breaks = static_breaks;
    auto extra = k.breakpoints_s_at(t, g.inf(), g.sup());
    breaks.insert(breaks.end(), extra.begin(), extra.end());
    extra = k.breakpoints_t_at(tau, g.inf(), g.sup());
    breaks.insert(breaks.end(), extra.begin(), extra.end());
    std::sort(breaks.begin(), breaks.end());
    return integrate_range(range, breaks, width, nodes, [&](double s) {
        return k(t, s) * nested_iterate(k, g, m - 1, s, tau, width, nodes, static_breaks);
    });
}

}  // namespace

GridKernel iterated_kernel(const Kernel& k, const LebesgueSet& g, int m,
                           const QuadratureRule& rule, const Grid1D& t_grid,
                           const Grid1D& s_grid) {
    if (m < 0) throw std::invalid_argument("iterated kernel order must be >= 0");
    if (m == 0) return sample_kernel(k, t_grid, s_grid);
    if (m == 1) return compose_kernels(k, g, k, rule, t_grid, s_grid);

    if (k.has_fixed_s_structure()) {
        std::vector<double> breaks = union_s_breaks(k, k, g);
        const Grid1D mid = build_grid(g, breaks, rule);
        GridKernel acc = compose_kernels(k, g, k, rule, mid, s_grid);
        for (int j = 2; j <= m; ++j) {
            const Grid1D& tg = (j == m) ? t_grid : mid;
            GridKernel lv = sample_kernel(k, tg, mid);
            acc = compose_grid_grid(lv, acc);
        }
        return acc;
    }

    GridKernel out;
    out.t = t_grid;
    out.s = s_grid;
    out.values.assign(t_grid.size() * s_grid.size(), 0.0);
    if (g.empty()) return out;
    const double width = rule.effective_width(g.sup() - g.inf());
    const std::vector<double> static_breaks = union_s_breaks(k, k, g);
    parallel_chunks(t_grid.size(), [&](std::size_t ilo, std::size_t ihi) {
        for (std::size_t i = ilo; i < ihi; ++i) {
            for (std::size_t j = 0; j < s_grid.size(); ++j) {
                out.at(i, j) = nested_iterate(k, g, m, t_grid.points[i], s_grid.points[j],
                                              width, rule.nodes_per_panel, static_breaks);
            }
        }
    });
    return out;
}

GridKernel iterated_kernel(const Kernel& k, const LebesgueSet& g, int m,
                           const QuadratureRule& rule) {
    std::vector<double> breaks = union_s_breaks(k, k, g);
    const Grid1D grid = build_grid(g, breaks, rule);
    return iterated_kernel(k, g, m, rule, grid, grid);
}

GridKernel polynomial_kernel(const Kernel& k, const LebesgueSet& g, const Polynomial& f,
                             const QuadratureRule& rule, const Grid1D& t_grid,
                             const Grid1D& s_grid) {
    GridKernel out;
    out.t = t_grid;
    out.s = s_grid;
    out.values.assign(t_grid.size() * s_grid.size(), 0.0);
    for (int j = 1; j <= f.degree(); ++j) {
        const double c = f.coeff(j);
        if (c == 0.0) continue;
        const GridKernel kj = iterated_kernel(k, g, j - 1, rule, t_grid, s_grid);
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += c * kj.values[i];
    }
    return out;
}

GridKernel polynomial_kernel(const Kernel& k, const LebesgueSet& g, const Polynomial& f,
                             const QuadratureRule& rule) {
    std::vector<double> breaks = union_s_breaks(k, k, g);
    const Grid1D grid = build_grid(g, breaks, rule);
    return polynomial_kernel(k, g, f, rule, grid, grid);
}

double kernel_norm_bound(const GridKernel& k, double p) {
    const std::size_t nt = k.t.size(), ns = k.s.size();
    if (nt == 0 || ns == 0) return 0.0;
    if (p == 1.0) {
        double best = 0.0;
        for (std::size_t j = 0; j < ns; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < nt; ++i) col += k.t.weights[i] * std::abs(k.at(i, j));
            best = std::max(best, col);
        }
        return best;
    }
    if (std::isinf(p)) {
        double best = 0.0;
        for (std::size_t i = 0; i < nt; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < ns; ++j) row += k.s.weights[j] * std::abs(k.at(i, j));
            best = std::max(best, row);
        }
        return best;
    }
    if (!(p > 1.0)) throw std::invalid_argument("kernel norm requires p >= 1");
    const double q = p / (p - 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < ns; ++j) {
            row += k.s.weights[j] * std::pow(std::abs(k.at(i, j)), q);
        }
        acc += k.t.weights[i] * std::pow(row, p / q);
    }
    return std::pow(acc, 1.0 / p);
}

double kernel_norm_bound(const Kernel& k, const Interval& window, double p,
                         const QuadratureRule& rule) {
    if (std::isinf(window.lo) || std::isinf(window.hi)) {
        throw std::invalid_argument("kernel norm needs a finite window");
    }
    const LebesgueSet dom = LebesgueSet::interval(window.lo, window.hi);
    auto tb = k.static_breakpoints_t(window.lo, window.hi);
    auto sb = k.static_breakpoints_s(window.lo, window.hi);
    // the diagonal of triangular kernels moves; alignment to static breaks is
    // enough for a sup-of-integrals bound at grid resolution
    const Grid1D tg = build_grid(dom, tb, rule);
    const Grid1D sg = build_grid(dom, sb, rule);
    return kernel_norm_bound(sample_kernel(k, tg, sg), p);
}

}  // namespace opkernel
