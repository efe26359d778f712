#include "opkernel/operator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "opkernel/parallel.hpp"

namespace opkernel {

IntegralOperator::IntegralOperator(Kernel kernel, LebesgueSet domain_x, double p,
                                   const QuadratureRule& rule)
    : kernel_(std::move(kernel)), x_(std::move(domain_x)), p_(p) {
    const Kernel& k = std::get<Kernel>(kernel_);
    g_ = k.support();
    if (!(p_ >= 1.0)) throw std::invalid_argument("operator needs p >= 1");
    if (g_.empty()) throw std::invalid_argument("operator integration set is empty");
    if (x_.empty()) throw std::invalid_argument("operator output domain is empty");
    if (g_.bounded() && x_.bounded()) {
        const Interval window{std::min(x_.inf(), g_.inf()), std::max(x_.sup(), g_.sup())};
        norm_bound_ = kernel_norm_bound(k, window, p_, rule);
        if (!std::isfinite(norm_bound_)) {
            throw std::invalid_argument("kernel norm bound is not finite");
        }
    } else {
        norm_bound_ = std::numeric_limits<double>::infinity();
    }
}

IntegralOperator::IntegralOperator(GridKernel kernel, LebesgueSet g, LebesgueSet domain_x,
                                   double p)
    : kernel_(std::move(kernel)), g_(std::move(g)), x_(std::move(domain_x)), p_(p) {
    norm_bound_ = kernel_norm_bound(std::get<GridKernel>(kernel_), p_);
    if (!std::isfinite(norm_bound_)) {
        throw std::invalid_argument("kernel norm bound is not finite");
    }
}

GridKernel IntegralOperator::materialize(const Grid1D& t_grid, const Grid1D& s_grid) const {
    if (analytic()) return sample_kernel(kernel(), t_grid, s_grid);
    const GridKernel& gk = grid_kernel();
    if (gk.t.points != t_grid.points || gk.s.points != s_grid.points) {
        throw std::invalid_argument("grid-backed kernel sampled on a foreign grid");
    }
    return gk;
}

double IntegralOperator::eval_kernel(double t, double s) const {
    if (analytic()) return kernel()(t, s);
    const GridKernel& gk = grid_kernel();
    for (std::size_t i = 0; i < gk.t.size(); ++i) {
        if (gk.t.points[i] == t) {
            for (std::size_t j = 0; j < gk.s.size(); ++j) {
                if (gk.s.points[j] == s) return gk.at(i, j);
            }
        }
    }
    throw std::invalid_argument("grid-backed kernel evaluated off-grid");
}

std::vector<double> IntegralOperator::static_breakpoints(double lo, double hi) const {
    if (!analytic()) return {};
    auto tb = kernel().static_breakpoints_t(lo, hi);
    auto sb = kernel().static_breakpoints_s(lo, hi);
    tb.insert(tb.end(), sb.begin(), sb.end());
    std::sort(tb.begin(), tb.end());
    return tb;
}

std::shared_ptr<const GridKernel> IntegralOperator::sampled_on(const Grid1D& grid) const {
    std::lock_guard<std::mutex> lock(cache_->mtx);
    if (cache_->kernel && cache_->points == grid.points) return cache_->kernel;
    if (!analytic()) {
        const GridKernel& gk = grid_kernel();
        if (gk.t.points != grid.points || gk.s.points != grid.points) {
            throw std::invalid_argument(
                "grid/support mismatch: foreign grid for grid-backed kernel");
        }
        cache_->kernel = std::make_shared<GridKernel>(gk);
    } else {
        cache_->kernel = std::make_shared<GridKernel>(sample_kernel(kernel(), grid, grid));
    }
    cache_->points = grid.points;
    return cache_->kernel;
}

namespace {

void check_coverage(const IntegralOperator& op, const GridFunction& x) {
    const LebesgueSet uncovered = set_minus(op.g(), x.grid.domain);
    if (uncovered.measure() > 1e-12 * std::max(1.0, op.g().measure())) {
        throw std::invalid_argument("grid/support mismatch: x does not cover G");
    }
}

}  // namespace

GridFunction apply(const IntegralOperator& op, const GridFunction& x) {
    check_coverage(op, x);
    GridFunction out;
    out.grid = x.grid;
    out.values.assign(x.size(), 0.0);

    const std::size_t n = x.size();
    std::vector<std::uint8_t> in_g(n), in_x(n);
    for (std::size_t k = 0; k < n; ++k) {
        in_g[k] = op.g().contains(x.grid.points[k]) ? 1 : 0;
        in_x[k] = op.x_domain().contains(x.grid.points[k]) ? 1 : 0;
    }

    // row work is O(n); threads only pay off on large grids
    auto run_rows = [&](auto&& body) {
        if (n >= 2048) {
            parallel_chunks(n, body);
        } else {
            body(0, n);
        }
    };

    const std::shared_ptr<const GridKernel> gk = op.sampled_on(x.grid);
    run_rows([&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            if (!in_x[i]) continue;
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (!in_g[k]) continue;
                acc += x.grid.weights[k] * gk->at(i, k) * x.values[k];
            }
            out.values[i] = acc;
        }
    });
    return out;
}

GridFunction apply_poly(const IntegralOperator& op, const Polynomial& f, const GridFunction& x) {
    GridFunction acc;
    acc.grid = x.grid;
    acc.values.assign(x.size(), 0.0);
    if (f.is_zero()) return acc;

    for (std::size_t i = 0; i < x.size(); ++i) acc.values[i] = f.coeff(0) * x.values[i];
    GridFunction power = x;
    for (int j = 1; j <= f.degree(); ++j) {
        power = apply(op, power);
        const double c = f.coeff(j);
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < x.size(); ++i) acc.values[i] += c * power.values[i];
    }
    return acc;
}

IntegralOperator compose_ops(const IntegralOperator& left, const IntegralOperator& right,
                             const Grid1D& grid) {
    if (!left.g().bounded()) {
        throw std::invalid_argument("composition requires a bounded middle set");
    }
    const GridKernel lv = left.materialize(grid, grid);
    const GridKernel rv = right.materialize(grid, grid);

    GridKernel out;
    out.t = grid;
    out.s = grid;
    out.values.assign(grid.size() * grid.size(), 0.0);

    const std::size_t n = grid.size();
    std::vector<std::uint8_t> in_mid(n);
    for (std::size_t k = 0; k < n; ++k) in_mid[k] = left.g().contains(grid.points[k]) ? 1 : 0;

    parallel_chunks(n, [&](std::size_t ilo, std::size_t ihi) {
        for (std::size_t i = ilo; i < ihi; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                if (!in_mid[k]) continue;
                const double lw = grid.weights[k] * lv.at(i, k);
                if (lw == 0.0) continue;
                const double* rrow = &rv.values[k * n];
                double* orow = &out.values[i * n];
                for (std::size_t j = 0; j < n; ++j) orow[j] += lw * rrow[j];
            }
        }
    });
    return IntegralOperator(std::move(out), right.g(), left.x_domain(), left.p());
}

std::vector<GridFunction> make_battery(const Grid1D& grid, int count, std::uint64_t seed) {
    if (grid.size() == 0) throw std::invalid_argument("battery needs a non-empty grid");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> freq(1, 3);

    const double lo = grid.domain.inf();
    const double hi = grid.domain.sup();
    const double span = hi - lo;

    std::vector<GridFunction> battery;
    battery.reserve(count);
    for (int b = 0; b < count; ++b) {
        const double c0 = coef(rng);
        const double c1 = coef(rng);
        const double c2 = coef(rng);
        const double c3 = coef(rng);
        const int k2 = freq(rng);
        const int k3 = freq(rng);
        // indicator cell between two random panel edges
        double ind_lo = lo, ind_hi = hi;
        double cind = coef(rng);
        if (grid.panel_edges.size() >= 2) {
            std::uniform_int_distribution<std::size_t> pick(0, grid.panel_edges.size() - 1);
            std::size_t a = pick(rng), c = pick(rng);
            if (a > c) std::swap(a, c);
            if (a == c) cind = 0.0;
            ind_lo = grid.panel_edges[a];
            ind_hi = grid.panel_edges[c];
        }
        GridFunction f;
        f.grid = grid;
        f.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid.points[i];
            const double u = (t - lo) / span;
            double v = c0 + c1 * u + c2 * std::sin(k2 * std::numbers::pi * u) +
                       c3 * std::cos(k3 * std::numbers::pi * u);
            if (t >= ind_lo && t <= ind_hi) v += cind;
            f.values[i] = v;
        }
        battery.push_back(std::move(f));
    }
    return battery;
}

double l2_norm(const GridFunction& f) { return lp_norm(f, 2.0); }

double l2_distance(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) throw std::invalid_argument("grid mismatch in l2_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        acc += a.grid.weights[i] * d * d;
    }
    return std::sqrt(acc);
}

}  // namespace opkernel
