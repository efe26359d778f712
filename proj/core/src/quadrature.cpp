#include "opkernel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace opkernel {

double QuadratureRule::effective_width(double hull_width) const {
    if (max_panel_width > 0.0) return max_panel_width;
    return hull_width / 32.0;
}

void QuadratureRule::validate() const {
    if (nodes_per_panel < 2) throw std::invalid_argument("rule needs >= 2 nodes per panel");
    if (std::isnan(max_panel_width) || max_panel_width < 0.0) {
        throw std::invalid_argument("max_panel_width must be positive or 0 (auto)");
    }
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on the Legendre polynomial P_n, symmetric roots.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            // refresh derivative at the converged root for the weight formula
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(rule)).first->second;
}

Grid1D build_grid(const LebesgueSet& domain, std::span<const double> breakpoints,
                  const QuadratureRule& rule) {
    rule.validate();
    Grid1D grid;
    grid.domain = domain;
    if (domain.empty()) return grid;
    if (!domain.bounded()) {
        throw std::invalid_argument("unbounded domain requires a truncation window");
    }

    const double width = rule.effective_width(domain.sup() - domain.inf());
    const GaussRule& gl = gauss_legendre(rule.nodes_per_panel);

    for (const auto& iv : domain.intervals()) {
        if (iv.length() == 0.0) continue;
        std::vector<double> edges{iv.lo};
        for (double b : breakpoints) {
            if (b > iv.lo + 1e-13 && b < iv.hi - 1e-13) edges.push_back(b);
        }
        edges.push_back(iv.hi);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end(),
                                [](double a, double b) { return b - a < 1e-13; }),
                    edges.end());

        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double a = edges[e], b = edges[e + 1];
            if (b - a <= 1e-15) continue;
            const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-12)));
            for (int p = 0; p < pieces; ++p) {
                const double lo = a + (b - a) * p / pieces;
                const double hi = a + (b - a) * (p + 1) / pieces;
                grid.panel_edges.push_back(lo);
                const double mid = 0.5 * (lo + hi);
                const double half = 0.5 * (hi - lo);
                for (int k = 0; k < rule.nodes_per_panel; ++k) {
                    grid.points.push_back(mid + half * gl.nodes[k]);
                    grid.weights.push_back(half * gl.weights[k]);
                }
            }
        }
        grid.panel_edges.push_back(iv.hi);
    }
    return grid;
}

Grid1D build_grid_for(const LebesgueSet& domain, std::span<const FuncExpr> exprs,
                      const QuadratureRule& rule) {
    if (domain.empty()) return build_grid(domain, {}, rule);
    std::vector<double> breaks;
    for (const auto& iv : domain.intervals()) {
        breaks.push_back(iv.lo);
        breaks.push_back(iv.hi);
    }
    for (const auto& f : exprs) {
        auto b = f.breakpoints(domain.inf(), domain.sup());
        breaks.insert(breaks.end(), b.begin(), b.end());
    }
    std::sort(breaks.begin(), breaks.end());
    return build_grid(domain, breaks, rule);
}

GridFunction sample(const FuncExpr& f, const Grid1D& grid) {
    GridFunction out;
    out.grid = grid;
    out.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid.points[i]);
    return out;
}

double integrate(const GridFunction& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.grid.weights[i] * f.values[i];
    return acc;
}

double integrate(const FuncExpr& f, const LebesgueSet& domain, const QuadratureRule& rule) {
    if (domain.empty()) return 0.0;
    const FuncExpr fs[] = {f};
    return integrate(sample(f, build_grid_for(domain, fs, rule)));
}

double inner_product(const FuncExpr& u, const FuncExpr& v, const LebesgueSet& domain,
                     const QuadratureRule& rule) {
    return integrate(u * v, domain, rule);
}

double lp_norm(const GridFunction& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        acc += f.grid.weights[i] * std::pow(std::abs(f.values[i]), p);
    }
    return std::pow(acc, 1.0 / p);
}

double lp_norm(const FuncExpr& f, const LebesgueSet& domain, double p,
               const QuadratureRule& rule) {
    const FuncExpr fs[] = {f};
    return lp_norm(sample(f, build_grid_for(domain, fs, rule)), p);
}

}  // namespace opkernel
