#pragma once

#include <span>
#include <vector>

#include "opkernel/domain_set.hpp"
#include "opkernel/func_expr.hpp"

namespace opkernel {

/// Composite Gauss-Legendre rule: `nodes_per_panel` nodes on every panel,
/// panels never wider than `max_panel_width` and never straddling a
/// registered breakpoint.  A non-positive width means "hull width / 32".
struct QuadratureRule {
    int nodes_per_panel = 12;
    double max_panel_width = 0.0;

    double effective_width(double hull_width) const;
    void validate() const;
};

/// Reference Gauss-Legendre nodes/weights on [-1, 1]; exact for polynomials
/// of degree <= 2n-1.  Cached per n.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Quadrature grid over a LebesgueSet: sorted points with positive weights
/// summing to the measure of the domain, plus the panel edges that produced
/// them (every registered breakpoint is an edge).
struct Grid1D {
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<double> panel_edges;
    LebesgueSet domain;

    std::size_t size() const { return points.size(); }
};

/// A function known by its values on a quadrature grid.
struct GridFunction {
    Grid1D grid;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Panel-aligned grid construction.  Throws on unbounded domains and on
/// breakpoints outside the domain hull.
Grid1D build_grid(const LebesgueSet& domain, std::span<const double> breakpoints,
                  const QuadratureRule& rule);

/// Convenience: grid aligned to the breakpoints of the given expressions.
Grid1D build_grid_for(const LebesgueSet& domain, std::span<const FuncExpr> exprs,
                      const QuadratureRule& rule);

GridFunction sample(const FuncExpr& f, const Grid1D& grid);

double integrate(const GridFunction& f);
double integrate(const FuncExpr& f, const LebesgueSet& domain, const QuadratureRule& rule);

/// Pairing <u, v> = integral of u*v over the domain.
double inner_product(const FuncExpr& u, const FuncExpr& v, const LebesgueSet& domain,
                     const QuadratureRule& rule);

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// L_p norm for p in [1, inf].  p = inf returns the grid maximum of |value|,
/// a lower bound of the true essential sup.  Throws for p < 1.
double lp_norm(const GridFunction& f, double p);
double lp_norm(const FuncExpr& f, const LebesgueSet& domain, double p,
               const QuadratureRule& rule);

}  // namespace opkernel
