#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <variant>

#include "opkernel/kernel.hpp"

namespace opkernel {

/// Integral operator (Ax)(t) = integral over G of k(t, s) x(s) ds, applied to
/// grid functions by Nystrom discretization on a shared panel-aligned grid.
/// Triangular supports are enforced through the kernel's own evaluation, so
/// operator algebra on a fixed grid is exactly Fubini-consistent: composing
/// the discrete kernels and applying equals sequential application up to
/// rounding.
class IntegralOperator {
  public:
    /// Analytic kernel backing.  Records the Hutson-Pym norm bound for the
    /// given L_p index at construction and rejects non-finite bounds.
    IntegralOperator(Kernel kernel, LebesgueSet domain_x, double p, const QuadratureRule& rule);

    /// GridKernel backing (result of operator composition).
    IntegralOperator(GridKernel kernel, LebesgueSet g, LebesgueSet domain_x, double p);

    const LebesgueSet& g() const { return g_; }
    const LebesgueSet& x_domain() const { return x_; }
    double p() const { return p_; }
    double norm_bound() const { return norm_bound_; }

    bool analytic() const { return std::holds_alternative<Kernel>(kernel_); }
    const Kernel& kernel() const { return std::get<Kernel>(kernel_); }
    const GridKernel& grid_kernel() const { return std::get<GridKernel>(kernel_); }

    /// Kernel samples on the given grids (analytic kernels are evaluated;
    /// grid-backed operators require matching grids).
    GridKernel materialize(const Grid1D& t_grid, const Grid1D& s_grid) const;

    double eval_kernel(double t, double s) const;

    std::vector<double> static_breakpoints(double lo, double hi) const;

    /// Kernel samples on a square grid, cached for reuse across a battery of
    /// applications.  The cache is shared between copies of the operator.
    std::shared_ptr<const GridKernel> sampled_on(const Grid1D& grid) const;

  private:
    struct SampleCache {
        std::mutex mtx;
        std::vector<double> points;
        std::shared_ptr<const GridKernel> kernel;
    };

    std::variant<Kernel, GridKernel> kernel_;
    LebesgueSet g_;
    LebesgueSet x_;
    double p_ = 2.0;
    double norm_bound_ = 0.0;
    std::shared_ptr<SampleCache> cache_ = std::make_shared<SampleCache>();
};

/// y_i = sum_k w_k k(t_i, s_k) x_k over grid points inside G, for t_i inside
/// the operator's output domain.  Throws when x's grid does not cover G.
GridFunction apply(const IntegralOperator& op, const GridFunction& x);

/// F(A)x = coeff[0] x + sum_{j>=1} coeff[j] A^j x by repeated application.
GridFunction apply_poly(const IntegralOperator& op, const Polynomial& f, const GridFunction& x);

/// Grid-kernel-backed composition: kernel = discrete product of the two
/// operator kernels on `grid`, G = right.G.
IntegralOperator compose_ops(const IntegralOperator& left, const IntegralOperator& right,
                             const Grid1D& grid);

/// Fixed-seed battery of test functions: mixtures of constants, ramps,
/// low-frequency trig waves, and indicators aligned to the grid's panels.
std::vector<GridFunction> make_battery(const Grid1D& grid, int count, std::uint64_t seed);

double l2_norm(const GridFunction& f);
double l2_distance(const GridFunction& a, const GridFunction& b);

}  // namespace opkernel
