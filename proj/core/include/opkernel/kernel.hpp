#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "opkernel/func_expr.hpp"
#include "opkernel/quadrature.hpp"

namespace opkernel {

/// Real polynomial F(z) = sum_j coeffs[j] * z^j.  Trailing zero coefficients
/// are trimmed so the leading coefficient is nonzero unless F == 0.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    static Polynomial monomial(double delta, int d);
    static Polynomial affine(double delta0, double delta1);

    const std::vector<double>& coeffs() const { return coeffs_; }
    int degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
    double coeff(int j) const {
        return j >= 0 && j < static_cast<int>(coeffs_.size()) ? coeffs_[j] : 0.0;
    }
    bool is_zero() const { return coeffs_.empty(); }

    double operator()(double z) const;

  private:
    std::vector<double> coeffs_;
};

/// Bivariate kernel k(t, s) of an integral operator, in one of four
/// structural forms.  `support` is the s-integration set of the operator.
class Kernel {
  public:
    enum class Type { General, Separable, Convolution, Volterra };

    static Kernel general(FuncExpr expr_ts, LebesgueSet support);
    static Kernel separable(FuncExpr left_t, FuncExpr right_s, LebesgueSet support);
    static Kernel convolution(FuncExpr profile, bool one_sided, LebesgueSet support);
    /// value = inner(t, s) for gamma <= s <= t, exactly 0 otherwise
    /// (s = t included in the support).
    static Kernel volterra(Kernel inner, double gamma, LebesgueSet support);

    Type type() const { return type_; }
    const LebesgueSet& support() const { return support_; }
    Kernel with_support(LebesgueSet support) const;

    double operator()(double t, double s) const;

    /// True when the kernel support cuts the (t, s) square along a moving
    /// boundary (triangular restriction or one-sided convolution).
    bool is_triangular() const;
    /// True when panel-aligned quadrature on a fixed s-grid is exact for this
    /// kernel (no moving support cut, no moving profile jumps).
    bool has_fixed_s_structure() const;

    /// Breakpoints of the kernel in its first/second slot, ignoring the
    /// moving parts; used for panel alignment of fixed grids.
    std::vector<double> static_breakpoints_t(double lo, double hi) const;
    std::vector<double> static_breakpoints_s(double lo, double hi) const;

    /// Breakpoints in the second slot for a fixed first-slot value (includes
    /// convolution-profile jumps shifted by t).
    std::vector<double> breakpoints_s_at(double t, double lo, double hi) const;
    /// Breakpoints in the first slot for a fixed second-slot value.
    std::vector<double> breakpoints_t_at(double s, double lo, double hi) const;

    /// s-range on which the kernel can be nonzero as a left factor k(t, .).
    LebesgueSet s_support_at(double t) const;
    /// First-slot range on which the kernel can be nonzero as a right factor
    /// k(., tau).
    LebesgueSet t_support_at(double tau) const;

    const Kernel& volterra_inner() const;
    double volterra_gamma() const;
    const FuncExpr& profile() const;
    bool one_sided() const { return one_sided_; }
    const FuncExpr& left_factor() const;
    const FuncExpr& right_factor() const;
    const FuncExpr& general_expr() const;

  private:
    Kernel() = default;

    Type type_ = Type::General;
    FuncExpr expr_;   // General: k(t,s); Separable: left(t); Convolution: profile
    FuncExpr right_;  // Separable: right factor, evaluated at s
    bool one_sided_ = false;
    double gamma_ = 0.0;
    std::shared_ptr<const Kernel> inner_;
    LebesgueSet support_;
};

/// Kernel sampled on a tensor quadrature grid; composition reuses the s-grid
/// weights (Nystrom style).  Row-major: value(i, j) = k(t_i, s_j).
struct GridKernel {
    Grid1D t;
    Grid1D s;
    std::vector<double> values;

    double& at(std::size_t i, std::size_t j) { return values[i * s.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * s.size() + j]; }
    double sup_abs() const;
};

GridKernel sample_kernel(const Kernel& k, const Grid1D& t_grid, const Grid1D& s_grid);

/// k_out(t, tau) = integral over G_mid of left(t, s) * right(s, tau) ds,
/// evaluated on the given output grids.  Kernels with a fixed s-structure go
/// through a shared panel-aligned s-grid; triangular or moving-jump kernels
/// are integrated per output pair on their exact s-range, which keeps
/// spectral accuracy across the moving boundary.
GridKernel compose_kernels(const Kernel& left, const LebesgueSet& g_mid, const Kernel& right,
                           const QuadratureRule& rule, const Grid1D& t_grid,
                           const Grid1D& tau_grid);

/// Convenience overload: output grids are built on `g_mid` itself.
GridKernel compose_kernels(const Kernel& left, const LebesgueSet& g_mid, const Kernel& right,
                           const QuadratureRule& rule);

/// Discrete Nystrom product with a GridKernel factor on a matching s-grid.
GridKernel compose_grid_left(const GridKernel& left, const Kernel& right);
GridKernel compose_grid_right(const Kernel& left, const GridKernel& right,
                              const Grid1D& t_grid);
GridKernel compose_grid_grid(const GridKernel& left, const GridKernel& right);

/// m-th iterated kernel: m = 0 returns the sampled kernel itself, m >= 1
/// composes the kernel with its (m-1)-th iterate over `g`.  Triangular
/// kernels use nested per-pair quadrature (cost grows as (panels*nodes)^m
/// per output entry); fixed-structure kernels use grid products.
GridKernel iterated_kernel(const Kernel& k, const LebesgueSet& g, int m,
                           const QuadratureRule& rule, const Grid1D& t_grid,
                           const Grid1D& s_grid);
GridKernel iterated_kernel(const Kernel& k, const LebesgueSet& g, int m,
                           const QuadratureRule& rule);

/// Integral part of the polynomial calculus: sum_{j=1..n} coeff[j] * k_{j-1}.
/// The constant coefficient is excluded; it belongs to the identity operator.
/// A constant polynomial yields the zero GridKernel.
GridKernel polynomial_kernel(const Kernel& k, const LebesgueSet& g, const Polynomial& f,
                             const QuadratureRule& rule, const Grid1D& t_grid,
                             const Grid1D& s_grid);
GridKernel polynomial_kernel(const Kernel& k, const LebesgueSet& g, const Polynomial& f,
                             const QuadratureRule& rule);

/// Kernel L_p norm on window^2: p = 1 takes sup over s of the t-integral of
/// |k|, p = inf takes sup over t of the s-integral, and 1 < p < inf uses the
/// mixed L_p-L_q form with 1/p + 1/q = 1.  Bounds the operator norm on L_p.
double kernel_norm_bound(const Kernel& k, const Interval& window, double p,
                         const QuadratureRule& rule);
double kernel_norm_bound(const GridKernel& k, double p);

}  // namespace opkernel
