#pragma once

#include "opkernel/covariance.hpp"

namespace opkernel {

/// Values of a transform K(s) = integral of exp(-s t) f(t) dt on a real
/// s-grid, with the subset of s-points where the truncated integral is
/// numerically stable under window doubling.
struct LaplaceGrid {
    std::vector<double> s_points;
    std::vector<double> values;
    std::vector<bool> stable;

    bool stable_everywhere() const;
};

/// Samples of (f * g)(t) = integral of f(t - u) g(u) du on `window`,
/// truncating both factors to `window`.  Uses an FFT fast path on a uniform
/// grid when neither profile has jumps; profiles with indicators always use
/// panel-aligned direct quadrature.  Throws when the truncation diverges
/// (windowed L1 mass still growing under window doubling).
GridFunction convolve(const FuncExpr& f, const FuncExpr& g, const Interval& window,
                      const QuadratureRule& rule);

LaplaceGrid laplace_transform(const FuncExpr& f, std::span<const double> s_grid,
                              const Interval& t_window, const QuadratureRule& rule);

/// Default transform grid: 101 equispaced points on [-3, 3].
std::vector<double> default_laplace_grid();

/// Shared knobs for the convolution-type checks.
struct ConvCheckOptions {
    Interval window{-20.0, 20.0};            // two-sided truncation
    Interval one_sided_window{0.0, 40.0};    // [0, inf) truncation
    std::vector<double> s_grid = default_laplace_grid();
    int battery_size = 10;
    std::uint64_t seed = 1;
};

/// AB = B F(A) for two-sided convolution operators with F(0) = 0: the
/// transform-support overlap test.  D(s) = K_A(s) - sum_j delta_j K_A(s)^j;
/// passes when {|K_B| > eps} n {|D| > eps} has a.e.-zero measure on the
/// common stable s-grid.  Cross-checked by the direct residual of the
/// truncated operators.
CheckReport check_conv_poly(const FuncExpr& ka_profile, const FuncExpr& kb_profile,
                            const Polynomial& f, const AeTolerance& tol,
                            const QuadratureRule& rule, const ConvCheckOptions& opt = {});

/// AB = delta B A^n (n >= 2) for two-sided convolution operators: holds iff
/// the profile convolution vanishes a.e.  Includes the compact-support
/// additivity diagnostic for the convolution's support endpoints.
CheckReport check_conv_monomial(const FuncExpr& ka_profile, const FuncExpr& kb_profile,
                                double delta, int n, const AeTolerance& tol,
                                const QuadratureRule& rule, const ConvCheckOptions& opt = {});

/// AB = delta B A^n (n >= 2) for one-sided convolution operators on [0, inf):
/// impossible for nonzero profiles; degenerate (zero) profiles pass.
/// Profiles must vanish on the negative axis.
CheckReport check_one_sided_monomial(const FuncExpr& ka_profile, const FuncExpr& kb_profile,
                                     double delta, int n, const AeTolerance& tol,
                                     const QuadratureRule& rule,
                                     const ConvCheckOptions& opt = {});

/// Numeric essential support of a grid function: smallest/largest points with
/// |value| above the tolerance threshold.  Returns false when none exceed it.
bool numeric_support(const GridFunction& f, const AeTolerance& tol, double* lo, double* hi);

}  // namespace opkernel
