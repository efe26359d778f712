#pragma once

#include <optional>

#include "opkernel/covariance.hpp"

namespace opkernel {

/// Operator (Ax)(t) = outer(t) * integral from alpha to t of inner(s) x(s) ds
/// on [alpha, beta].
struct SeparableVolterra {
    FuncExpr outer;
    FuncExpr inner;
    double alpha = 0.0;
    double beta = 1.0;

    Kernel kernel() const;
    IntegralOperator make_operator(double p, const QuadratureRule& rule) const;
};

/// Region parameters of the two-sided lower-limit decomposition:
/// Gamma = {(t,s,tau): gb <= t <= beta, gb <= s <= t, gb <= tau <= t},
/// Delta = [gb, beta] x [ga, gb].
struct TriangularRegion {
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    double beta = 1.0;
};

/// Narrowing structure for the simple-separable checks.
struct VolterraFactors {
    FuncExpr a;  // outer factor of A
    FuncExpr c;  // inner factor of A
    FuncExpr b;  // outer factor of B
    FuncExpr e;  // inner factor of B
    double alpha = 0.0;
    double beta = 1.0;
};

struct VolterraCheckOptions {
    double p = 2.0;
    int battery_size = 10;
    std::uint64_t seed = 1;
};

/// Necessary condition for AB = B F(A) with deg F >= 2: the product a*b*c*e
/// must vanish a.e.  Reports `relation_holds` (direct residual) and
/// `support_ok` separately; a run where the relation holds while the support
/// condition fails contradicts the theory and fails the report.
CheckReport check_simple_necessary(const VolterraFactors& f, const Polynomial& poly,
                                   const AeTolerance& tol, const QuadratureRule& rule,
                                   const VolterraCheckOptions& opt = {});

/// Sufficient condition: a*e = 0 a.e. and b*c = 0 a.e. imply AB = B F(A) = 0
/// for any F with F(0) = 0.  When the hypothesis fails, nothing is asserted.
CheckReport check_simple_sufficient(const VolterraFactors& f, const Polynomial& poly,
                                    const AeTolerance& tol, const QuadratureRule& rule,
                                    const VolterraCheckOptions& opt = {});

/// AB = delta BA for Volterra operators with lower limits gamma_a <= gamma_b:
/// pointwise kernel identity on Gamma plus a vanishing cross-integral on
/// Delta; cross-checked by the direct residual of the full operators.
/// `ka` and `kb` are the inner kernels (no triangular wrapper).
CheckReport check_qplane(const Kernel& ka, const Kernel& kb, const TriangularRegion& region,
                         double delta, const AeTolerance& tol, const QuadratureRule& rule,
                         const VolterraCheckOptions& opt = {});

/// Sufficient conditions for AB = BA: on the probe set where both k_B slots
/// are nonzero, k_A either vanishes at both slots or equals lambda * k_B at
/// both; off that set the two support overlaps must be a.e. zero.  When the
/// conditions hold the direct commutator residual is asserted; otherwise the
/// report is marked "not sufficient - no conclusion" (inconclusive).
CheckReport check_commut_sufficient(const Kernel& ka, const Kernel& kb, double alpha,
                                    double beta, std::optional<double> lambda,
                                    const AeTolerance& tol, const QuadratureRule& rule,
                                    const VolterraCheckOptions& opt = {});

/// Necessary condition for AB = delta BA != 0 with simple separable factors:
/// (delta - 1) a b c e vanishes a.e.  Antecedent and consequent are reported
/// separately; the report fails only when the antecedent holds and the
/// consequent does not.
CheckReport check_delta_commut_necessary(const VolterraFactors& f, double delta,
                                         const AeTolerance& tol, const QuadratureRule& rule,
                                         const VolterraCheckOptions& opt = {});

/// AB = BA = 0 iff both three-dimensional support overlaps
/// {k_A(t,s) != 0 and k_B(s,tau) != 0} and {k_A(s,tau) != 0 and k_B(t,s) != 0}
/// have measure zero on the triangle tau <= s <= t.  Cross-checked against
/// the computed AB and BA actions.
CheckReport check_both_zero(const Kernel& ka, const Kernel& kb, double alpha, double beta,
                            const AeTolerance& tol, const QuadratureRule& rule,
                            const VolterraCheckOptions& opt = {});

}  // namespace opkernel
