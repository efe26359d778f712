#pragma once

#include <string>

#include "opkernel/operator.hpp"

namespace opkernel {

/// Residual of one kernel condition on its region, with the a.e. verdict.
struct ConditionResult {
    std::string region;
    double sup_residual = 0.0;
    double l2_residual = 0.0;
    double violation_measure = 0.0;
    bool pass = true;
};

/// Structured verdict of a checker run.  `overall_pass` holds exactly when
/// every evaluated condition passes; `verdict` additionally distinguishes
/// the inconclusive case where the kernel-level conditions and the
/// action-level oracle disagree.
struct CheckReport {
    std::vector<ConditionResult> conditions;
    bool overall_pass = true;
    AeTolerance tolerances;
    double wall_time_ms = 0.0;
    std::string verdict = "pass";  // pass | fail | inconclusive
    double direct_residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> notes;

    void finish(bool kernel_pass, bool oracle_pass);
};

/// Direct-residual threshold used whenever a kernel-level verdict is
/// cross-checked against sequential application.
inline constexpr double kOracleResidualPass = 1e-7;

struct DirectResidual {
    double max_relative = 0.0;
    std::vector<double> per_function;
};

/// Action-level oracle for AB = B F(A): max over the battery of
/// ||A(Bx) - B(F(A)x)||_2 / (1 + ||x||_2), computed purely by sequential
/// application, never through composed kernels.  When `eval_domain` is
/// non-empty the residual norm only counts grid points inside it (used for
/// truncated-line surrogates, where the relation cannot hold near the
/// window edges).
DirectResidual direct_residual(const IntegralOperator& a, const IntegralOperator& b,
                               const Polynomial& f, const std::vector<GridFunction>& battery,
                               const LebesgueSet& eval_domain = {});

/// Kernel-condition test for AB = B F(A) on the decomposition
/// X x G, X x (G_B \ G), X x (G_A \ G) with G = G_A n G_B.  Regions of
/// measure zero are skipped.  The direct-residual oracle always runs; when
/// it disagrees with the kernel conditions the verdict is "inconclusive"
/// and both residuals are reported.  `eval_domain` overrides the t-domain X
/// of the conditions (defaults to the operators' output domain).
CheckReport check_covariance(const IntegralOperator& a, const IntegralOperator& b,
                             const Polynomial& f, const AeTolerance& tol,
                             const QuadratureRule& rule,
                             const std::vector<GridFunction>& battery,
                             const LebesgueSet& eval_domain = {});

/// AB - delta1 BA = delta0 B, i.e. F(z) = delta0 + delta1 z.
CheckReport check_affine(const IntegralOperator& a, const IntegralOperator& b, double delta0,
                         double delta1, const AeTolerance& tol, const QuadratureRule& rule,
                         const std::vector<GridFunction>& battery,
                         const LebesgueSet& eval_domain = {});

/// AB = delta B A^d, i.e. F(z) = delta z^d; delta must be nonzero.
CheckReport check_monomial(const IntegralOperator& a, const IntegralOperator& b, double delta,
                           int d, const AeTolerance& tol, const QuadratureRule& rule,
                           const std::vector<GridFunction>& battery,
                           const LebesgueSet& eval_domain = {});

/// True when the operator's kernel fails the a.e.-zero test on its full
/// X x G domain (i.e. the operator is numerically nonvanishing).
bool check_nonvanishing(const IntegralOperator& op, const AeTolerance& tol,
                        const QuadratureRule& rule);

}  // namespace opkernel
