#pragma once

#include <string>

#include "opkernel/covariance.hpp"

namespace opkernel {

/// Stable JSON rendering of a report:
/// {conditions:[{region, sup_residual, l2_residual, violation_measure, pass}],
///  overall_pass, tolerances, wall_time_ms, verdict, direct_residual, notes}.
/// Field order is fixed; identical reports serialize to identical bytes.
std::string report_to_json(const CheckReport& report);

/// Residual/condition rows as CSV: condition,region,sup_residual,l2_residual,
/// violation_measure,pass with one header row.
std::string report_to_csv(const CheckReport& report);

/// GridKernel dump as CSV, row-major (t outer, s inner), header "t,s,value".
std::string grid_kernel_to_csv(const GridKernel& k);

}  // namespace opkernel
