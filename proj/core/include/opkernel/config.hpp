#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "opkernel/convolution.hpp"
#include "opkernel/volterra.hpp"

namespace opkernel {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One declarative experiment: two kernels, a polynomial, a checker kind, and
/// optional tolerance/quadrature/battery overrides.
struct RunConfig {
    std::string checker;

    // kernel specs as parsed JSON subtrees, interpreted per checker kind
    std::optional<Kernel> kernel_a;
    std::optional<Kernel> kernel_b;
    std::optional<LebesgueSet> x_domain;
    std::optional<Interval> window;

    Polynomial poly;
    double delta = 1.0;
    int power = 1;

    // volterra-specific pieces
    std::optional<VolterraFactors> factors;
    TriangularRegion region;
    std::optional<double> lambda;
    double alpha = 0.0;
    double beta = 1.0;

    // convolution-specific
    std::optional<FuncExpr> profile_a;
    std::optional<FuncExpr> profile_b;

    // compose command
    std::optional<int> iterate_m;
    bool has_f = false;

    AeTolerance tolerance;
    bool tolerance_given = false;
    QuadratureRule rule;
    double p = 2.0;
    int battery_size = 10;
    std::uint64_t seed = 1;
};

LebesgueSet parse_set_json(const std::string& json_text);

/// Parse a kernel spec from its JSON object text.
Kernel parse_kernel_json(const std::string& json_text);

RunConfig load_run_config(const std::filesystem::path& file);

/// Execute the configured check.  Returns the report; the checker kind
/// decides which library entry point runs.
CheckReport run_configured_check(const RunConfig& config);

}  // namespace opkernel
