#pragma once

#include <functional>
#include <iosfwd>

#include "opkernel/config.hpp"

namespace opkernel {
namespace fixtures {

/// One expected-vs-observed row of a fixture run.
struct FixtureRow {
    std::string name;
    std::string expected;
    std::string observed;
    bool match = false;
};

struct FixtureResult {
    std::string fixture;
    std::vector<FixtureRow> rows;
    CheckReport report;

    bool all_match() const;
};

/// Trig kernel pair on [0, pi] satisfying AB = B A^2 with BA^2 != 0.
struct TrigPair {
    IntegralOperator a;
    IntegralOperator b;
    Grid1D grid;
};
TrigPair make_trig_pair(const QuadratureRule& rule);

/// Known fixture names: example1, volterra_ab0, volterra_counterexample,
/// volterra_sufficient, volterra_bothzero, conv_commute.
std::vector<std::string> fixture_names();

/// Runs a named scenario end to end.  Throws ConfigError on unknown names.
FixtureResult run_fixture(const std::string& name, const QuadratureRule& rule,
                          std::uint64_t seed);

/// Renders the expected-vs-observed table.
std::string format_table(const FixtureResult& result);

}  // namespace fixtures
}  // namespace opkernel
