#include "opkernel/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace opkernel {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string report_to_json(const CheckReport& report) {
    ordered_json j;
    j["conditions"] = ordered_json::array();
    for (const auto& c : report.conditions) {
        ordered_json cj;
        cj["region"] = c.region;
        cj["sup_residual"] = c.sup_residual;
        cj["l2_residual"] = c.l2_residual;
        cj["violation_measure"] = c.violation_measure;
        cj["pass"] = c.pass;
        j["conditions"].push_back(std::move(cj));
    }
    j["overall_pass"] = report.overall_pass;
    j["tolerances"] = {{"eps_value", report.tolerances.eps_value},
                       {"eps_rel", report.tolerances.eps_rel},
                       {"eps_measure", report.tolerances.eps_measure}};
    j["verdict"] = report.verdict;
    if (std::isfinite(report.direct_residual)) {
        j["direct_residual"] = report.direct_residual;
    }
    j["notes"] = report.notes;
    j["wall_time_ms"] = report.wall_time_ms;
    return j.dump(2) + "\n";
}

std::string report_to_csv(const CheckReport& report) {
    std::ostringstream os;
    os << "condition,region,sup_residual,l2_residual,violation_measure,pass\n";
    for (std::size_t i = 0; i < report.conditions.size(); ++i) {
        const auto& c = report.conditions[i];
        os << (i + 1) << ",\"" << c.region << "\"," << format_value(c.sup_residual) << ","
           << format_value(c.l2_residual) << "," << format_value(c.violation_measure) << ","
           << (c.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

std::string grid_kernel_to_csv(const GridKernel& k) {
    std::ostringstream os;
    os << "t,s,value\n";
    for (std::size_t i = 0; i < k.t.size(); ++i) {
        for (std::size_t j = 0; j < k.s.size(); ++j) {
            os << format_value(k.t.points[i]) << "," << format_value(k.s.points[j]) << ","
               << format_value(k.at(i, j)) << "\n";
        }
    }
    return os.str();
}

}  // namespace opkernel
