#pragma once

#include <string>
#include <vector>

namespace sbc {

struct TraceRow {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> xd;
    std::vector<double> e;
    double u = 0.0;
    std::vector<double> theta_hat;  ///< flattened k-major, z-minor
    std::vector<double> s;
    double nu_tot = 0.0;
};

/// Time-indexed simulation record at a uniform sampling grid.
struct Trace {
    int n = 0;
    std::vector<std::string> theta_labels;  ///< "theta_<k>_<z>" per flattened estimate
    std::vector<TraceRow> rows;
};

}  // namespace sbc
