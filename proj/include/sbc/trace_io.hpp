#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sbc/trace.hpp"

namespace sbc {

/// Column layout: t,x1..xn,x1d..xnd,e1..en,u,theta_<k>_<z>...,s1..s{n-1},nu_tot
/// with 17 significant digits and LF line endings.
void write_csv(const Trace& trace, const std::string& path);

Trace read_csv(const std::string& path);

/// Per-channel max |a - b| over rows with t in [t_min, t_max]. Requires both
/// traces to share the sampling grid and layout.
std::vector<std::pair<std::string, double>> compare(const Trace& a, const Trace& b,
                                                    double t_min = 0.0,
                                                    double t_max = std::numeric_limits<double>::infinity());

/// Column names in file order, excluding t.
std::vector<std::string> column_names(const Trace& trace);

}  // namespace sbc
