#pragma once

#include <string>

#include "sbc/controller.hpp"
#include "sbc/trace.hpp"

namespace sbc {

/// Polyline renderings of a run: tracking (desired vs actual per state, plus
/// u), tracking errors, and the estimate channels with their bounds and
/// activation edges. Presentation only.
void write_plots(const Trace& trace, const ControllerConfig& cfg, const std::string& dir,
                 const std::string& prefix);

}  // namespace sbc
