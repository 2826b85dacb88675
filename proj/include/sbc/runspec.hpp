#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "sbc/sim.hpp"

namespace sbc {

struct OutputSpec {
    std::string trace_csv = "trace.csv";
    std::string metrics_json = "metrics.json";
    bool plots = false;
};

/// A complete, validated run description: plant, controller, reference
/// trajectory, integration settings and output routing.
struct RunSpec {
    SffModel model;
    ControllerConfig controller;
    Expr trajectory;
    SimConfig sim;
    OutputSpec output;
};

/// Parse and validate a config document. Unknown keys are rejected.
RunSpec parse_runspec(const nlohmann::json& doc);

RunSpec load_runspec(const std::string& path);

/// Semantically complete serialization; parse_runspec(serialize(s)) equals s
/// field by field.
nlohmann::json serialize(const RunSpec& spec);

/// Built-in validation scenarios c1 (fixed estimates), c2 and c3 (adaptive
/// with different initial estimates) on the 3rd-order benchmark plant.
RunSpec scenario(std::string_view name);
bool is_scenario_name(std::string_view name);

/// Apply a "dotted.path=value" override to a config document.
void apply_override(nlohmann::json& doc, std::string_view assignment);

struct RunResult {
    Trace trace;
    RunMetrics run_metrics;
    std::size_t monotonicity_violations = 0;
    double runtime_seconds = 0.0;
};

RunResult execute(const RunSpec& spec, const StepObserver& observer = {});

nlohmann::json metrics_json(const RunResult& result);

}  // namespace sbc
