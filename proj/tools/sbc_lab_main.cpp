// sbc_lab: scenario runner and trace comparison tool.
//
// Exit codes: 0 success, 2 configuration/validation failure, 3 numerical
// abort during simulation. Errors go to stderr as one JSON object.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <semaphore>

#include "sbc/runspec.hpp"
#include "sbc/svg.hpp"
#include "sbc/trace_io.hpp"

namespace {

using nlohmann::json;

void print_error(const char* category, const std::string& message) {
    json err{{"category", category}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

int max_parallel_runs() {
    if (const char* env = std::getenv("SBC_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct RunArgs {
    std::string config_path;
    std::string scenarios;
    std::vector<std::string> overrides;
    std::string out_dir;
    bool plots = false;
    double dt = 0.0;
    double duration = 0.0;
    std::string integrator;
};

sbc::RunSpec build_spec(const RunArgs& args, const std::string& scenario_name) {
    json doc;
    if (!scenario_name.empty()) {
        doc = sbc::serialize(sbc::scenario(scenario_name));
    } else {
        std::ifstream f(args.config_path);
        if (!f) throw sbc::ValidationError("cannot open config file: " + args.config_path);
        try {
            doc = json::parse(f);
        } catch (const json::exception& e) {
            throw sbc::ValidationError("config is not valid JSON: " + std::string(e.what()));
        }
    }
    for (const auto& ov : args.overrides) sbc::apply_override(doc, ov);
    if (args.dt > 0.0) sbc::apply_override(doc, "sim.dt=" + std::to_string(args.dt));
    if (args.duration > 0.0)
        sbc::apply_override(doc, "sim.duration=" + std::to_string(args.duration));
    if (!args.integrator.empty()) sbc::apply_override(doc, "sim.integrator=" + args.integrator);
    if (args.plots) sbc::apply_override(doc, "output.plots=true");
    return sbc::parse_runspec(doc);
}

void run_one(const sbc::RunSpec& spec, const std::string& out_dir, const std::string& prefix) {
    const sbc::RunResult result = sbc::execute(spec);

    std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
    std::filesystem::create_directories(dir);

    const auto resolve = [&](const std::string& name) { return (dir / name).string(); };
    sbc::write_csv(result.trace, resolve(spec.output.trace_csv));
    std::ofstream mf(resolve(spec.output.metrics_json), std::ios::binary);
    mf << sbc::metrics_json(result).dump(2) << "\n";
    if (spec.output.plots) sbc::write_plots(result.trace, spec.controller, dir.string(), prefix);

    json summary{{"trace", resolve(spec.output.trace_csv)},
                 {"metrics", sbc::metrics_json(result)}};
    if (!prefix.empty()) summary["scenario"] = prefix.substr(0, prefix.size() - 1);
    std::cout << summary.dump(2) << "\n";
}

int cmd_run(const RunArgs& args) {
    if (args.config_path.empty() == args.scenarios.empty()) {
        print_error("config", "give exactly one of --config or --scenario");
        return 2;
    }

    std::vector<std::string> names;
    if (!args.scenarios.empty()) {
        std::size_t start = 0;
        while (start <= args.scenarios.size()) {
            const std::size_t comma = args.scenarios.find(',', start);
            names.push_back(args.scenarios.substr(
                start, comma == std::string::npos ? comma : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }

    try {
        if (names.empty()) {
            run_one(build_spec(args, ""), args.out_dir, "");
            return 0;
        }
        if (names.size() == 1) {
            run_one(build_spec(args, names[0]), args.out_dir, names[0] + "_");
            return 0;
        }
        // Scenario batch: independent runs, capped parallelism.
        std::counting_semaphore<64> slots(std::min(max_parallel_runs(), 64));
        std::vector<std::future<void>> jobs;
        for (const auto& name : names) {
            jobs.push_back(std::async(std::launch::async, [&, name] {
                slots.acquire();
                try {
                    run_one(build_spec(args, name), args.out_dir, name + "_");
                } catch (...) {
                    slots.release();
                    throw;
                }
                slots.release();
            }));
        }
        for (auto& j : jobs) j.get();
        return 0;
    } catch (const sbc::NumericError& e) {
        print_error("numeric", e.what());
        return 3;
    } catch (const sbc::Error& e) {
        print_error("config", e.what());
        return 2;
    }
}

int cmd_compare(const std::string& a_path, const std::string& b_path, double t_min, double t_max) {
    try {
        const sbc::Trace a = sbc::read_csv(a_path);
        const sbc::Trace b = sbc::read_csv(b_path);
        json report = json::object();
        for (const auto& [name, diff] : sbc::compare(a, b, t_min, t_max)) report[name] = diff;
        json out{{"t_min", t_min}, {"max_abs_diff", report}};
        if (std::isfinite(t_max)) out["t_max"] = t_max;
        std::cout << out.dump(2) << "\n";
        return 0;
    } catch (const sbc::Error& e) {
        print_error("config", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive subsystem-based control simulator for strict-feedback systems"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Simulate a config file or built-in scenario");
    run->add_option("--config", run_args.config_path, "JSON config path");
    run->add_option("--scenario", run_args.scenarios, "Built-in scenario(s): c1, c2, c3 (comma separated)");
    run->add_option("--set", run_args.overrides, "Override config values, path.to.key=value");
    run->add_option("--out", run_args.out_dir, "Output directory (default: current)");
    run->add_flag("--plots", run_args.plots, "Also write SVG plots");
    run->add_option("--dt", run_args.dt, "Override integration step (seconds)");
    run->add_option("--duration", run_args.duration, "Override sim duration (seconds)");
    run->add_option("--integrator", run_args.integrator, "Override integrator: euler or rk4");

    std::string cmp_a, cmp_b;
    double t_min = 0.0, t_max = std::numeric_limits<double>::infinity();
    CLI::App* cmp = app.add_subcommand("compare", "Per-channel max |a-b| between two trace CSVs");
    cmp->add_option("a", cmp_a, "First trace CSV")->required();
    cmp->add_option("b", cmp_b, "Second trace CSV")->required();
    cmp->add_option("--t-min", t_min, "Window start (seconds)");
    cmp->add_option("--t-max", t_max, "Window end (seconds)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(run_args);
    if (cmp->parsed()) return cmd_compare(cmp_a, cmp_b, t_min, t_max);
    return 0;
}
