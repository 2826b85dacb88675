#include "sbc/runspec.hpp"

#include <chrono>
#include <fstream>

namespace sbc {

using nlohmann::json;

namespace {

void require_object(const json& j, const char* where) {
    if (!j.is_object()) throw ValidationError(std::string(where) + ": expected an object");
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            throw ValidationError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

double number_at(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ValidationError(std::string(where) + ": missing numeric '" + key + "'");
    return j.at(key).get<double>();
}

std::vector<double> number_list(const json& j, const char* where) {
    if (!j.is_array()) throw ValidationError(std::string(where) + ": expected an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError(std::string(where) + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Expr parse_expression(const json& j, const char* where) {
    if (!j.is_string()) throw ValidationError(std::string(where) + ": expected an expression string");
    try {
        return parse(j.get<std::string>());
    } catch (const ParseError& e) {
        throw ValidationError(std::string(where) + ": " + e.what());
    }
}

SffModel parse_model(const json& j) {
    require_object(j, "model");
    reject_unknown_keys(j, {"n", "subsystems"}, "model");
    if (!j.contains("subsystems") || !j.at("subsystems").is_array())
        throw ValidationError("model: missing 'subsystems' array");
    std::vector<SubsystemSpec> subs;
    for (const auto& s : j.at("subsystems")) {
        require_object(s, "model.subsystems[]");
        reject_unknown_keys(s, {"theta", "regressors", "gain"}, "model.subsystems[]");
        SubsystemSpec spec;
        spec.theta = number_list(s.at("theta"), "model.subsystems[].theta");
        if (s.contains("regressors"))
            for (const auto& r : s.at("regressors"))
                spec.regressors.push_back(parse_expression(r, "model regressor"));
        if (!s.contains("gain")) throw ValidationError("model.subsystems[]: missing 'gain'");
        spec.gain = parse_expression(s.at("gain"), "model gain");
        subs.push_back(std::move(spec));
    }
    if (j.contains("n") && j.at("n").get<std::size_t>() != subs.size())
        throw ValidationError("model: 'n' does not match the subsystem count");
    return SffModel(std::move(subs));
}

ParameterLaw parse_law(const json& j, int smoothness) {
    require_object(j, "controller.adapt[][]");
    reject_unknown_keys(j, {"initial", "adapt", "rho", "sigma", "lower", "upper", "activation_c"},
                        "controller.adapt[][]");
    ParameterLaw law;
    law.value = number_at(j, "initial", "controller.adapt[][]");
    law.adapt = j.value("adapt", false);
    if (j.contains("rho") || law.adapt) {
        ProjectionConfig pc;
        pc.rho = number_at(j, "rho", "controller.adapt[][]");
        pc.sigma = number_at(j, "sigma", "controller.adapt[][]");
        pc.lower = number_at(j, "lower", "controller.adapt[][]");
        pc.upper = number_at(j, "upper", "controller.adapt[][]");
        pc.activation = number_at(j, "activation_c", "controller.adapt[][]");
        pc.smoothness_order = smoothness;
        law.projection = pc;
    }
    return law;
}

ControllerConfig parse_controller(const json& j, const SffModel& model) {
    require_object(j, "controller");
    reject_unknown_keys(j, {"mode", "lambda", "delta", "fixed_theta", "adapt"}, "controller");
    ControllerConfig cfg;
    const std::string mode = j.value("mode", "fixed");
    if (mode == "fixed")
        cfg.mode = ControlMode::Fixed;
    else if (mode == "adaptive")
        cfg.mode = ControlMode::Adaptive;
    else
        throw ValidationError("controller: mode must be 'fixed' or 'adaptive'");
    cfg.lambda = number_list(j.at("lambda"), "controller.lambda");
    cfg.delta = j.contains("delta") ? number_list(j.at("delta"), "controller.delta")
                                    : std::vector<double>{};

    const int n = model.order();
    if (j.contains("fixed_theta") && j.contains("adapt"))
        throw ValidationError("controller: give either 'fixed_theta' or 'adapt', not both");
    if (j.contains("fixed_theta")) {
        const json& ft = j.at("fixed_theta");
        if (!ft.is_array() || static_cast<int>(ft.size()) != n)
            throw ValidationError("controller.fixed_theta: one value list per subsystem");
        for (const auto& sub : ft) {
            std::vector<ParameterLaw> laws;
            for (double v : number_list(sub, "controller.fixed_theta[]"))
                laws.push_back(ParameterLaw{v, false, std::nullopt});
            cfg.theta.push_back(std::move(laws));
        }
    } else if (j.contains("adapt")) {
        const json& ad = j.at("adapt");
        if (!ad.is_array() || static_cast<int>(ad.size()) != n)
            throw ValidationError("controller.adapt: one law list per subsystem");
        for (int k = 1; k <= n; ++k) {
            std::vector<ParameterLaw> laws;
            for (const auto& lj : ad[static_cast<std::size_t>(k - 1)])
                laws.push_back(parse_law(lj, std::max(1, n - k)));
            cfg.theta.push_back(std::move(laws));
        }
    } else {
        throw ValidationError("controller: missing 'fixed_theta' or 'adapt'");
    }
    cfg.validate(model);
    return cfg;
}

SimConfig parse_sim(const json& j, int n) {
    SimConfig sim;
    if (j.is_null()) {
        sim.validate(n);
        return sim;
    }
    require_object(j, "sim");
    reject_unknown_keys(j, {"dt", "duration", "integrator", "x0", "record_stride"}, "sim");
    if (j.contains("dt")) sim.dt = number_at(j, "dt", "sim");
    if (j.contains("duration")) sim.duration = number_at(j, "duration", "sim");
    if (j.contains("integrator")) {
        const std::string name = j.at("integrator").get<std::string>();
        if (name == "euler")
            sim.integrator = IntegratorKind::Euler;
        else if (name == "rk4")
            sim.integrator = IntegratorKind::Rk4;
        else
            throw ValidationError("sim: integrator must be 'euler' or 'rk4'");
    }
    if (j.contains("x0")) sim.x0 = number_list(j.at("x0"), "sim.x0");
    if (j.contains("record_stride")) sim.record_stride = j.at("record_stride").get<int>();
    sim.validate(n);
    return sim;
}

OutputSpec parse_output(const json& j) {
    OutputSpec out;
    if (j.is_null()) return out;
    require_object(j, "output");
    reject_unknown_keys(j, {"trace_csv", "metrics_json", "plots"}, "output");
    if (j.contains("trace_csv")) out.trace_csv = j.at("trace_csv").get<std::string>();
    if (j.contains("metrics_json")) out.metrics_json = j.at("metrics_json").get<std::string>();
    if (j.contains("plots")) out.plots = j.at("plots").get<bool>();
    return out;
}

}  // namespace

RunSpec parse_runspec(const json& doc) {
    require_object(doc, "config");
    reject_unknown_keys(doc, {"model", "controller", "trajectory", "sim", "output"}, "config");
    if (!doc.contains("model")) throw ValidationError("config: missing 'model'");
    if (!doc.contains("controller")) throw ValidationError("config: missing 'controller'");
    if (!doc.contains("trajectory")) throw ValidationError("config: missing 'trajectory'");

    SffModel model = parse_model(doc.at("model"));
    ControllerConfig controller = parse_controller(doc.at("controller"), model);
    Expr trajectory = parse_expression(doc.at("trajectory"), "trajectory");
    if (trajectory.max_state_index() != 0)
        throw ValidationError("trajectory: must be a function of t only");
    SimConfig sim = parse_sim(doc.contains("sim") ? doc.at("sim") : json(), model.order());
    OutputSpec output = parse_output(doc.contains("output") ? doc.at("output") : json());

    return RunSpec{std::move(model), std::move(controller), std::move(trajectory), std::move(sim),
                   std::move(output)};
}

RunSpec load_runspec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ValidationError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_runspec(doc);
}

json serialize(const RunSpec& spec) {
    json doc;
    json subs = json::array();
    for (const auto& ss : spec.model.subsystems()) {
        json s;
        s["theta"] = ss.theta;
        json regs = json::array();
        for (const auto& r : ss.regressors) regs.push_back(render(r));
        s["regressors"] = regs;
        s["gain"] = render(ss.gain);
        subs.push_back(std::move(s));
    }
    doc["model"] = {{"n", spec.model.order()}, {"subsystems", subs}};

    json ctrl;
    ctrl["mode"] = spec.controller.mode == ControlMode::Fixed ? "fixed" : "adaptive";
    ctrl["lambda"] = spec.controller.lambda;
    ctrl["delta"] = spec.controller.delta;
    json adapt = json::array();
    for (const auto& sub : spec.controller.theta) {
        json laws = json::array();
        for (const auto& law : sub) {
            json lj;
            lj["initial"] = law.value;
            lj["adapt"] = law.adapt;
            if (law.projection) {
                lj["rho"] = law.projection->rho;
                lj["sigma"] = law.projection->sigma;
                lj["lower"] = law.projection->lower;
                lj["upper"] = law.projection->upper;
                lj["activation_c"] = law.projection->activation;
            }
            laws.push_back(std::move(lj));
        }
        adapt.push_back(std::move(laws));
    }
    ctrl["adapt"] = adapt;
    doc["controller"] = std::move(ctrl);

    doc["trajectory"] = render(spec.trajectory);
    doc["sim"] = {{"dt", spec.sim.dt},
                  {"duration", spec.sim.duration},
                  {"integrator", spec.sim.integrator == IntegratorKind::Euler ? "euler" : "rk4"},
                  {"x0", spec.sim.x0},
                  {"record_stride", spec.sim.record_stride}};
    doc["output"] = {{"trace_csv", spec.output.trace_csv},
                     {"metrics_json", spec.output.metrics_json},
                     {"plots", spec.output.plots}};
    return doc;
}

namespace {

json scenario_doc(std::string_view name) {
    // 3rd-order benchmark plant: xdot1 = a1 x1^3 + x2, xdot2 = a2 (x1^2 + x2^2) + x3,
    // xdot3 = u, with a1 = a2 = 5 and loosely tuned feedback gains. The update
    // gains keep rho * sigma = 1000 on both adapted channels.
    json doc;
    doc["model"] = {{"n", 3},
                    {"subsystems",
                     {{{"theta", {1.0, 5.0}}, {"regressors", {"x1^3"}}, {"gain", "1"}},
                      {{"theta", {1.0, 5.0}}, {"regressors", {"x1^2 + x2^2"}}, {"gain", "1"}},
                      {{"theta", {1.0}}, {"regressors", json::array()}, {"gain", "1"}}}}};

    const bool adaptive = name != "c1";
    const double init_12 = name == "c3" ? 0.1 : 6.0;
    const double init_22 = name == "c3" ? 9.9 : 4.0;

    auto projected = [](double initial, bool adapt, double rho, double sigma) {
        return json{{"initial", initial}, {"adapt", adapt},      {"rho", rho},
                    {"sigma", sigma},     {"lower", 1.0},        {"upper", 9.0},
                    {"activation_c", 0.5}};
    };

    doc["controller"] = {
        {"mode", adaptive ? "adaptive" : "fixed"},
        {"lambda", {10.0, 20.0, 40.0}},
        {"delta", {10.0, 20.0}},
        {"adapt",
         {json::array({json{{"initial", 1.0}, {"adapt", false}},
                       projected(init_12, adaptive, 1000.0, 1.0)}),
          json::array({json{{"initial", 1.0}, {"adapt", false}},
                       projected(init_22, adaptive, 2.0, 500.0)}),
          json::array({json{{"initial", 1.0}, {"adapt", false}}})}}};

    doc["trajectory"] =
        "piecewise(t < 5 : sin(2*pi*t)*tanh(t^3), sin(2*pi*t)*tanh(t^3)*(1 - tanh((t-5)^3)))";
    doc["sim"] = {{"dt", 1e-5},
                  {"duration", 10.0},
                  {"integrator", "rk4"},
                  {"x0", {0.0, 0.0, 0.0}},
                  {"record_stride", 100}};
    doc["output"] = {{"trace_csv", std::string(name) + "_trace.csv"},
                     {"metrics_json", std::string(name) + "_metrics.json"},
                     {"plots", false}};
    return doc;
}

}  // namespace

bool is_scenario_name(std::string_view name) {
    return name == "c1" || name == "c2" || name == "c3";
}

RunSpec scenario(std::string_view name) {
    if (!is_scenario_name(name))
        throw ValidationError("unknown scenario '" + std::string(name) + "' (expected c1, c2 or c3)");
    return parse_runspec(scenario_doc(name));
}

void apply_override(nlohmann::json& doc, std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ValidationError("override must look like path.to.key=value");
    std::string_view path = assignment.substr(0, eq);
    std::string_view value = assignment.substr(eq + 1);

    json* node = &doc;
    std::size_t start = 0;
    while (start <= path.size()) {
        const std::size_t dot = path.find('.', start);
        const std::string key(path.substr(start, dot == std::string_view::npos ? dot : dot - start));
        if (key.empty()) throw ValidationError("override path has an empty segment");
        const bool last = dot == std::string_view::npos;

        json* next = nullptr;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = static_cast<std::size_t>(std::stoul(key));
            } catch (...) {
                throw ValidationError("override path indexes an array with '" + key + "'");
            }
            if (idx >= node->size()) throw ValidationError("override index out of range: " + key);
            next = &(*node)[idx];
        } else {
            next = &(*node)[key];  // creates missing object keys
        }
        if (last) {
            json parsed = json::parse(std::string(value), nullptr, false);
            *next = parsed.is_discarded() ? json(std::string(value)) : parsed;
            return;
        }
        node = next;
        start = dot + 1;
    }
}

RunResult execute(const RunSpec& spec, const StepObserver& observer) {
    RunResult result;
    const auto begin = std::chrono::steady_clock::now();
    result.trace = simulate(spec.model, spec.controller, spec.trajectory, spec.sim, observer);
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    result.run_metrics = metrics(result.trace);
    result.monotonicity_violations = monotonicity_report(result.trace, spec.controller).size();
    return result;
}

json metrics_json(const RunResult& result) {
    json theta = json::object();
    for (std::size_t i = 0; i < result.run_metrics.theta_labels.size(); ++i)
        theta[result.run_metrics.theta_labels[i]] = result.run_metrics.theta_hat_terminal[i];
    return json{{"max_abs_e", result.run_metrics.max_abs_e},
                {"final_abs_e", result.run_metrics.final_abs_e},
                {"theta_hat_terminal", theta},
                {"monotonicity_violations", result.monotonicity_violations},
                {"runtime_seconds", result.runtime_seconds}};
}

}  // namespace sbc
