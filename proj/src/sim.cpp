#include "sbc/sim.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace sbc {

void SimConfig::validate(int n) const {
    if (!(dt > 0.0)) throw ValidationError("sim: dt must be > 0");
    if (!(duration >= dt)) throw ValidationError("sim: duration must be >= dt");
    if (record_stride < 1) throw ValidationError("sim: record stride must be >= 1");
    if (!x0.empty() && static_cast<int>(x0.size()) != n)
        throw ValidationError("sim: x0 length must equal the model order");
    for (double v : x0)
        if (!std::isfinite(v)) throw ValidationError("sim: x0 must be finite");
}

Jet reference_jet(const Expr& trajectory, double t, int order) {
    JetEnv env{Jet::time(t, order), {}};
    return eval_jet(trajectory, env);
}

namespace {

struct AdaptedIndex {
    std::size_t k, z;
};

std::vector<std::string> theta_labels(const SffModel& model) {
    std::vector<std::string> out;
    for (int k = 1; k <= model.order(); ++k)
        for (std::size_t z = 0; z < model.subsystem(k).theta.size(); ++z)
            out.push_back("theta_" + std::to_string(k) + "_" + std::to_string(z + 1));
    return out;
}

}  // namespace

Trace simulate(const SffModel& model, const ControllerConfig& cfg, const Expr& trajectory,
               const SimConfig& sim, const StepObserver& observer) {
    const int n = model.order();
    cfg.validate(model);
    sim.validate(n);
    if (!trajectory.valid()) throw ValidationError("sim: missing trajectory expression");
    if (trajectory.max_state_index() != 0)
        throw ValidationError("sim: trajectory must be a function of t only");

    std::vector<AdaptedIndex> adapted;
    if (cfg.mode == ControlMode::Adaptive)
        for (std::size_t k = 0; k < cfg.theta.size(); ++k)
            for (std::size_t z = 0; z < cfg.theta[k].size(); ++z)
                if (cfg.theta[k][z].adapt) adapted.push_back({k, z});

    const std::size_t nx = static_cast<std::size_t>(n);
    const std::size_t ny = nx + adapted.size();

    std::vector<double> y(ny, 0.0);
    if (!sim.x0.empty())
        for (std::size_t i = 0; i < nx; ++i) y[i] = sim.x0[i];
    ThetaHat theta_hat = initial_estimates(cfg);
    for (std::size_t i = 0; i < adapted.size(); ++i)
        y[nx + i] = theta_hat[adapted[i].k][adapted[i].z];

    const long long steps = static_cast<long long>(std::llround(sim.duration / sim.dt));
    if (steps < 1) throw ValidationError("sim: duration shorter than one step");

    Trace trace;
    trace.n = n;
    trace.theta_labels = theta_labels(model);
    trace.rows.reserve(static_cast<std::size_t>(steps / sim.record_stride + 2));

    ControllerOutput out;

    auto unpack_estimates = [&](const std::vector<double>& yv) {
        for (std::size_t i = 0; i < adapted.size(); ++i)
            theta_hat[adapted[i].k][adapted[i].z] = yv[nx + i];
    };

    auto derivatives = [&](double t, const std::vector<double>& yv, std::vector<double>& dy,
                           ControllerOutput& o) {
        unpack_estimates(yv);
        const Jet x1d = reference_jet(trajectory, t, n);
        o = cascade_step(model, cfg, std::span<const double>(yv.data(), nx), theta_hat, x1d);
        rhs(model, std::span<const double>(yv.data(), nx), o.u, std::span<double>(dy.data(), nx));
        for (std::size_t i = 0; i < adapted.size(); ++i)
            dy[nx + i] = o.theta_hat_dot[adapted[i].k][adapted[i].z];
    };

    auto record = [&](double t, const ControllerOutput& o) {
        TraceRow row;
        row.t = t;
        row.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(nx));
        row.xd.resize(nx);
        for (std::size_t k = 0; k < nx; ++k) row.xd[k] = o.x_d[k][0];
        row.e = o.e;
        row.u = o.u;
        row.theta_hat.reserve(trace.theta_labels.size());
        for (const auto& sub : theta_hat)
            for (double v : sub) row.theta_hat.push_back(v);
        row.s = o.s;
        row.nu_tot = lyapunov(model, cfg, o.e, theta_hat).nu_tot;
        trace.rows.push_back(std::move(row));
    };

    std::vector<double> k1(ny), k2(ny), k3(ny), k4(ny), ytmp(ny);
    double p_jet_peak = 0.0;

    for (long long step = 0; step <= steps; ++step) {
        const double t = static_cast<double>(step) * sim.dt;
        try {
            derivatives(t, y, k1, out);
            p_jet_peak = std::max(p_jet_peak, out.p_jet_peak);

            if (step % sim.record_stride == 0 || step == steps) record(t, out);
            if (observer)
                observer(SimStep{t, std::span<const double>(y.data(), nx), theta_hat, out});
            if (step == steps) break;

            if (sim.integrator == IntegratorKind::Euler) {
                for (std::size_t i = 0; i < ny; ++i) y[i] += sim.dt * k1[i];
            } else {
                const double h = sim.dt;
                for (std::size_t i = 0; i < ny; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
                derivatives(t + 0.5 * h, ytmp, k2, out);
                for (std::size_t i = 0; i < ny; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
                derivatives(t + 0.5 * h, ytmp, k3, out);
                for (std::size_t i = 0; i < ny; ++i) ytmp[i] = y[i] + h * k3[i];
                derivatives(t + h, ytmp, k4, out);
                for (std::size_t i = 0; i < ny; ++i)
                    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        } catch (const NumericError& err) {
            if (err.t > 0.0) throw;
            throw NumericError(err.what() + std::string(" at t = ") + std::to_string(t), t,
                               err.subsystem);
        }

        for (std::size_t i = 0; i < ny; ++i)
            if (!std::isfinite(y[i]))
                throw NumericError("nonfinite state in channel " + std::to_string(i + 1) +
                                       " at t = " + std::to_string(t + sim.dt),
                                   t + sim.dt, static_cast<int>(i + 1));
    }

    if (p_jet_peak > 1e6)
        std::fprintf(stderr, "sbc: note: peak |p|-jet coefficient %.3g during run\n", p_jet_peak);

    return trace;
}

}  // namespace sbc
