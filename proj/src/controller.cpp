#include "sbc/controller.hpp"

#include <cmath>
#include <string>

#include "sbc/analysis.hpp"

namespace sbc {

void ControllerConfig::validate(const SffModel& model) const {
    const std::size_t n = static_cast<std::size_t>(model.order());
    if (lambda.size() != n) throw ValidationError("controller: lambda needs one gain per subsystem");
    for (double l : lambda)
        if (!(l > 0.0)) throw ValidationError("controller: lambda gains must be > 0");
    if (delta.size() + 1 != n)
        throw ValidationError("controller: delta needs n-1 gains");
    for (double d : delta)
        if (!(d > 0.0)) throw ValidationError("controller: delta gains must be > 0");
    if (theta.size() != n) throw ValidationError("controller: theta table must match the model");
    for (std::size_t k = 0; k < n; ++k) {
        if (theta[k].size() != model.subsystem(static_cast<int>(k + 1)).theta.size())
            throw ValidationError("controller: theta table shape must match the model");
        for (const auto& law : theta[k]) {
            if (law.adapt && mode == ControlMode::Adaptive) {
                if (!law.projection)
                    throw ValidationError("controller: adapted parameter needs a projection config");
            }
            if (law.projection) law.projection->validate();
        }
    }
}

ThetaHat initial_estimates(const ControllerConfig& cfg) {
    ThetaHat th(cfg.theta.size());
    for (std::size_t k = 0; k < cfg.theta.size(); ++k) {
        th[k].reserve(cfg.theta[k].size());
        for (const auto& law : cfg.theta[k]) th[k].push_back(law.value);
    }
    return th;
}

std::vector<double> stability_weights(const ControllerConfig& cfg) {
    std::vector<double> w(cfg.lambda.size());
    double acc = 1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k >= 1) acc /= cfg.delta[k - 1];
        w[k] = acc;
    }
    return w;
}

std::vector<Jet> regressor(const SffModel& model, int k, std::span<const Jet> state_jets,
                           const Jet& x_kd) {
    const auto& ss = model.subsystem(k);
    const int q = state_jets.empty() ? x_kd.order() - 1 : state_jets[0].order();
    if (x_kd.order() != q + 1) throw JetError("regressor: x_kd jet must carry one extra order");
    std::vector<Jet> row;
    row.reserve(ss.theta.size());
    row.push_back(x_kd.derivative());
    JetEnv env{Jet(q), state_jets};
    for (const auto& r : ss.regressors) row.push_back(-eval_jet(r, env));
    return row;
}

ControllerOutput cascade_step(const SffModel& model, const ControllerConfig& cfg,
                              std::span<const double> state, const ThetaHat& theta_hat,
                              const Jet& x1d_jet) {
    const int n = model.order();
    if (static_cast<int>(state.size()) != n)
        throw ValidationError("cascade_step: state length must equal the model order");
    if (x1d_jet.order() < n)
        throw JetError("cascade_step: trajectory jet needs order >= model order");
    if (theta_hat.size() != static_cast<std::size_t>(n))
        throw ValidationError("cascade_step: estimate table must match the model");

    ControllerOutput out;
    out.x_d.reserve(static_cast<std::size_t>(n));
    out.e.resize(static_cast<std::size_t>(n));
    out.g.resize(static_cast<std::size_t>(n));
    out.y.resize(static_cast<std::size_t>(n));
    out.s.assign(static_cast<std::size_t>(n > 0 ? n - 1 : 0), 0.0);
    out.theta_hat_dot.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out.theta_hat_dot[static_cast<std::size_t>(k)]
            .assign(theta_hat[static_cast<std::size_t>(k)].size(), 0.0);

    // Oracle state jets; the control never consumes x_k derivatives beyond
    // order n-k, so a zero u-jet is exact here.
    const std::vector<Jet> xj =
        state_jets(model, state, Jet(n >= 2 ? n - 2 : 0), n - 1);

    std::vector<Jet> xq(static_cast<std::size_t>(n));
    std::vector<Jet> row, th_jets;
    Jet xkd = x1d_jet.truncated(n);
    Jet prev_g, prev_e;

    for (int k = 1; k <= n; ++k) {
        const int q = n - k;
        const auto& ss = model.subsystem(k);
        const std::size_t ki = static_cast<std::size_t>(k - 1);

        for (int j = 0; j < n; ++j)
            xq[static_cast<std::size_t>(j)] = xj[static_cast<std::size_t>(j)].truncated(q);
        JetEnv env{Jet(q), xq};

        row.clear();
        row.push_back(xkd.derivative());
        for (const auto& r : ss.regressors) row.push_back(-eval_jet(r, env));

        const Jet e_jet = xkd.truncated(q) - xq[ki];
        out.e[ki] = e_jet[0];

        th_jets.clear();
        for (std::size_t z = 0; z < ss.theta.size(); ++z) {
            const ParameterLaw& law = cfg.theta[ki][z];
            const double val = theta_hat[ki][z];
            if (cfg.mode == ControlMode::Adaptive && law.adapt) {
                const ProjectionConfig& pc = *law.projection;
                const double p0 = e_jet[0] * row[z][0];
                out.theta_hat_dot[ki][z] = p_dot(pc, p0, val);
                if (q == 0) {
                    th_jets.push_back(Jet::constant(val, 0));
                } else {
                    const Jet p_jet = mul(e_jet, row[z]).truncated(q - 1);
                    for (int i = 0; i <= p_jet.order(); ++i)
                        out.p_jet_peak = std::max(out.p_jet_peak, std::fabs(p_jet[i]));
                    th_jets.push_back(state_jet(pc, p_jet, val));
                }
            } else {
                th_jets.push_back(Jet::constant(val, q));
            }
        }

        Jet acc(q);
        for (std::size_t z = 0; z < row.size(); ++z) acc += mul(row[z], th_jets[z]);
        if (k >= 2)
            acc += mul(prev_g.truncated(q), prev_e.truncated(q)) * cfg.delta[static_cast<std::size_t>(k - 2)];
        acc += e_jet * cfg.lambda[ki];

        const Jet g_jet = eval_jet(ss.gain, env);
        if (!(std::fabs(g_jet.value()) > 1e-9))
            throw NumericError("input gain |g_" + std::to_string(k) + "| <= 1e-9", 0.0, k);
        out.g[ki] = g_jet.value();
        out.y[ki].clear();
        for (const Jet& yj : row) out.y[ki].push_back(yj[0]);

        out.x_d.push_back(xkd);
        prev_g = g_jet;
        prev_e = e_jet;
        xkd = div(acc, g_jet);
    }

    out.u = xkd.value();

    double weight = 1.0;
    for (int k = 1; k < n; ++k) {
        if (k >= 2) weight /= cfg.delta[static_cast<std::size_t>(k - 2)];
        out.s[static_cast<std::size_t>(k - 1)] =
            weight * out.g[static_cast<std::size_t>(k - 1)] * out.e[static_cast<std::size_t>(k - 1)] *
            out.e[static_cast<std::size_t>(k)];
    }

    if (!std::isfinite(out.u)) throw NumericError("nonfinite control output", 0.0, n);
    for (int k = 0; k < n; ++k)
        if (!std::isfinite(out.e[static_cast<std::size_t>(k)]))
            throw NumericError("nonfinite tracking error", 0.0, k + 1);
    return out;
}

std::vector<StabilityResidual> virtual_stability_check(const SffModel& model,
                                                       const ControllerConfig& cfg,
                                                       const ControllerOutput& prev,
                                                       const ThetaHat& theta_prev,
                                                       const ControllerOutput& next,
                                                       const ThetaHat& theta_next, double dt) {
    const int n = model.order();
    const LyapunovSnapshot la = lyapunov(model, cfg, prev.e, theta_prev);
    const LyapunovSnapshot lb = lyapunov(model, cfg, next.e, theta_next);
    const std::vector<double> w = stability_weights(cfg);

    auto bound_at = [&](const ControllerOutput& o, int k) {
        const std::size_t ki = static_cast<std::size_t>(k - 1);
        double b = -cfg.lambda[ki] * w[ki] * o.e[ki] * o.e[ki];
        if (k >= 2) b -= o.s[static_cast<std::size_t>(k - 2)];
        if (k < n) b += o.s[ki];
        return b;
    };

    std::vector<StabilityResidual> res(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        StabilityResidual& r = res[static_cast<std::size_t>(k - 1)];
        r.nu_dot = (lb.nu[static_cast<std::size_t>(k - 1)] - la.nu[static_cast<std::size_t>(k - 1)]) / dt;
        r.bound = 0.5 * (bound_at(prev, k) + bound_at(next, k));
        r.residual = r.nu_dot - r.bound;
    }
    return res;
}

}  // namespace sbc
