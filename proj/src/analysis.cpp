#include "sbc/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace sbc {

LyapunovSnapshot lyapunov_from_error(const SffModel& model, const ControllerConfig& cfg,
                                     std::span<const double> e,
                                     const std::vector<std::vector<double>>& theta_err) {
    const int n = model.order();
    const std::vector<double> w = stability_weights(cfg);
    LyapunovSnapshot snap;
    snap.nu.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const std::size_t ki = static_cast<std::size_t>(k - 1);
        const double theta_k1 = model.subsystem(k).theta[0];
        double quad = theta_k1 * e[ki] * e[ki];
        for (std::size_t z = 0; z < theta_err[ki].size(); ++z) {
            const auto& law = cfg.theta[ki][z];
            if (!law.projection) continue;
            quad += theta_err[ki][z] * theta_err[ki][z] / law.projection->rho;
        }
        snap.nu[ki] = 0.5 * w[ki] * quad;
        snap.eAe += w[ki] * theta_k1 * e[ki] * e[ki];
        snap.eBe += w[ki] * cfg.lambda[ki] * e[ki] * e[ki];
        snap.nu_tot += snap.nu[ki];
    }
    return snap;
}

LyapunovSnapshot lyapunov(const SffModel& model, const ControllerConfig& cfg,
                          std::span<const double> e, const ThetaHat& theta_hat) {
    std::vector<std::vector<double>> err(theta_hat.size());
    for (std::size_t k = 0; k < theta_hat.size(); ++k) {
        const auto& truth = model.subsystem(static_cast<int>(k + 1)).theta;
        err[k].resize(theta_hat[k].size());
        for (std::size_t z = 0; z < theta_hat[k].size(); ++z)
            err[k][z] = truth[z] - theta_hat[k][z];
    }
    return lyapunov_from_error(model, cfg, e, err);
}

RunMetrics metrics(const Trace& trace) {
    RunMetrics m;
    m.theta_labels = trace.theta_labels;
    const std::size_t n = static_cast<std::size_t>(trace.n);
    m.max_abs_e.assign(n, 0.0);
    m.final_abs_e.assign(n, 0.0);
    if (trace.rows.empty()) return m;
    for (const TraceRow& row : trace.rows)
        for (std::size_t k = 0; k < n; ++k)
            m.max_abs_e[k] = std::max(m.max_abs_e[k], std::fabs(row.e[k]));
    const TraceRow& last = trace.rows.back();
    for (std::size_t k = 0; k < n; ++k) m.final_abs_e[k] = std::fabs(last.e[k]);
    m.theta_hat_terminal = last.theta_hat;
    return m;
}

std::vector<std::size_t> monotonicity_report(const Trace& trace, const ControllerConfig& cfg,
                                             double tol_coeff) {
    std::vector<std::size_t> violations;
    if (trace.rows.size() < 2) return violations;
    const std::vector<double> w = stability_weights(cfg);
    for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
        const TraceRow& a = trace.rows[i];
        const TraceRow& b = trace.rows[i + 1];
        const double dt = b.t - a.t;
        double eBe = 0.0;
        for (std::size_t k = 0; k < a.e.size(); ++k)
            eBe += w[k] * cfg.lambda[k] * a.e[k] * a.e[k];
        const double slope = (b.nu_tot - a.nu_tot) / dt;
        if (slope > tol_coeff * std::max(1.0, eBe)) violations.push_back(i);
    }
    return violations;
}

std::vector<double> error_dynamics_residual(const SffModel& model, const ControllerConfig& cfg,
                                            const ControllerOutput& prev, const ThetaHat& theta_prev,
                                            const ControllerOutput& next, const ThetaHat& theta_next,
                                            double dt) {
    const int n = model.order();

    auto rhs_at = [&](const ControllerOutput& o, const ThetaHat& th, int k) {
        const std::size_t ki = static_cast<std::size_t>(k - 1);
        double r = -cfg.lambda[ki] * o.e[ki];
        if (k >= 2)
            r -= cfg.delta[static_cast<std::size_t>(k - 2)] * o.g[static_cast<std::size_t>(k - 2)] *
                 o.e[static_cast<std::size_t>(k - 2)];
        if (k < n) r += o.g[ki] * o.e[static_cast<std::size_t>(k)];
        const auto& truth = model.subsystem(k).theta;
        for (std::size_t z = 0; z < truth.size(); ++z)
            r += o.y[ki][z] * (truth[z] - th[ki][z]);
        return r;
    };

    std::vector<double> res(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const std::size_t ki = static_cast<std::size_t>(k - 1);
        const double theta_k1 = model.subsystem(k).theta[0];
        const double lhs = theta_k1 * (next.e[ki] - prev.e[ki]) / dt;
        const double rhs_mid = 0.5 * (rhs_at(prev, theta_prev, k) + rhs_at(next, theta_next, k));
        res[ki] = std::fabs(lhs - rhs_mid) / std::max(1.0, std::fabs(rhs_mid));
    }
    return res;
}

}  // namespace sbc
