#pragma once

#include <span>
#include <vector>

#include "sbc/controller.hpp"
#include "sbc/trace.hpp"

namespace sbc {

/// Lyapunov bookkeeping for one instant:
///   nu_k = Delta_k/2 (theta_k1 e_k^2 + sum_z (theta_kz - that_kz)^2 / rho_kz)
/// with Delta_k = 1/(delta_1..delta_{k-1}). Parameters without a projection
/// config contribute no estimation-error term (their rho is effectively
/// infinite). eAe and eBe are the quadratic forms with
/// A = diag(Delta_k theta_k1) and B = diag(Delta_k lambda_k).
struct LyapunovSnapshot {
    std::vector<double> nu;
    double nu_tot = 0.0;
    double eAe = 0.0;
    double eBe = 0.0;
};

LyapunovSnapshot lyapunov_from_error(const SffModel& model, const ControllerConfig& cfg,
                                     std::span<const double> e,
                                     const std::vector<std::vector<double>>& theta_err);

/// Convenience overload computing theta_err = theta_true - theta_hat.
LyapunovSnapshot lyapunov(const SffModel& model, const ControllerConfig& cfg,
                          std::span<const double> e, const ThetaHat& theta_hat);

struct RunMetrics {
    std::vector<double> max_abs_e;
    std::vector<double> final_abs_e;
    std::vector<double> theta_hat_terminal;
    std::vector<std::string> theta_labels;
};

RunMetrics metrics(const Trace& trace);

/// Sample indices where the finite-difference slope of nu_tot exceeds
/// tol_coeff * max(1, e^T B e); empty on a monotone trace.
std::vector<std::size_t> monotonicity_report(const Trace& trace, const ControllerConfig& cfg,
                                             double tol_coeff = 1e-4);

/// Per-subsystem mismatch between theta_k1 * (finite-difference edot_k) and
/// the error-dynamics right side
///   -lambda_k e_k - delta_{k-1} g_{k-1} e_{k-1} + g_k e_{k+1} + Y_k (theta - that)
/// between two cascade evaluations dt apart, scaled by max(1, |right side|).
std::vector<double> error_dynamics_residual(const SffModel& model, const ControllerConfig& cfg,
                                            const ControllerOutput& prev, const ThetaHat& theta_prev,
                                            const ControllerOutput& next, const ThetaHat& theta_next,
                                            double dt);

}  // namespace sbc
