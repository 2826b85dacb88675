#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sbc/plant.hpp"
#include "sbc/projection.hpp"

namespace sbc {

enum class ControlMode { Fixed, Adaptive };

/// Per-parameter estimate policy. In fixed mode `value` is the constant
/// estimate used by the feedforward term. In adaptive mode it is the initial
/// estimate; parameters with `adapt` set integrate through their projector.
/// A projection config on a non-adapted parameter is allowed so diagnostics
/// can weight its estimation error.
struct ParameterLaw {
    double value = 0.0;
    bool adapt = false;
    std::optional<ProjectionConfig> projection;
};

struct ControllerConfig {
    ControlMode mode = ControlMode::Fixed;
    std::vector<double> lambda;  ///< local feedback gains, one per subsystem, > 0
    std::vector<double> delta;   ///< stabilizing feedback gains, n-1 of them, > 0
    std::vector<std::vector<ParameterLaw>> theta;  ///< shape matches the model's theta table

    void validate(const SffModel& model) const;
};

/// Live estimate values, shaped like the model's theta table.
using ThetaHat = std::vector<std::vector<double>>;

ThetaHat initial_estimates(const ControllerConfig& cfg);

/// Subsystem weights Delta_1 = 1, Delta_k = 1/(delta_1 ... delta_{k-1}).
std::vector<double> stability_weights(const ControllerConfig& cfg);

struct ControllerOutput {
    double u = 0.0;
    std::vector<Jet> x_d;  ///< desired jets x_1d..x_nd; x_kd carries order n-k+1
    std::vector<double> e;  ///< e_k = x_kd - x_k
    std::vector<double> s;  ///< stability connectors s_k = Delta_k g_k e_k e_{k+1}
    std::vector<double> g;  ///< input-gain values along the cascade
    std::vector<std::vector<double>> y;  ///< regressor row values
    ThetaHat theta_hat_dot;              ///< estimate update rates (zero when not adapted)
    double p_jet_peak = 0.0;  ///< largest |p-jet coefficient| seen this step (diagnostic)
};

/// Regressor row Y_k = [xdot_kd, -gamma_k2, ..., -gamma_kj] as jets of the
/// state jets' order; x_kd must carry one extra order for the shift.
std::vector<Jet> regressor(const SffModel& model, int k, std::span<const Jet> state_jets,
                           const Jet& x_kd);

/// One evaluation of the control cascade at the current state. Each stage k
/// solves the generic law
///   g_k x_{(k+1)d} = Y_k theta_hat_k + delta_{k-1} g_{k-1} e_{k-1} + lambda_k e_k
/// for x_{(k+1)d} as a jet of order n-k (delta_0 g_0 e_0 = 0), so desired-
/// signal derivatives stay exact through the cascade; the final stage yields
/// u. State jets come from the plant oracle. Throws NumericError when some
/// |g_k| <= 1e-9 or a signal turns nonfinite.
ControllerOutput cascade_step(const SffModel& model, const ControllerConfig& cfg,
                              std::span<const double> state, const ThetaHat& theta_hat,
                              const Jet& x1d_jet);

struct StabilityResidual {
    double nu_dot = 0.0;    ///< finite-difference estimate of nu_k's derivative
    double bound = 0.0;     ///< -beta_k e_k^2 - s_{k-1} + s_k, endpoint average
    double residual = 0.0;  ///< nu_dot - bound; <= 0 up to discretization error
};

/// Numerical check of per-subsystem virtual stability between two consecutive
/// cascade evaluations dt apart.
std::vector<StabilityResidual> virtual_stability_check(const SffModel& model,
                                                       const ControllerConfig& cfg,
                                                       const ControllerOutput& prev,
                                                       const ThetaHat& theta_prev,
                                                       const ControllerOutput& next,
                                                       const ThetaHat& theta_next, double dt);

}  // namespace sbc
