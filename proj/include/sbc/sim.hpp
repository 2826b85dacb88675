#pragma once

#include <functional>
#include <span>

#include "sbc/analysis.hpp"
#include "sbc/controller.hpp"
#include "sbc/trace.hpp"

namespace sbc {

enum class IntegratorKind { Euler, Rk4 };

struct SimConfig {
    double dt = 1e-5;
    double duration = 10.0;
    IntegratorKind integrator = IntegratorKind::Rk4;
    std::vector<double> x0;  ///< initial state; empty means the origin
    int record_stride = 100;

    void validate(int n) const;
};

/// Snapshot handed to the step observer at every accepted grid point, with
/// the cascade evaluated at that point.
struct SimStep {
    double t = 0.0;
    std::span<const double> x;
    const ThetaHat& theta_hat;
    const ControllerOutput& out;
};

using StepObserver = std::function<void(const SimStep&)>;

/// Jet of the reference trajectory at time t (the t-jet is (t, 1, 0, ...)).
Jet reference_jet(const Expr& trajectory, double t, int order);

/// Fixed-step integration of the plant with adapted estimates appended as
/// extra ODE states. The cascade is re-evaluated at every derivative
/// evaluation (continuous-feedback semantics). Identical configs produce
/// bit-identical traces. Throws NumericError with the abort time on
/// nonfinite states or a vanishing input gain.
Trace simulate(const SffModel& model, const ControllerConfig& cfg, const Expr& trajectory,
               const SimConfig& sim, const StepObserver& observer = {});

}  // namespace sbc
