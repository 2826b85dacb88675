#pragma once

#include <span>
#include <vector>

#include "sbc/expr.hpp"
#include "sbc/jet.hpp"

namespace sbc {

/// One strict-feedback subsystem  theta_k1 * xdot_k = f_k(x_1..x_k) + g_k(x_1..x_k) * x_{k+1},
/// with the linear parameterization f_k = sum_{z>=2} theta_kz * gamma_kz.
struct SubsystemSpec {
    std::vector<double> theta;     ///< theta_k1..theta_kj; theta_k1 multiplies xdot_k
    std::vector<Expr> regressors;  ///< gamma_k2..gamma_kj (size = theta.size() - 1)
    Expr gain;                     ///< g_k
};

/// An nth-order strict-feedback model. Immutable after construction;
/// evaluation is reentrant. x_{n+1} is the input u.
class SffModel {
public:
    /// Validates: n >= 1, every theta_kz > 0, regressor count matches theta,
    /// expressions reference only x_1..x_k and never t.
    explicit SffModel(std::vector<SubsystemSpec> subsystems);

    int order() const { return static_cast<int>(subsystems_.size()); }

    /// 1-based access.
    const SubsystemSpec& subsystem(int k) const {
        return subsystems_[static_cast<std::size_t>(k - 1)];
    }

    const std::vector<SubsystemSpec>& subsystems() const { return subsystems_; }

private:
    std::vector<SubsystemSpec> subsystems_;
};

/// f_k = sum_z theta_kz * gamma_kz(x_1..x_k) for z = 2..j (0 when j = 1).
double f_k(const SffModel& model, int k, std::span<const double> x_prefix);

/// Plant derivatives: xdot_k = (f_k + g_k * x_{k+1}) / theta_k1, x_{n+1} = u.
/// Throws NumericError naming the subsystem on a nonfinite result.
void rhs(const SffModel& model, std::span<const double> state, double u, std::span<double> out);
std::vector<double> rhs(const SffModel& model, std::span<const double> state, double u);

/// State jets to the requested order, seeded with the measured state:
/// coefficient i+1 of x_k is coefficient i of rhs_k evaluated on the jets.
/// This is the oracle differentiation backend for the controller cascade;
/// it uses the model's true parameters. u_jet needs order >= order-1 and
/// only influences coefficients of order >= 1 of x_n.
std::vector<Jet> state_jets(const SffModel& model, std::span<const double> state,
                            const Jet& u_jet, int order);

}  // namespace sbc
