#include "sbc/plant.hpp"

#include <cmath>
#include <string>

namespace sbc {

SffModel::SffModel(std::vector<SubsystemSpec> subsystems) : subsystems_(std::move(subsystems)) {
    if (subsystems_.empty()) throw ValidationError("model needs at least one subsystem");
    for (std::size_t i = 0; i < subsystems_.size(); ++i) {
        const auto& ss = subsystems_[i];
        const std::string where = "subsystem " + std::to_string(i + 1);
        if (ss.theta.empty()) throw ValidationError(where + ": theta must contain theta_k1");
        for (double th : ss.theta)
            if (!(th > 0.0)) throw ValidationError(where + ": every theta_kz must be > 0");
        if (ss.regressors.size() + 1 != ss.theta.size())
            throw ValidationError(where + ": regressor count must be theta count - 1");
        if (!ss.gain.valid()) throw ValidationError(where + ": missing input gain expression");
        const int k = static_cast<int>(i + 1);
        for (const auto& r : ss.regressors) {
            if (!r.valid()) throw ValidationError(where + ": empty regressor expression");
            if (r.max_state_index() > k)
                throw ValidationError(where + ": regressor references a state beyond x" +
                                      std::to_string(k));
            if (r.references_time())
                throw ValidationError(where + ": plant expressions must not reference t");
        }
        if (ss.gain.max_state_index() > k)
            throw ValidationError(where + ": gain references a state beyond x" + std::to_string(k));
        if (ss.gain.references_time())
            throw ValidationError(where + ": plant expressions must not reference t");
    }
}

double f_k(const SffModel& model, int k, std::span<const double> x_prefix) {
    const auto& ss = model.subsystem(k);
    EvalEnv env{0.0, x_prefix};
    double f = 0.0;
    for (std::size_t z = 0; z < ss.regressors.size(); ++z)
        f += ss.theta[z + 1] * eval(ss.regressors[z], env);
    return f;
}

void rhs(const SffModel& model, std::span<const double> state, double u, std::span<double> out) {
    const int n = model.order();
    EvalEnv env{0.0, state};
    for (int k = 1; k <= n; ++k) {
        const auto& ss = model.subsystem(k);
        double f = 0.0;
        for (std::size_t z = 0; z < ss.regressors.size(); ++z)
            f += ss.theta[z + 1] * eval(ss.regressors[z], env);
        const double g = eval(ss.gain, env);
        const double xnext = (k < n) ? state[static_cast<std::size_t>(k)] : u;
        const double d = (f + g * xnext) / ss.theta[0];
        if (!std::isfinite(d))
            throw NumericError("nonfinite plant derivative in subsystem " + std::to_string(k), 0.0,
                               k);
        out[static_cast<std::size_t>(k - 1)] = d;
    }
}

std::vector<double> rhs(const SffModel& model, std::span<const double> state, double u) {
    std::vector<double> out(static_cast<std::size_t>(model.order()));
    rhs(model, state, u, out);
    return out;
}

std::vector<Jet> state_jets(const SffModel& model, std::span<const double> state, const Jet& u_jet,
                            int order) {
    const int n = model.order();
    if (order < 0 || order > Jet::kMaxOrder) throw JetError("state jet order out of range");
    if (order > 0 && u_jet.order() < order - 1)
        throw JetError("u jet order too low for requested state jet order");

    std::vector<Jet> jets;
    jets.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) jets.emplace_back(order, state[static_cast<std::size_t>(k)]);

    // Order-by-order substitution: after pass o, coefficients 0..o+1 are
    // exact. Coefficient o of rhs_k only reads coefficients <= o, so each
    // pass evaluates rhs at exactly order o.
    std::vector<Jet> xo(static_cast<std::size_t>(n));
    for (int o = 0; o < order; ++o) {
        for (int k = 0; k < n; ++k) xo[static_cast<std::size_t>(k)] = jets[static_cast<std::size_t>(k)].truncated(o);
        JetEnv env{Jet(o), xo};
        for (int k = 1; k <= n; ++k) {
            const auto& ss = model.subsystem(k);
            Jet f(o);
            for (std::size_t z = 0; z < ss.regressors.size(); ++z)
                f += eval_jet(ss.regressors[z], env) * ss.theta[z + 1];
            const Jet g = eval_jet(ss.gain, env);
            const Jet xnext =
                (k < n) ? xo[static_cast<std::size_t>(k)] : u_jet.truncated(o);
            const Jet d = (f + mul(g, xnext)) / ss.theta[0];
            jets[static_cast<std::size_t>(k - 1)][o + 1] = d[o];
        }
    }
    return jets;
}

}  // namespace sbc
