#include "sbc/projection.hpp"

#include <array>
#include <cmath>

namespace sbc {

namespace {

// Beyond this inner-function magnitude tanh is exactly +-1 in double and
// sech^2 underflows, so the switch is constant to machine precision. Short-
// circuiting there keeps huge reciprocal jet coefficients from meeting the
// underflowed derivative (0 * inf).
constexpr double kSwitchSaturation = 350.0;

double switch_inner_a(const ProjectionConfig& cfg, double P) {
    return 1.0 / (cfg.lower - cfg.activation - P) + 1.0 / (cfg.lower - P);
}

double switch_inner_b(const ProjectionConfig& cfg, double P) {
    return 1.0 / (cfg.upper - P) + 1.0 / (cfg.upper + cfg.activation - P);
}

enum class Edge { A, B };

Jet switch_jet(const ProjectionConfig& cfg, const Jet& P, Edge edge) {
    const int m = P.order();
    const double w0 =
        edge == Edge::A ? switch_inner_a(cfg, P.value()) : switch_inner_b(cfg, P.value());
    if (std::fabs(w0) > kSwitchSaturation) {
        const double sat = edge == Edge::A ? (w0 < 0.0 ? 1.0 : 0.0) : (w0 < 0.0 ? 0.0 : 1.0);
        return Jet::constant(sat, m);
    }
    const Jet one = Jet::constant(1.0, m);
    Jet w(m);
    if (edge == Edge::A) {
        w = div(one, Jet::constant(cfg.lower - cfg.activation, m) - P) +
            div(one, Jet::constant(cfg.lower, m) - P);
    } else {
        w = div(one, Jet::constant(cfg.upper, m) - P) +
            div(one, Jet::constant(cfg.upper + cfg.activation, m) - P);
    }
    std::array<double, Jet::kMaxOrder + 1> table;
    tanh_derivatives(w.value(), std::span<double>(table.data(), static_cast<std::size_t>(m + 1)));
    const Jet th = compose(std::span<const double>(table.data(), static_cast<std::size_t>(m + 1)), w);
    if (edge == Edge::A) return (one - th) * 0.5;
    return (one + th) * 0.5;
}

}  // namespace

void ProjectionConfig::validate() const {
    if (!(rho > 0.0)) throw ValidationError("projection: rho must be > 0");
    if (!(sigma > 0.0)) throw ValidationError("projection: sigma must be > 0");
    if (!(activation > 0.0)) throw ValidationError("projection: activation width c must be > 0");
    if (!(upper >= lower)) throw ValidationError("projection: upper bound below lower bound");
    if (!(lower - activation > 0.0))
        throw ValidationError("projection: lower - activation must stay positive");
    if (smoothness_order < 1 || smoothness_order > Jet::kMaxOrder)
        throw ValidationError("projection: smoothness order out of range");
}

double switch_a(const ProjectionConfig& cfg, double P) {
    if (!(cfg.lower - cfg.activation < P && P < cfg.lower))
        throw ValidationError("switch_a: P outside (a-c, a)");
    const double w = switch_inner_a(cfg, P);
    return 0.5 * (1.0 - std::tanh(w));
}

double switch_b(const ProjectionConfig& cfg, double P) {
    if (!(cfg.upper < P && P < cfg.upper + cfg.activation))
        throw ValidationError("switch_b: P outside (b, b+c)");
    const double w = switch_inner_b(cfg, P);
    return 0.5 * (1.0 + std::tanh(w));
}

double kappa(const ProjectionConfig& cfg, double P) {
    const double a = cfg.lower, b = cfg.upper, c = cfg.activation;
    if (P >= b + c) return b - P;
    if (P > b) return (b - P) * (0.5 * (1.0 + std::tanh(switch_inner_b(cfg, P))));
    if (P >= a) return 0.0;
    if (P > a - c) return (a - P) * (0.5 * (1.0 - std::tanh(switch_inner_a(cfg, P))));
    return a - P;
}

double p_dot(const ProjectionConfig& cfg, double p, double P) {
    return cfg.rho * (p + cfg.sigma * kappa(cfg, P));
}

Jet switch_a_jet(const ProjectionConfig& cfg, const Jet& P) {
    return switch_jet(cfg, P, Edge::A);
}

Jet switch_b_jet(const ProjectionConfig& cfg, const Jet& P) {
    return switch_jet(cfg, P, Edge::B);
}

Jet kappa_jet(const ProjectionConfig& cfg, const Jet& P) {
    const double a = cfg.lower, b = cfg.upper, c = cfg.activation;
    const int m = P.order();
    const double v = P.value();
    if (v >= b + c) return Jet::constant(b, m) - P;
    if (v > b) return mul(Jet::constant(b, m) - P, switch_jet(cfg, P, Edge::B));
    if (v >= a) return Jet(m);
    if (v > a - c) return mul(Jet::constant(a, m) - P, switch_jet(cfg, P, Edge::A));
    return Jet::constant(a, m) - P;
}

Jet p_dot_jet(const ProjectionConfig& cfg, const Jet& p, const Jet& P) {
    if (p.order() != P.order()) throw JetError("p_dot_jet: jet order mismatch");
    if (p.order() > cfg.smoothness_order - 1)
        throw JetError("p_dot_jet: jet order exceeds the projector's smoothness");
    return (p + kappa_jet(cfg, P) * cfg.sigma) * cfg.rho;
}

Jet state_jet(const ProjectionConfig& cfg, const Jet& p, double value) {
    const int m = p.order() + 1;
    if (m > Jet::kMaxOrder) throw JetError("state_jet: order overflow");
    Jet P(m, value);
    for (int i = 0; i < m; ++i) {
        const Jet pd = p_dot_jet(cfg, p.truncated(i), P.truncated(i));
        P[i + 1] = pd[i];
    }
    return P;
}

std::pair<double, double> projection_gap(const ProjectionConfig& cfg, double P_c, double p, double P) {
    if (!(cfg.lower <= P_c && P_c <= cfg.upper))
        throw ValidationError("projection_gap: P_c must lie within [a, b]");
    const double k = kappa(cfg, P);
    const double lhs = (P_c - P) * (p - p_dot(cfg, p, P) / cfg.rho);
    const double bound = -cfg.sigma * k * k;
    return {lhs, bound};
}

}  // namespace sbc
