#pragma once

#include <utility>

#include "sbc/jet.hpp"

namespace sbc {

/// Configuration of one smooth parameter projector. The estimate integrates
///   Pdot = rho * (p(t) + sigma * kappa(P))
/// where kappa is zero on [lower, upper] and pulls the estimate back through
/// smooth switching zones of width `activation` beyond each bound.
struct ProjectionConfig {
    double rho = 1.0;    ///< update gain, > 0
    double sigma = 1.0;  ///< correction gain, > 0
    double lower = 0.0;  ///< a
    double upper = 0.0;  ///< b
    double activation = 0.0;  ///< c, switching-zone width
    int smoothness_order = Jet::kMaxOrder;  ///< differentiability target C^m

    /// Enforces c > 0, b >= a, a - c > 0, rho > 0, sigma > 0, m >= 1.
    void validate() const;
};

/// Strictly decreasing switch on (a-c, a): 1 at the left end, 0 at the right,
/// with all derivatives up to the smoothness order vanishing at both ends.
double switch_a(const ProjectionConfig& cfg, double P);

/// Strictly increasing switch on (b, b+c): 0 at the left end, 1 at the right.
double switch_b(const ProjectionConfig& cfg, double P);

/// The five-branch correction term:
///   b - P            for P >= b+c
///   (b - P) S_b(P)   for b < P < b+c
///   0                for a <= P <= b
///   (a - P) S_a(P)   for a-c < P < a
///   a - P            for P <= a-c
double kappa(const ProjectionConfig& cfg, double P);

/// Pdot = rho (p + sigma kappa(P)).
double p_dot(const ProjectionConfig& cfg, double p, double P);

// Jet counterparts. Branch selection uses the value coefficient; switching
// branches propagate derivatives by composing tanh with the reciprocal-sum
// inner function, so they agree with the scalar formulas at order 0.
Jet switch_a_jet(const ProjectionConfig& cfg, const Jet& P);
Jet switch_b_jet(const ProjectionConfig& cfg, const Jet& P);
Jet kappa_jet(const ProjectionConfig& cfg, const Jet& P);

/// Jet of Pdot from jets of p and P (orders must match, and must stay below
/// the configured smoothness order).
Jet p_dot_jet(const ProjectionConfig& cfg, const Jet& p, const Jet& P);

/// Jet of the projection state itself: coefficient 0 is `value`, coefficient
/// i+1 is coefficient i of p_dot_jet, built order by order. Result order is
/// p.order() + 1.
Jet state_jet(const ProjectionConfig& cfg, const Jet& p, double value);

/// Both sides of the projection inequality: for any constant target
/// P_c in [a, b],
///   lhs  = (P_c - P) (p - Pdot/rho)
///   bound = -sigma kappa^2
/// and lhs <= bound <= 0 holds. Returned as (lhs, bound).
std::pair<double, double> projection_gap(const ProjectionConfig& cfg, double P_c, double p, double P);

}  // namespace sbc
