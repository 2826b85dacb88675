#pragma once

// Shared test utilities: a random expression generator that stays inside
// safe numeric ranges (denominators bounded away from zero, sqrt arguments
// positive, mild exponents) plus polynomial sample paths for finite
// differencing along t.

#include <random>
#include <string>
#include <vector>

#include "sbc/jet.hpp"

namespace sbc_test {

inline std::string fmt_const(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

inline std::string random_expr_text(std::mt19937& rng, int depth, int nvars,
                                    bool allow_abs = false) {
    std::uniform_real_distribution<double> cdist(0.3, 2.2);
    auto leaf = [&]() -> std::string {
        switch (rng() % 3) {
            case 0: return fmt_const(cdist(rng));
            case 1: return "t";
            default: return "x" + std::to_string(1 + rng() % static_cast<unsigned>(nvars));
        }
    };
    if (depth <= 0) return leaf();
    auto sub = [&]() { return random_expr_text(rng, depth - 1, nvars, allow_abs); };
    switch (rng() % (allow_abs ? 10 : 9)) {
        case 0: return "(" + sub() + " + " + sub() + ")";
        case 1: return "(" + sub() + " - " + sub() + ")";
        case 2: return "(" + sub() + ")*(" + fmt_const(cdist(rng)) + ")";
        case 3: return "sin(" + sub() + ")";
        case 4: return "cos(" + sub() + ")";
        case 5: return "tanh(" + sub() + ")";
        case 6: return "exp(0.4*sin(" + sub() + "))";
        case 7: return "(" + sub() + ")/(2.5 + (" + sub() + ")^2)";
        case 8: return "sqrt(1.5 + (" + sub() + ")^2)";
        default: return "abs(" + sub() + ") + 0.5";
    }
}

/// Value of the polynomial whose derivatives at t0 are the jet coefficients.
inline double jet_path(const sbc::Jet& j, double dt) {
    double acc = 0.0;
    double fact = 1.0;
    double p = 1.0;
    for (int i = 0; i <= j.order(); ++i) {
        if (i > 0) {
            fact *= i;
            p *= dt;
        }
        acc += j[i] * p / fact;
    }
    return acc;
}

}  // namespace sbc_test
