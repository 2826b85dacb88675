#include "sbc/jet.hpp"

#include <algorithm>
#include <vector>

namespace sbc {

namespace {

// Pascal's triangle up to kMaxOrder; all entries exact in double.
struct BinomialTable {
    double c[Jet::kMaxOrder + 1][Jet::kMaxOrder + 1]{};
    BinomialTable() {
        for (int n = 0; n <= Jet::kMaxOrder; ++n) {
            c[n][0] = c[n][n] = 1.0;
            for (int k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
        }
    }
};
const BinomialTable kBinom;

inline double binom(int n, int k) { return kBinom.c[n][k]; }

struct FactorialTable {
    double f[Jet::kMaxOrder + 1]{};
    double inv[Jet::kMaxOrder + 1]{};
    FactorialTable() {
        f[0] = 1.0;
        for (int i = 1; i <= Jet::kMaxOrder; ++i) f[i] = f[i - 1] * i;
        for (int i = 0; i <= Jet::kMaxOrder; ++i) inv[i] = 1.0 / f[i];
    }
};
const FactorialTable kFact;

// Normalized (Taylor) coefficient views used by the series recurrences.
// Raw coefficient i is derivative d^i/dt^i; normalized is raw / i!.
using Coeffs = std::array<double, Jet::kMaxOrder + 1>;

Coeffs normalized(const Jet& u) {
    Coeffs a{};
    for (int i = 0; i <= u.order(); ++i) a[i] = u[i] * kFact.inv[i];
    return a;
}

Jet from_normalized(const Coeffs& a, int order) {
    Jet r(order);
    for (int i = 0; i <= order; ++i) r[i] = a[i] * kFact.f[i];
    return r;
}

}  // namespace

Jet mul(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw JetError("jet order mismatch in mul");
    const int m = a.order();
    Jet r(m);
    for (int i = 0; i <= m; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) acc += binom(i, j) * a[j] * b[i - j];
        r[i] = acc;
    }
    return r;
}

Jet div(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw JetError("jet order mismatch in div");
    if (b.value() == 0.0) throw JetError("jet division by zero value");
    const int m = a.order();
    Jet q(m);
    for (int i = 0; i <= m; ++i) {
        double acc = a[i];
        for (int j = 0; j < i; ++j) acc -= binom(i, j) * q[j] * b[i - j];
        q[i] = acc / b[0];
    }
    return q;
}

Jet compose(std::span<const double> f_derivs, const Jet& u) {
    const int m = u.order();
    if (static_cast<int>(f_derivs.size()) < m + 1)
        throw JetError("compose: derivative table shorter than jet order");

    // Horner evaluation of the series sum_k f~_k w^k with w = (u - u0)
    // normalized, truncated at order m. w has zero constant term, so the
    // coefficient i of the result only sees f~_0..f~_i.
    Coeffs w = normalized(u);
    w[0] = 0.0;

    Coeffs v{};
    v[0] = f_derivs[m] * kFact.inv[m];
    for (int k = m - 1; k >= 0; --k) {
        // v <- v * w (truncated convolution; w[0] = 0), then add f~_k.
        for (int i = m; i >= 1; --i) {
            double acc = 0.0;
            for (int j = 0; j < i; ++j) acc += v[j] * w[i - j];
            v[i] = acc;
        }
        v[0] = f_derivs[k] * kFact.inv[k];
    }
    return from_normalized(v, m);
}

Jet sin(const Jet& u) {
    const int m = u.order();
    Coeffs a = normalized(u);
    Coeffs s{}, c{};
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int i = 1; i <= m; ++i) {
        double as = 0.0, ac = 0.0;
        for (int j = 1; j <= i; ++j) {
            as += j * a[j] * c[i - j];
            ac += j * a[j] * s[i - j];
        }
        s[i] = as / i;
        c[i] = -ac / i;
    }
    return from_normalized(s, m);
}

Jet cos(const Jet& u) {
    const int m = u.order();
    Coeffs a = normalized(u);
    Coeffs s{}, c{};
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int i = 1; i <= m; ++i) {
        double as = 0.0, ac = 0.0;
        for (int j = 1; j <= i; ++j) {
            as += j * a[j] * c[i - j];
            ac += j * a[j] * s[i - j];
        }
        s[i] = as / i;
        c[i] = -ac / i;
    }
    return from_normalized(c, m);
}

Jet tanh(const Jet& u) {
    // h' = u' (1 - h^2); q tracks 1 - h^2 alongside h.
    const int m = u.order();
    Coeffs a = normalized(u);
    Coeffs h{}, q{};
    h[0] = std::tanh(a[0]);
    q[0] = 1.0 - h[0] * h[0];
    for (int i = 1; i <= m; ++i) {
        double acc = 0.0;
        for (int j = 1; j <= i; ++j) acc += j * a[j] * q[i - j];
        h[i] = acc / i;
        double qa = 0.0;
        for (int j = 0; j <= i; ++j) qa += h[j] * h[i - j];
        q[i] = -qa;
    }
    return from_normalized(h, m);
}

Jet exp(const Jet& u) {
    const int m = u.order();
    Coeffs a = normalized(u);
    Coeffs e{};
    e[0] = std::exp(a[0]);
    for (int i = 1; i <= m; ++i) {
        double acc = 0.0;
        for (int j = 1; j <= i; ++j) acc += j * a[j] * e[i - j];
        e[i] = acc / i;
    }
    return from_normalized(e, m);
}

Jet log(const Jet& u) {
    if (!(u.value() > 0.0)) throw JetError("jet log of non-positive value");
    const int m = u.order();
    Coeffs a = normalized(u);
    Coeffs l{};
    l[0] = std::log(a[0]);
    for (int i = 1; i <= m; ++i) {
        double acc = i * a[i];
        for (int j = 1; j < i; ++j) acc -= j * l[j] * a[i - j];
        l[i] = acc / (i * a[0]);
    }
    return from_normalized(l, m);
}

Jet sqrt(const Jet& u) {
    if (!(u.value() > 0.0)) throw JetError("jet sqrt of non-positive value");
    const int m = u.order();
    Coeffs a = normalized(u);
    Coeffs s{};
    s[0] = std::sqrt(a[0]);
    for (int i = 1; i <= m; ++i) {
        double acc = a[i];
        for (int j = 1; j < i; ++j) acc -= s[j] * s[i - j];
        s[i] = acc / (2.0 * s[0]);
    }
    return from_normalized(s, m);
}

Jet abs(const Jet& u) {
    // Away from u = 0, |u| = sign(u0) * u; the sign convention at exactly 0
    // is +1 (measure-zero event for the smooth signals jets carry).
    const double sign = u.value() < 0.0 ? -1.0 : 1.0;
    Jet r = u;
    r *= sign;
    return r;
}

Jet pow(const Jet& u, long long k) {
    const int m = u.order();
    if (k == 0) return Jet::constant(1.0, m);
    const bool negative = k < 0;
    const unsigned long long e = negative ? static_cast<unsigned long long>(-k)
                                          : static_cast<unsigned long long>(k);
    // Left-fold products so that the order-0 coefficient follows the exact
    // multiplication sequence the scalar evaluator uses.
    Jet r = u;
    for (unsigned long long i = 1; i < e; ++i) r = mul(r, u);
    if (negative) return div(Jet::constant(1.0, m), r);
    return r;
}

Jet pow(const Jet& u, double r) {
    if (!(u.value() > 0.0)) throw JetError("jet pow with non-integer exponent needs positive base");
    Jet l = log(u);
    l *= r;
    return exp(l);
}

void sin_derivatives(double u, std::span<double> out) {
    const double s = std::sin(u), c = std::cos(u);
    const double cycle[4] = {s, c, -s, -c};
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = cycle[j % 4];
}

void cos_derivatives(double u, std::span<double> out) {
    const double s = std::sin(u), c = std::cos(u);
    const double cycle[4] = {c, -s, -c, s};
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = cycle[j % 4];
}

void tanh_derivatives(double u, std::span<double> out) {
    // Represent d^j/du^j tanh(u) as a polynomial p_j(y) in y = tanh(u):
    // p_0 = y, p_{j+1} = p_j'(y) (1 - y^2).
    const double y = std::tanh(u);
    std::vector<double> p = {0.0, 1.0};  // p_0
    for (std::size_t j = 0; j < out.size(); ++j) {
        double val = 0.0;
        for (std::size_t i = p.size(); i-- > 0;) val = val * y + p[i];
        out[j] = val;
        // p <- p' (1 - y^2)
        std::vector<double> d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
        for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
        std::vector<double> next(d.size() + 2, 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            next[i] += d[i];
            next[i + 2] -= d[i];
        }
        p = std::move(next);
    }
}

void exp_derivatives(double u, std::span<double> out) {
    const double e = std::exp(u);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = e;
}

void log_derivatives(double u, std::span<double> out) {
    if (!(u > 0.0)) throw JetError("log derivative table needs positive argument");
    if (out.empty()) return;
    out[0] = std::log(u);
    // f^(j) = (-1)^(j-1) (j-1)! / u^j
    double term = 1.0 / u;
    for (std::size_t j = 1; j < out.size(); ++j) {
        out[j] = term;
        term *= -static_cast<double>(j) / u;
    }
}

void sqrt_derivatives(double u, std::span<double> out) {
    if (!(u > 0.0)) throw JetError("sqrt derivative table needs positive argument");
    if (out.empty()) return;
    // f^(j) = (1/2)(1/2 - 1)...(1/2 - j + 1) u^(1/2 - j)
    double coef = std::sqrt(u);
    out[0] = coef;
    for (std::size_t j = 1; j < out.size(); ++j) {
        coef *= (0.5 - static_cast<double>(j - 1)) / u;
        out[j] = coef;
    }
}

void abs_derivatives(double u, std::span<double> out) {
    if (out.empty()) return;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    out[0] = sign * u;
    if (out.size() > 1) out[1] = sign;
    for (std::size_t j = 2; j < out.size(); ++j) out[j] = 0.0;
}

}  // namespace sbc
