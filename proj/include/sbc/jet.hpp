#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>

#include "sbc/errors.hpp"

namespace sbc {

/// Truncated Taylor jet: the value of a scalar signal s(t) together with its
/// time derivatives up to a fixed order m.
///
/// Coefficient i stores the raw derivative d^i s / dt^i (not the normalized
/// Taylor coefficient), so logged jets read directly in physical units.
/// Binomial weights are applied inside mul/div/compose.
///
/// All operations compute coefficient i from input coefficients 0..i with an
/// arithmetic sequence that does not depend on the operands' order. Two
/// evaluations at different truncation orders therefore agree bit-for-bit on
/// their common coefficients, which downstream code relies on.
class Jet {
public:
    static constexpr int kMaxOrder = 16;

    /// Zero jet of order 0.
    Jet() : size_(1) { c_[0] = 0.0; }

    /// Jet of the given order with all coefficients zero.
    explicit Jet(int order) : Jet(order, 0.0) {}

    Jet(int order, double value) : size_(check_order(order) + 1) {
        c_.fill(0.0);
        c_[0] = value;
    }

    /// Construct from an explicit coefficient list (c0, c1, ..., cm).
    Jet(std::initializer_list<double> coeffs) {
        if (coeffs.size() == 0 || coeffs.size() > kMaxOrder + 1)
            throw JetError("jet coefficient list must have 1..17 entries");
        size_ = static_cast<int>(coeffs.size());
        c_.fill(0.0);
        int i = 0;
        for (double v : coeffs) c_[i++] = v;
    }

    /// Constant signal: (v, 0, ..., 0).
    static Jet constant(double value, int order) { return Jet(order, value); }

    /// The time variable itself: (t, 1, 0, ..., 0).
    static Jet time(double t, int order) {
        Jet j(order, t);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return size_ - 1; }

    /// i-th time derivative (i = 0 is the value).
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

    double value() const { return c_[0]; }

    std::span<const double> coeffs() const { return {c_.data(), static_cast<std::size_t>(size_)}; }

    bool operator==(const Jet& o) const {
        if (size_ != o.size_) return false;
        for (int i = 0; i < size_; ++i)
            if (c_[i] != o.c_[i]) return false;
        return true;
    }

    /// Copy truncated (or zero-extended) to the given order.
    Jet truncated(int order) const {
        Jet r(order);
        const int n = std::min(size_, r.size_);
        for (int i = 0; i < n; ++i) r.c_[i] = c_[i];
        return r;
    }

    /// d/dt shift: (c1, c2, ..., cm), one order lower.
    Jet derivative() const {
        if (size_ < 2) throw JetError("derivative of an order-0 jet");
        Jet r(size_ - 2);
        for (int i = 1; i < size_; ++i) r.c_[i - 1] = c_[i];
        return r;
    }

    Jet& operator+=(const Jet& o) {
        require_same_order(o);
        for (int i = 0; i < size_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        require_same_order(o);
        for (int i = 0; i < size_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator*=(double k) {
        for (int i = 0; i < size_; ++i) c_[i] *= k;
        return *this;
    }
    Jet& operator/=(double k) {
        for (int i = 0; i < size_; ++i) c_[i] /= k;
        return *this;
    }
    Jet& operator+=(double k) {
        c_[0] += k;
        return *this;
    }
    Jet& operator-=(double k) {
        c_[0] -= k;
        return *this;
    }

    Jet operator-() const {
        Jet r = *this;
        for (int i = 0; i < size_; ++i) r.c_[i] = -r.c_[i];
        return r;
    }

private:
    static int check_order(int order) {
        if (order < 0 || order > kMaxOrder) throw JetError("jet order out of range [0, 16]");
        return order;
    }
    void require_same_order(const Jet& o) const {
        if (size_ != o.size_) throw JetError("jet order mismatch");
    }

    std::array<double, kMaxOrder + 1> c_;
    int size_;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, double k) { return a *= k; }
inline Jet operator*(double k, Jet a) { return a *= k; }
inline Jet operator/(Jet a, double k) { return a /= k; }
inline Jet operator+(Jet a, double k) { return a += k; }
inline Jet operator+(double k, Jet a) { return a += k; }
inline Jet operator-(Jet a, double k) { return a -= k; }
inline Jet operator-(double k, const Jet& a) { return -a + k; }

/// Leibniz product: c_i = sum_j C(i,j) a_j b_{i-j}.
Jet mul(const Jet& a, const Jet& b);

/// Quotient q with mul(q, b) == a to the common order. Requires b.value() != 0.
Jet div(const Jet& a, const Jet& b);

inline Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }
inline Jet operator/(const Jet& a, const Jet& b) { return div(a, b); }

/// Univariate chain rule (Faa di Bruno): jet of f(u(t)) from the derivative
/// table f_derivs[j] = f^(j)(u.value()), j = 0..u.order().
Jet compose(std::span<const double> f_derivs, const Jet& u);

// Elementary functions on jets. Each uses the classic truncated power-series
// recurrence, independent of compose(), so the two routes can be checked
// against each other.
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet tanh(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);   // u.value() > 0
Jet sqrt(const Jet& u);  // u.value() > 0
Jet abs(const Jet& u);

/// u^k for integer k via repeated products (exact at u = 0 for k >= 0).
Jet pow(const Jet& u, long long k);
inline Jet pow(const Jet& u, int k) { return pow(u, static_cast<long long>(k)); }
/// u^r via exp(r log u); requires u.value() > 0.
Jet pow(const Jet& u, double r);

// Derivative tables out[j] = f^(j)(u), j = 0..out.size()-1, for compose().
void sin_derivatives(double u, std::span<double> out);
void cos_derivatives(double u, std::span<double> out);
void tanh_derivatives(double u, std::span<double> out);
void exp_derivatives(double u, std::span<double> out);
void log_derivatives(double u, std::span<double> out);   // u > 0
void sqrt_derivatives(double u, std::span<double> out);  // u > 0
void abs_derivatives(double u, std::span<double> out);

}  // namespace sbc
