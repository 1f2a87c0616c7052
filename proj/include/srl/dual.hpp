#pragma once

// Forward-mode dual numbers carrying a fixed-size gradient. Used to
// differentiate the closed-form value families with respect to theta.

#include <array>
#include <cmath>
#include <cstddef>

#include "srl/normal.hpp"

namespace srl {

template <std::size_t N>
struct Dual {
    double val = 0.0;
    std::array<double, N> grad{};

    constexpr Dual() = default;
    constexpr Dual(double v) : val(v) {}  // NOLINT: constants promote implicitly
    constexpr Dual(double v, std::array<double, N> g) : val(v), grad(g) {}

    static constexpr Dual variable(double v, std::size_t index) {
        Dual d(v);
        d.grad[index] = 1.0;
        return d;
    }

    Dual& operator+=(const Dual& o) {
        val += o.val;
        for (std::size_t i = 0; i < N; ++i) grad[i] += o.grad[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        val -= o.val;
        for (std::size_t i = 0; i < N; ++i) grad[i] -= o.grad[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (std::size_t i = 0; i < N; ++i) grad[i] = grad[i] * o.val + val * o.grad[i];
        val *= o.val;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const double inv = 1.0 / o.val;
        for (std::size_t i = 0; i < N; ++i) grad[i] = (grad[i] - val * inv * o.grad[i]) * inv;
        val *= inv;
        return *this;
    }
};

using Dual3 = Dual<3>;

template <std::size_t N>
Dual<N> operator-(Dual<N> a) {
    a.val = -a.val;
    for (auto& g : a.grad) g = -g;
    return a;
}
template <std::size_t N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <std::size_t N>
Dual<N> operator+(Dual<N> a, double b) { a.val += b; return a; }
template <std::size_t N>
Dual<N> operator+(double b, Dual<N> a) { a.val += b; return a; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, double b) { a.val -= b; return a; }
template <std::size_t N>
Dual<N> operator-(double b, const Dual<N>& a) { return Dual<N>(b) - a; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, double b) {
    a.val *= b;
    for (auto& g : a.grad) g *= b;
    return a;
}
template <std::size_t N>
Dual<N> operator*(double b, Dual<N> a) { return a * b; }
template <std::size_t N>
Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <std::size_t N>
Dual<N> operator/(double b, const Dual<N>& a) { return Dual<N>(b) / a; }

namespace detail {
template <std::size_t N>
Dual<N> chain(const Dual<N>& x, double f, double df) {
    Dual<N> r(f);
    for (std::size_t i = 0; i < N; ++i) r.grad[i] = df * x.grad[i];
    return r;
}
} // namespace detail

template <std::size_t N>
Dual<N> exp(const Dual<N>& x) {
    const double e = std::exp(x.val);
    return detail::chain(x, e, e);
}
template <std::size_t N>
Dual<N> log(const Dual<N>& x) { return detail::chain(x, std::log(x.val), 1.0 / x.val); }
template <std::size_t N>
Dual<N> sqrt(const Dual<N>& x) {
    const double s = std::sqrt(x.val);
    return detail::chain(x, s, 0.5 / s);
}

inline double value_of(double x) { return x; }
template <std::size_t N>
double value_of(const Dual<N>& x) { return x.val; }

// Normal-distribution kernels, overloaded for plain doubles and duals so
// templated evaluators can call them unqualified.
inline double norm_cdf(double z) { return normal::cdf(z); }
inline double norm_pdf(double z) { return normal::pdf(z); }
inline double norm_log_cdf(double z) { return normal::log_cdf(z); }

template <std::size_t N>
Dual<N> norm_cdf(const Dual<N>& z) { return detail::chain(z, normal::cdf(z.val), normal::pdf(z.val)); }
template <std::size_t N>
Dual<N> norm_pdf(const Dual<N>& z) {
    const double p = normal::pdf(z.val);
    return detail::chain(z, p, -z.val * p);
}
template <std::size_t N>
Dual<N> norm_log_cdf(const Dual<N>& z) {
    return detail::chain(z, normal::log_cdf(z.val), normal::inverse_mills(z.val));
}

} // namespace srl
