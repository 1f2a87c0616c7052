#pragma once

#include <cmath>
#include <numbers>

namespace srl::normal {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal CDF through erfc, accurate in the lower tail.
inline double cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

inline double pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

inline double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

/// log N(z). erfc stays in the normal range down to z ~ -37; below that the
/// Mills-ratio asymptotic series is used.
inline double log_cdf(double z) {
    if (z > -37.0) return std::log(cdf(z));
    const double r = 1.0 / (z * z);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return -0.5 * z * z - std::log(-z) - kLogSqrt2Pi + std::log(series);
}

/// pdf(z) / cdf(z), stable for very negative z.
inline double inverse_mills(double z) { return std::exp(log_pdf(z) - log_cdf(z)); }

} // namespace srl::normal
