#pragma once

// Closed-form expectations of the two-branch threshold profile under a
// Gaussian law. Both the inner value function Psi and the parameterized
// U^theta reduce to this kernel.

#include <cmath>

#include "srl/dual.hpp"

namespace srl {

/// Coefficients of the threshold profile
///   g(y) = lower_coef * exp(lower_rate * (y - threshold))                 y <= threshold
///   g(y) = slope * (y - threshold) + level - upper_coef * exp(upper_rate * y)   y >  threshold
template <class T>
struct ThresholdProfile {
    double threshold;
    T lower_coef;
    T lower_rate;
    double slope;
    T level;
    T upper_coef;
    T upper_rate;
};

/// E[g(Y)] for Y ~ Normal(mean, sd^2), sd > 0. Exponential moments are
/// combined with the log-CDF before exponentiating, so huge means and
/// variances do not overflow.
template <class T>
T threshold_profile_expectation(const ThresholdProfile<T>& g, const T& mean, const T& sd) {
    using std::exp;
    const double u = g.threshold;
    const T var = sd * sd;

    // E[e^{k(Y-u)} 1{Y<=u}] = exp(k(m-u) + k^2 s^2/2) N((u - m - k s^2)/s)
    const T k_lo = g.lower_rate;
    const T lower = g.lower_coef *
                    exp(k_lo * (mean - u) + 0.5 * k_lo * k_lo * var +
                        norm_log_cdf((u - mean - k_lo * var) / sd));

    // E[(Y-u) 1{Y>u}] and P(Y>u)
    const T d = (mean - u) / sd;
    const T tail_prob = norm_cdf(d);
    const T linear = g.slope * ((mean - u) * tail_prob + sd * norm_pdf(d)) + g.level * tail_prob;

    // E[e^{kY} 1{Y>u}] = exp(k m + k^2 s^2/2) N((m + k s^2 - u)/s)
    const T k_up = g.upper_rate;
    const T upper = g.upper_coef *
                    exp(k_up * mean + 0.5 * k_up * k_up * var +
                        norm_log_cdf((mean + k_up * var - u) / sd));

    return lower + linear - upper;
}

} // namespace srl
