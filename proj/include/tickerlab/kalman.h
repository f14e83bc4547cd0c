#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tickerlab::kalman {

// Scalar random-walk filter. The process variance at each step is
// process_scale times the population variance of the preceding
// `variance_window` prices; measurement variance is a small constant.
struct KalmanConfig {
    double measurement_variance = 1e-4;  // R
    double process_scale = 1.0;          // alpha
    std::size_t variance_window = 3;
    double initial_variance = 0.0;  // P0

    void validate() const;
};

// R = scale * mean(reference)^2, the other fields at their defaults.
KalmanConfig default_config(std::span<const double> reference_prices,
                            double measurement_scale = 1e-4);

struct KalmanState {
    double estimate = 0.0;
    double variance = 0.0;
};

// Population variance (divisor `window`) of prices[t - window, t).
double local_variance(std::span<const double> prices, std::size_t t, std::size_t window);

// Predict (x- = x, P- = P + Q) then update against `measurement`.
KalmanState kalman_step(const KalmanState& state, double measurement, double process_variance,
                        const KalmanConfig& config);

// Gain used by kalman_step for a given predicted variance.
double kalman_gain(double predicted_variance, double measurement_variance);

// prediction[k] forecasts prices[variance_window + k] from prices before it.
// The state starts at {prices[0], P0}; warm-up days use whatever shorter
// history exists for their process variance.
std::vector<double> filter_one_step_ahead(std::span<const double> prices,
                                          const KalmanConfig& config);

}  // namespace tickerlab::kalman
