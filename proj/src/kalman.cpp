#include "tickerlab/kalman.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tickerlab/error.h"

namespace tickerlab::kalman {

void KalmanConfig::validate() const {
    if (!(measurement_variance > 0.0) || !std::isfinite(measurement_variance)) {
        throw Error(ErrorCode::kInvalidConfig, "measurement variance must be positive");
    }
    if (!(process_scale > 0.0) || !std::isfinite(process_scale)) {
        throw Error(ErrorCode::kInvalidConfig, "process scale must be positive");
    }
    if (variance_window < 2) {
        throw Error(ErrorCode::kInvalidConfig, "variance window must be at least 2");
    }
    if (!(initial_variance >= 0.0)) {
        throw Error(ErrorCode::kInvalidConfig, "initial variance must be non-negative");
    }
}

KalmanConfig default_config(std::span<const double> reference_prices, double measurement_scale) {
    if (reference_prices.empty()) {
        throw Error(ErrorCode::kTooShort, "no reference prices for measurement variance");
    }
    const double mean = std::accumulate(reference_prices.begin(), reference_prices.end(), 0.0) /
                        static_cast<double>(reference_prices.size());
    KalmanConfig config;
    config.measurement_variance = measurement_scale * mean * mean;
    return config;
}

double local_variance(std::span<const double> prices, std::size_t t, std::size_t window) {
    if (window == 0 || t < window || t > prices.size()) {
        throw Error(ErrorCode::kInsufficientHistory,
                    "index " + std::to_string(t) + " has fewer than " + std::to_string(window) +
                        " prior prices");
    }
    const auto slice = prices.subspan(t - window, window);
    const double n = static_cast<double>(window);
    const double mean = std::accumulate(slice.begin(), slice.end(), 0.0) / n;
    double ss = 0.0;
    for (double p : slice) {
        ss += (p - mean) * (p - mean);
    }
    return ss / n;
}

double kalman_gain(double predicted_variance, double measurement_variance) {
    return predicted_variance / (predicted_variance + measurement_variance);
}

KalmanState kalman_step(const KalmanState& state, double measurement, double process_variance,
                        const KalmanConfig& config) {
    const double predicted_estimate = state.estimate;
    const double predicted_variance = state.variance + process_variance;
    const double gain = kalman_gain(predicted_variance, config.measurement_variance);
    return {predicted_estimate + gain * (measurement - predicted_estimate),
            (1.0 - gain) * predicted_variance};
}

std::vector<double> filter_one_step_ahead(std::span<const double> prices,
                                          const KalmanConfig& config) {
    config.validate();
    const std::size_t w = config.variance_window;
    if (prices.size() <= w) {
        throw Error(ErrorCode::kTooShort, "need more than " + std::to_string(w) + " prices");
    }
    std::vector<double> predictions;
    predictions.reserve(prices.size() - w);
    KalmanState state{prices[0], config.initial_variance};
    for (std::size_t s = 1; s < prices.size(); ++s) {
        if (s >= w) {
            predictions.push_back(state.estimate);
        }
        const double q = config.process_scale * local_variance(prices, s, std::min(s, w));
        state = kalman_step(state, prices[s], q, config);
    }
    return predictions;
}

}  // namespace tickerlab::kalman
