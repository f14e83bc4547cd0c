#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's arithmetic: gradients come from central differences,
// metrics from long-double loops written out longhand.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "tickerlab/neural/tensor.h"

namespace tickerlab::oracle {

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

inline void randomize(nn::Tensor& t, std::mt19937_64& rng, double scale = 0.5) {
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& v : t.values()) {
        v = u(rng);
    }
}

inline nn::Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng,
                                double scale = 0.5) {
    nn::Tensor t(std::move(shape));
    randomize(t, rng, scale);
    return t;
}

// |a - n| / max(|a|, |n|, floor). The floor keeps entries that are zero up to
// round-off from reporting huge relative errors.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
    return std::abs(analytic - numeric) /
           std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Central difference of `loss` with respect to every element of `param`,
// perturbing in place and restoring each value afterwards.
inline nn::Tensor numeric_gradient(nn::Tensor& param, const std::function<double()>& loss,
                                   double eps = 1e-5) {
    nn::Tensor grad = nn::zeros_like(param);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double saved = param[i];
        param[i] = saved + eps;
        const double up = loss();
        param[i] = saved - eps;
        const double down = loss();
        param[i] = saved;
        grad[i] = (up - down) / (2.0 * eps);
    }
    return grad;
}

inline double max_relative_error(const nn::Tensor& analytic, const nn::Tensor& numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        worst = std::max(worst, relative_error(analytic[i], numeric[i]));
    }
    return worst;
}

// sum(weights .* values)
inline double weighted_sum(std::span<const double> weights, std::span<const double> values) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s += weights[i] * values[i];
    }
    return s;
}

struct MetricsOracle {
    long double rmse = 0;
    long double mae = 0;
    long double r_squared = 0;
};

inline MetricsOracle brute_force_metrics(std::span<const double> pred, std::span<const double> actual) {
    const std::size_t n = actual.size();
    long double sq = 0;
    long double ab = 0;
    long double mean = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double d = static_cast<long double>(pred[i]) - actual[i];
        sq += d * d;
        ab += d < 0 ? -d : d;
        mean += actual[i];
    }
    mean /= static_cast<long double>(n);
    long double tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double d = actual[i] - mean;
        tot += d * d;
    }
    MetricsOracle o;
    o.rmse = std::sqrt(sq / static_cast<long double>(n));
    o.mae = ab / static_cast<long double>(n);
    o.r_squared = 1.0L - sq / tot;
    return o;
}

// x_t = x_{t-1} + N(0, sigma^2), x_0 = start.
inline std::vector<double> random_walk(std::size_t n, double sigma, double start, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, sigma);
    std::vector<double> x(n);
    x[0] = start;
    for (std::size_t t = 1; t < n; ++t) {
        x[t] = x[t - 1] + step(rng);
    }
    return x;
}

// 0.5 + 0.4 sin(2 pi t / period): a noiseless wave inside [0.1, 0.9].
inline std::vector<double> sine_wave(std::size_t n, double period = 50.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = 0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
    }
    return x;
}

}  // namespace tickerlab::oracle
