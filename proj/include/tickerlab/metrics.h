#pragma once

#include <cstddef>
#include <span>

namespace tickerlab::metrics {

struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

double rmse(std::span<const double> pred, std::span<const double> actual);
double mae(std::span<const double> pred, std::span<const double> actual);
// Coefficient of determination against the mean of `actual`.
double r_squared(std::span<const double> pred, std::span<const double> actual);

MetricsReport evaluate(std::span<const double> pred, std::span<const double> actual);

}  // namespace tickerlab::metrics
