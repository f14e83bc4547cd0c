#include "tickerlab/metrics.h"

#include <cmath>
#include <string>

#include "tickerlab/error.h"

namespace tickerlab::metrics {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size()) {
        throw Error(ErrorCode::kLengthMismatch, std::to_string(pred.size()) + " predictions vs " +
                                                    std::to_string(actual.size()) + " actuals");
    }
    if (pred.empty()) {
        throw Error(ErrorCode::kEmpty, "no samples");
    }
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - actual[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double sa = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        sa += std::abs(pred[i] - actual[i]);
    }
    return sa / static_cast<double>(pred.size());
}

double r_squared(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    if (actual.size() < 2) {
        throw Error(ErrorCode::kConstantActuals, "R^2 needs at least two samples");
    }
    double mean = 0.0;
    for (double a : actual) {
        mean += a;
    }
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - pred[i]) * (actual[i] - pred[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot == 0.0) {
        throw Error(ErrorCode::kConstantActuals, "actual values are constant");
    }
    return 1.0 - ss_res / ss_tot;
}

MetricsReport evaluate(std::span<const double> pred, std::span<const double> actual) {
    return {rmse(pred, actual), mae(pred, actual), r_squared(pred, actual), pred.size()};
}

}  // namespace tickerlab::metrics
