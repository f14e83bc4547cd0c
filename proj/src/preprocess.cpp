#include "tickerlab/preprocess.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tickerlab/error.h"

namespace tickerlab::prep {

namespace {

WindowedDataset windows_for_targets(std::span<const double> scaled, std::size_t window,
                                    std::size_t first_target, std::size_t end_target) {
    WindowedDataset ds;
    ds.window = window;
    ds.first_target_index = first_target;
    const std::size_t n = end_target > first_target ? end_target - first_target : 0;
    ds.inputs = nn::Tensor({n, window, 1});
    ds.targets.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t t = first_target + k;
        for (std::size_t j = 0; j < window; ++j) {
            ds.inputs.at(k, j, 0) = scaled[t - window + j];
        }
        ds.targets[k] = scaled[t];
    }
    return ds;
}

}  // namespace

ScalingParams fit_scaler(std::span<const double> train_values) {
    if (train_values.size() < 2) {
        throw Error(ErrorCode::kTooShort, "scaler needs at least 2 values");
    }
    const auto [lo, hi] = std::minmax_element(train_values.begin(), train_values.end());
    if (!(*hi > *lo)) {
        throw Error(ErrorCode::kDegenerateRange, "constant series");
    }
    return {*lo, *hi};
}

double transform_value(double value, const ScalingParams& params) {
    return (value - params.min_value) / (params.max_value - params.min_value);
}

double inverse_transform_value(double scaled, const ScalingParams& params) {
    return scaled * (params.max_value - params.min_value) + params.min_value;
}

std::vector<double> transform(std::span<const double> values, const ScalingParams& params) {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [&](double v) { return transform_value(v, params); });
    return out;
}

std::vector<double> inverse_transform(std::span<const double> scaled, const ScalingParams& params) {
    std::vector<double> out(scaled.size());
    std::transform(scaled.begin(), scaled.end(), out.begin(),
                   [&](double v) { return inverse_transform_value(v, params); });
    return out;
}

nn::Tensor WindowedDataset::sample(std::size_t k) const {
    const auto row = inputs.row(k);
    return nn::Tensor({window, 1}, std::vector<double>(row.begin(), row.end()));
}

WindowedDataset make_windows(std::span<const double> scaled, std::size_t window) {
    if (window < 1 || scaled.size() <= window) {
        throw Error(ErrorCode::kTooShort, "length " + std::to_string(scaled.size()) +
                                              " leaves no target for window " +
                                              std::to_string(window));
    }
    return windows_for_targets(scaled, window, window, scaled.size());
}

std::size_t split_index(std::size_t n, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw Error(ErrorCode::kInvalidConfig, "train fraction must lie in (0, 1)");
    }
    return static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
}

std::pair<std::vector<double>, std::vector<double>> chrono_split(std::span<const double> values,
                                                                 const SplitSpec& spec) {
    const std::size_t cut = split_index(values.size(), spec);
    if (cut == 0 || cut >= values.size()) {
        throw Error(ErrorCode::kEmptyPartition,
                    "split of " + std::to_string(values.size()) + " values leaves a partition empty");
    }
    return {std::vector<double>(values.begin(), values.begin() + cut),
            std::vector<double>(values.begin() + cut, values.end())};
}

SupervisedSplit make_supervised_split(std::span<const double> scaled, std::size_t split,
                                      std::size_t window) {
    if (window < 1 || scaled.size() <= window) {
        throw Error(ErrorCode::kTooShort, "series too short for window");
    }
    if (split <= window || split >= scaled.size()) {
        throw Error(ErrorCode::kEmptyPartition,
                    "split index " + std::to_string(split) + " leaves no training or test targets");
    }
    SupervisedSplit out;
    out.split = split;
    out.train = windows_for_targets(scaled, window, window, split);
    out.test = windows_for_targets(scaled, window, split, scaled.size());
    return out;
}

}  // namespace tickerlab::prep
