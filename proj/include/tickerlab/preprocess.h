#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tickerlab/neural/tensor.h"

namespace tickerlab::prep {

// Min-max scaling parameters; max_value > min_value.
struct ScalingParams {
    double min_value = 0.0;
    double max_value = 1.0;

    bool operator==(const ScalingParams&) const = default;
};

ScalingParams fit_scaler(std::span<const double> train_values);

// v -> (v - min) / (max - min). Values outside the fitted range extrapolate
// linearly.
std::vector<double> transform(std::span<const double> values, const ScalingParams& params);
double transform_value(double value, const ScalingParams& params);

std::vector<double> inverse_transform(std::span<const double> scaled, const ScalingParams& params);
double inverse_transform_value(double scaled, const ScalingParams& params);

// Supervised samples: inputs[k] = source[first_target_index + k - window ..
// first_target_index + k), targets[k] = source[first_target_index + k].
struct WindowedDataset {
    nn::Tensor inputs;  // (samples, window, 1)
    std::vector<double> targets;
    std::size_t window = 0;
    std::size_t first_target_index = 0;

    std::size_t samples() const noexcept { return targets.size(); }
    // (window, 1) slice for sample k.
    nn::Tensor sample(std::size_t k) const;
};

WindowedDataset make_windows(std::span<const double> scaled, std::size_t window);

struct SplitSpec {
    double train_fraction = 0.75;
};

// Index of the first test element: floor(train_fraction * n).
std::size_t split_index(std::size_t n, const SplitSpec& spec);

std::pair<std::vector<double>, std::vector<double>> chrono_split(std::span<const double> values,
                                                                 const SplitSpec& spec);

struct SupervisedSplit {
    WindowedDataset train;
    WindowedDataset test;
    std::size_t split = 0;  // first test index in the source series
};

// Windows over the whole scaled series, partitioned by target index: targets
// before `split` train, the rest test. Early test windows therefore draw
// their context from the last training days.
SupervisedSplit make_supervised_split(std::span<const double> scaled, std::size_t split,
                                      std::size_t window);

}  // namespace tickerlab::prep
