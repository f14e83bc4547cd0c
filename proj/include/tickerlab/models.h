#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tickerlab/neural/conv1d.h"
#include "tickerlab/neural/dense.h"
#include "tickerlab/neural/lstm.h"
#include "tickerlab/preprocess.h"

namespace tickerlab::models {

enum class Architecture { kSingleLstm, kDualLstm, kBiLstm, kCnnLstm };

// Canonical names: single_lstm, dual_lstm, bi_lstm, cnn_lstm.
std::string_view architecture_name(Architecture arch);
// Also accepts the short forms single, dual, bi, cnn.
std::optional<Architecture> parse_architecture(std::string_view name);
// Display label used in reports, e.g. "Bidirectional LSTM".
std::string_view architecture_label(Architecture arch);

struct ModelSpec {
    Architecture architecture = Architecture::kSingleLstm;
    std::size_t units = 64;   // LSTM width (first layer for DualLstm)
    std::size_t units2 = 64;  // DualLstm second layer
    std::size_t filters = 64;
    std::size_t kernel_width = 2;
    std::size_t window = 3;

    static ModelSpec single_lstm(std::size_t units = 64, std::size_t window = 3);
    static ModelSpec dual_lstm(std::size_t units1 = 64, std::size_t units2 = 64,
                               std::size_t window = 3);
    static ModelSpec bi_lstm(std::size_t units = 64, std::size_t window = 3);
    static ModelSpec cnn_lstm(std::size_t filters = 64, std::size_t kernel_width = 2,
                              std::size_t units = 64, std::size_t window = 3);

    void validate() const;
    // Width of the regression head's input.
    std::size_t head_inputs() const;
    // Stable one-line description, part of the training fingerprint.
    std::string describe() const;

    bool operator==(const ModelSpec&) const = default;
};

// Layer parameters of one network. Layout per architecture:
//   SingleLstm: lstm[0]                 -> head
//   DualLstm:   lstm[0] -> lstm[1]      -> head
//   BiLstm:     lstm[0] (forward) || lstm[1] (reversed window) -> head
//   CnnLstm:    conv[0] -> lstm[0]      -> head
struct NetworkWeights {
    std::vector<nn::Conv1dParams> conv;
    std::vector<nn::LstmCellParams> lstm;
    nn::DenseParams head;

    std::vector<nn::Tensor*> tensors();
    std::vector<const nn::Tensor*> tensors() const;
    // Same order as tensors(), e.g. "lstm0.input_weights".
    std::vector<std::string> tensor_names() const;

    NetworkWeights zeros_like() const;
    void set_zero();

    bool operator==(const NetworkWeights&) const = default;
};

// Intermediate values of one forward pass, consumed by backward().
struct ForwardTrace {
    nn::Tensor input;
    nn::Tensor reversed_input;
    std::optional<nn::Conv1dResult> conv;
    std::vector<nn::LstmSequenceResult> sequences;
    std::vector<double> head_input;
    double output = 0.0;
};

class Network {
public:
    Network() = default;
    Network(ModelSpec spec, NetworkWeights weights);

    const ModelSpec& spec() const noexcept { return spec_; }
    const NetworkWeights& weights() const noexcept { return weights_; }
    NetworkWeights& weights() noexcept { return weights_; }

    // `window` is (timesteps, 1) in scaled units; returns the scaled
    // next-step prediction.
    double forward(const nn::Tensor& window) const;
    double forward(const nn::Tensor& window, ForwardTrace& trace) const;
    double predict(std::span<const double> window_values) const;

    // Adds d(output)/d(params) * grad_output into `grads`.
    void backward(const ForwardTrace& trace, double grad_output, NetworkWeights& grads) const;

    bool operator==(const Network&) const = default;

private:
    ModelSpec spec_;
    NetworkWeights weights_;
};

// Scaled uniform (+-sqrt(6 / (fan_in + fan_out))) weights, zero biases
// except forget-gate biases of 1. Deterministic in `seed`.
Network build(const ModelSpec& spec, std::uint64_t seed);

struct TrainConfig {
    std::size_t epochs = 100;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 42;
    std::size_t early_stop_patience = 10;  // 0 disables early stopping
    double validation_fraction = 0.1;     // taken from the end of the training set
    double clip_norm = 1.0;               // global gradient norm cap; 0 disables
    std::size_t threads = 1;              // does not affect results

    void validate() const;
    // Stable text of every result-affecting field.
    std::string describe() const;
};

struct EpochLoss {
    double train = 0.0;
    double validation = 0.0;  // NaN when there is no validation set

    bool operator==(const EpochLoss&) const = default;
};

struct TrainingFingerprint {
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t data_hash = 0;

    std::string to_string() const;
    bool operator==(const TrainingFingerprint&) const = default;
};

struct TrainedModel {
    Network network;
    prep::ScalingParams scaler;
    TrainingFingerprint fingerprint;
    TrainConfig config;
    // Entry 0 is the loss before any update; entry e follows epoch e.
    std::vector<EpochLoss> loss_history;
    std::size_t best_epoch = 0;

    const ModelSpec& spec() const noexcept { return network.spec(); }
};

std::uint64_t hash_dataset(const prep::WindowedDataset& data);

// Mean squared error of the network over `data`, summed in sample order.
double mean_squared_error(const Network& network, const prep::WindowedDataset& data,
                          std::size_t begin, std::size_t end);

// Adam on mean squared error over seeded mini-batches with early stopping
// on the validation tail. The returned weights are those of the best epoch.
TrainedModel train(Network model, const prep::WindowedDataset& train_data,
                   const TrainConfig& config, const prep::ScalingParams& scaler);

// For each t in [begin, end): feed the true scaled values [t - window, t)
// and map the output back to price units with the model's scaler.
std::vector<double> predict_one_step_series(const TrainedModel& model,
                                            std::span<const double> full_scaled_series,
                                            std::size_t begin, std::size_t end);

}  // namespace tickerlab::models
