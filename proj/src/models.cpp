#include "tickerlab/models.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "tickerlab/error.h"
#include "tickerlab/neural/adam.h"
#include "tickerlab/util.h"

namespace tickerlab::models {

namespace {

using nn::Tensor;

// Uniform in [-limit, limit) from the top 53 bits, identical on every
// standard library (std::uniform_real_distribution is not).
double uniform(std::mt19937_64& rng, double limit) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * limit;
}

void fill_uniform(std::span<double> values, std::mt19937_64& rng, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : values) {
        v = uniform(rng, limit);
    }
}

void init_lstm(nn::LstmCellParams& p, std::mt19937_64& rng) {
    const auto in = static_cast<double>(p.input_size());
    const auto h = static_cast<double>(p.hidden_size());
    for (auto gate : {nn::Gate::kForget, nn::Gate::kInput, nn::Gate::kCandidate, nn::Gate::kOutput}) {
        fill_uniform(p.gate_input_weights(gate), rng, in, h);
        fill_uniform(p.gate_recurrent_weights(gate), rng, h, h);
    }
    p.bias.fill(0.0);
    for (double& b : p.gate_bias(nn::Gate::kForget)) {
        b = 1.0;
    }
}

Tensor reversed_rows(const Tensor& t) {
    Tensor out = zeros_like(t);
    const std::size_t n = t.dim(0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = t.row(n - 1 - i);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

void add_into(NetworkWeights& dst, const NetworkWeights& src) {
    auto d = dst.tensors();
    auto s = src.tensors();
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto dv = d[i]->values();
        auto sv = s[i]->values();
        for (std::size_t k = 0; k < dv.size(); ++k) {
            dv[k] += sv[k];
        }
    }
}

void clip_global_norm(NetworkWeights& grads, double max_norm) {
    if (max_norm <= 0.0) {
        return;
    }
    double sq = 0.0;
    for (const Tensor* t : std::as_const(grads).tensors()) {
        for (double v : t->values()) {
            sq += v * v;
        }
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (Tensor* t : grads.tensors()) {
            for (double& v : t->values()) {
                v *= scale;
            }
        }
    }
}

// Runs fn(i) for i in [0, count) over up to `threads` workers. Each index is
// handled by exactly one worker; callers write to disjoint slots.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) {
                fn(i);
            }
        });
    }
}

}  // namespace

std::string_view architecture_name(Architecture arch) {
    switch (arch) {
        case Architecture::kSingleLstm: return "single_lstm";
        case Architecture::kDualLstm: return "dual_lstm";
        case Architecture::kBiLstm: return "bi_lstm";
        case Architecture::kCnnLstm: return "cnn_lstm";
    }
    return "unknown";
}

std::string_view architecture_label(Architecture arch) {
    switch (arch) {
        case Architecture::kSingleLstm: return "Single Layer LSTM";
        case Architecture::kDualLstm: return "Dual Layer LSTM";
        case Architecture::kBiLstm: return "Bidirectional LSTM";
        case Architecture::kCnnLstm: return "CNN-LSTM";
    }
    return "unknown";
}

std::optional<Architecture> parse_architecture(std::string_view name) {
    for (auto arch : {Architecture::kSingleLstm, Architecture::kDualLstm, Architecture::kBiLstm,
                      Architecture::kCnnLstm}) {
        const auto full = architecture_name(arch);
        if (name == full || name == full.substr(0, full.find('_'))) {
            return arch;
        }
    }
    return std::nullopt;
}

ModelSpec ModelSpec::single_lstm(std::size_t units, std::size_t window) {
    ModelSpec s;
    s.architecture = Architecture::kSingleLstm;
    s.units = units;
    s.window = window;
    return s;
}

ModelSpec ModelSpec::dual_lstm(std::size_t units1, std::size_t units2, std::size_t window) {
    ModelSpec s;
    s.architecture = Architecture::kDualLstm;
    s.units = units1;
    s.units2 = units2;
    s.window = window;
    return s;
}

ModelSpec ModelSpec::bi_lstm(std::size_t units, std::size_t window) {
    ModelSpec s;
    s.architecture = Architecture::kBiLstm;
    s.units = units;
    s.window = window;
    return s;
}

ModelSpec ModelSpec::cnn_lstm(std::size_t filters, std::size_t kernel_width, std::size_t units,
                              std::size_t window) {
    ModelSpec s;
    s.architecture = Architecture::kCnnLstm;
    s.filters = filters;
    s.kernel_width = kernel_width;
    s.units = units;
    s.window = window;
    return s;
}

void ModelSpec::validate() const {
    if (units < 1 || window < 1) {
        throw Error(ErrorCode::kInvalidSpec, "units and window must be at least 1");
    }
    if (architecture == Architecture::kDualLstm && units2 < 1) {
        throw Error(ErrorCode::kInvalidSpec, "second layer needs at least 1 unit");
    }
    if (architecture == Architecture::kCnnLstm) {
        if (filters < 1 || kernel_width < 1) {
            throw Error(ErrorCode::kInvalidSpec, "filters and kernel width must be at least 1");
        }
        if (window < kernel_width) {
            throw Error(ErrorCode::kInvalidSpec, "window " + std::to_string(window) +
                                                     " is narrower than kernel width " +
                                                     std::to_string(kernel_width));
        }
    }
}

std::size_t ModelSpec::head_inputs() const {
    switch (architecture) {
        case Architecture::kDualLstm: return units2;
        case Architecture::kBiLstm: return 2 * units;
        default: return units;
    }
}

std::string ModelSpec::describe() const {
    std::ostringstream ss;
    ss << architecture_name(architecture) << "(window=" << window << ", units=" << units;
    if (architecture == Architecture::kDualLstm) {
        ss << ", units2=" << units2;
    }
    if (architecture == Architecture::kCnnLstm) {
        ss << ", filters=" << filters << ", kernel_width=" << kernel_width;
    }
    ss << ")";
    return ss.str();
}

std::vector<Tensor*> NetworkWeights::tensors() {
    std::vector<Tensor*> out;
    for (auto& c : conv) {
        for (auto* t : c.tensors()) out.push_back(t);
    }
    for (auto& l : lstm) {
        for (auto* t : l.tensors()) out.push_back(t);
    }
    for (auto* t : head.tensors()) out.push_back(t);
    return out;
}

std::vector<const Tensor*> NetworkWeights::tensors() const {
    std::vector<const Tensor*> out;
    for (const auto& c : conv) {
        for (const auto* t : c.tensors()) out.push_back(t);
    }
    for (const auto& l : lstm) {
        for (const auto* t : l.tensors()) out.push_back(t);
    }
    for (const auto* t : head.tensors()) out.push_back(t);
    return out;
}

std::vector<std::string> NetworkWeights::tensor_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < conv.size(); ++i) {
        const auto p = "conv" + std::to_string(i);
        out.push_back(p + ".kernels");
        out.push_back(p + ".bias");
    }
    for (std::size_t i = 0; i < lstm.size(); ++i) {
        const auto p = "lstm" + std::to_string(i);
        out.push_back(p + ".input_weights");
        out.push_back(p + ".recurrent_weights");
        out.push_back(p + ".bias");
    }
    out.push_back("head.weights");
    out.push_back("head.bias");
    return out;
}

NetworkWeights NetworkWeights::zeros_like() const {
    NetworkWeights z = *this;
    z.set_zero();
    return z;
}

void NetworkWeights::set_zero() {
    for (Tensor* t : tensors()) {
        t->fill(0.0);
    }
}

Network::Network(ModelSpec spec, NetworkWeights weights)
    : spec_(spec), weights_(std::move(weights)) {
    spec_.validate();
    const std::size_t want_lstm =
        (spec_.architecture == Architecture::kDualLstm || spec_.architecture == Architecture::kBiLstm) ? 2 : 1;
    const std::size_t want_conv = spec_.architecture == Architecture::kCnnLstm ? 1 : 0;
    if (weights_.lstm.size() != want_lstm || weights_.conv.size() != want_conv ||
        weights_.head.weights.rank() != 2 || weights_.head.input_size() != spec_.head_inputs() ||
        weights_.head.output_size() != 1) {
        throw Error(ErrorCode::kShapeMismatch, "weights do not match " + spec_.describe());
    }
}

double Network::forward(const Tensor& window) const {
    ForwardTrace trace;
    return forward(window, trace);
}

double Network::forward(const Tensor& window, ForwardTrace& trace) const {
    if (window.rank() != 2 || window.dim(0) != spec_.window || window.dim(1) != 1) {
        throw Error(ErrorCode::kShapeMismatch, "network input must be (window, 1)");
    }
    trace.input = window;
    trace.sequences.clear();
    trace.conv.reset();
    const auto& w = weights_;
    switch (spec_.architecture) {
        case Architecture::kSingleLstm: {
            trace.sequences.push_back(nn::lstm_sequence_forward(
                window, w.lstm[0], nn::LstmStepState::zeros(spec_.units)));
            trace.head_input = trace.sequences[0].final_hidden();
            break;
        }
        case Architecture::kDualLstm: {
            trace.sequences.push_back(nn::lstm_sequence_forward(
                window, w.lstm[0], nn::LstmStepState::zeros(spec_.units)));
            const Tensor per_step = trace.sequences[0].hidden_sequence();
            trace.sequences.push_back(nn::lstm_sequence_forward(
                per_step, w.lstm[1], nn::LstmStepState::zeros(spec_.units2)));
            trace.head_input = trace.sequences[1].final_hidden();
            break;
        }
        case Architecture::kBiLstm: {
            trace.reversed_input = reversed_rows(window);
            trace.sequences.push_back(nn::lstm_sequence_forward(
                window, w.lstm[0], nn::LstmStepState::zeros(spec_.units)));
            trace.sequences.push_back(nn::lstm_sequence_forward(
                trace.reversed_input, w.lstm[1], nn::LstmStepState::zeros(spec_.units)));
            trace.head_input = trace.sequences[0].final_hidden();
            const auto& back = trace.sequences[1].final_hidden();
            trace.head_input.insert(trace.head_input.end(), back.begin(), back.end());
            break;
        }
        case Architecture::kCnnLstm: {
            trace.conv = nn::conv1d_forward(window, w.conv[0]);
            trace.sequences.push_back(nn::lstm_sequence_forward(
                trace.conv->output, w.lstm[0], nn::LstmStepState::zeros(spec_.units)));
            trace.head_input = trace.sequences[0].final_hidden();
            break;
        }
    }
    trace.output = nn::dense_forward(trace.head_input, w.head)[0];
    if (!std::isfinite(trace.output)) {
        throw Error(ErrorCode::kNonFiniteActivation, "network output");
    }
    return trace.output;
}

double Network::predict(std::span<const double> window_values) const {
    return forward(Tensor({window_values.size(), 1},
                          std::vector<double>(window_values.begin(), window_values.end())));
}

void Network::backward(const ForwardTrace& trace, double grad_output, NetworkWeights& grads) const {
    const auto& w = weights_;
    const double dy[1] = {grad_output};
    const auto d_head = nn::dense_backward(trace.head_input, dy, w.head, grads.head);
    switch (spec_.architecture) {
        case Architecture::kSingleLstm:
            nn::lstm_backward(d_head, trace.sequences.at(0).caches, w.lstm[0], grads.lstm[0]);
            break;
        case Architecture::kDualLstm: {
            const Tensor d_seq =
                nn::lstm_backward(d_head, trace.sequences.at(1).caches, w.lstm[1], grads.lstm[1]);
            nn::lstm_backward(d_seq, trace.sequences.at(0).caches, w.lstm[0], grads.lstm[0]);
            break;
        }
        case Architecture::kBiLstm: {
            const std::span<const double> all(d_head);
            nn::lstm_backward(all.first(spec_.units), trace.sequences.at(0).caches, w.lstm[0],
                              grads.lstm[0]);
            nn::lstm_backward(all.subspan(spec_.units), trace.sequences.at(1).caches, w.lstm[1],
                              grads.lstm[1]);
            break;
        }
        case Architecture::kCnnLstm: {
            const Tensor d_conv =
                nn::lstm_backward(d_head, trace.sequences.at(0).caches, w.lstm[0], grads.lstm[0]);
            nn::conv1d_backward(trace.input, *trace.conv, d_conv, w.conv[0], grads.conv[0]);
            break;
        }
    }
}

Network build(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    NetworkWeights w;
    std::size_t lstm_input = 1;
    if (spec.architecture == Architecture::kCnnLstm) {
        nn::Conv1dParams conv(1, spec.filters, spec.kernel_width);
        const auto k = static_cast<double>(spec.kernel_width);
        fill_uniform(conv.kernels.values(), rng, k * 1.0, k * static_cast<double>(spec.filters));
        w.conv.push_back(std::move(conv));
        lstm_input = spec.filters;
    }
    w.lstm.emplace_back(lstm_input, spec.units);
    if (spec.architecture == Architecture::kDualLstm) {
        w.lstm.emplace_back(spec.units, spec.units2);
    } else if (spec.architecture == Architecture::kBiLstm) {
        w.lstm.emplace_back(1, spec.units);
    }
    for (auto& l : w.lstm) {
        init_lstm(l, rng);
    }
    w.head = nn::DenseParams(spec.head_inputs(), 1);
    fill_uniform(w.head.weights.values(), rng, static_cast<double>(spec.head_inputs()), 1.0);
    return Network(spec, std::move(w));
}

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw Error(ErrorCode::kInvalidConfig, "epochs must be at least 1");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw Error(ErrorCode::kInvalidConfig, "learning rate must be finite and non-negative");
    }
    if (batch_size < 1) {
        throw Error(ErrorCode::kInvalidConfig, "batch size must be at least 1");
    }
    if (!(validation_fraction >= 0.0 && validation_fraction < 0.5)) {
        throw Error(ErrorCode::kInvalidConfig, "validation fraction must lie in [0, 0.5)");
    }
    if (!(clip_norm >= 0.0)) {
        throw Error(ErrorCode::kInvalidConfig, "clip norm must be non-negative");
    }
}

std::string TrainConfig::describe() const {
    std::ostringstream ss;
    ss << "epochs=" << epochs << ";learning_rate=" << format_double(learning_rate)
       << ";batch_size=" << batch_size << ";seed=" << seed
       << ";early_stop_patience=" << early_stop_patience
       << ";validation_fraction=" << format_double(validation_fraction)
       << ";clip_norm=" << format_double(clip_norm) << ";optimizer=adam(0.9,0.999,1e-8);loss=mse";
    return ss.str();
}

std::string TrainingFingerprint::to_string() const {
    return "seed=" + std::to_string(seed) + ";config=" + to_hex(config_hash) +
           ";data=" + to_hex(data_hash);
}

std::uint64_t hash_dataset(const prep::WindowedDataset& data) {
    Fnv1a h;
    h.update(static_cast<std::uint64_t>(data.window));
    h.update(data.inputs.values());
    h.update(std::span<const double>(data.targets));
    return h.digest();
}

double mean_squared_error(const Network& network, const prep::WindowedDataset& data,
                          std::size_t begin, std::size_t end) {
    double ss = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        const double d = network.predict(data.inputs.row(k)) - data.targets[k];
        ss += d * d;
    }
    return end > begin ? ss / static_cast<double>(end - begin) : 0.0;
}

TrainedModel train(Network model, const prep::WindowedDataset& train_data,
                   const TrainConfig& config, const prep::ScalingParams& scaler) {
    config.validate();
    const ModelSpec spec = model.spec();
    const std::size_t n = train_data.samples();
    if (n == 0) {
        throw Error(ErrorCode::kTooShort, "empty training set");
    }
    if (train_data.window != spec.window || train_data.inputs.rank() != 3 ||
        train_data.inputs.dim(1) != spec.window || train_data.inputs.dim(2) != 1) {
        throw Error(ErrorCode::kShapeMismatch, "dataset windows do not match " + spec.describe());
    }
    const auto n_val = static_cast<std::size_t>(
        std::floor(config.validation_fraction * static_cast<double>(n)));
    const std::size_t n_fit = n - n_val;
    if (n_fit == 0) {
        throw Error(ErrorCode::kEmptyPartition, "validation split leaves no training samples");
    }

    TrainedModel out;
    out.scaler = scaler;
    out.config = config;
    {
        Fnv1a h;
        h.update(spec.describe());
        h.update(config.describe());
        out.fingerprint = {config.seed, h.digest(), hash_dataset(train_data)};
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto measure = [&](const Network& net) {
        return EpochLoss{mean_squared_error(net, train_data, 0, n_fit),
                         n_val ? mean_squared_error(net, train_data, n_fit, n) : nan};
    };
    auto monitored = [&](const EpochLoss& l) { return n_val ? l.validation : l.train; };

    out.loss_history.push_back(measure(model));
    if (!std::isfinite(out.loss_history[0].train)) {
        throw Error(ErrorCode::kNonFiniteLoss, "epoch 0");
    }
    double best = monitored(out.loss_history[0]);
    std::size_t best_epoch = 0;
    NetworkWeights best_weights = model.weights();

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    nn::AdamOptimizer optimizer(model.weights().tensors(), {config.learning_rate});
    std::vector<std::size_t> order(n_fit);
    const std::size_t max_batch = std::min(config.batch_size, n_fit);
    std::vector<NetworkWeights> sample_grads(max_batch, model.weights().zeros_like());
    NetworkWeights batch_grad = model.weights().zeros_like();

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n_fit; i-- > 1;) {
            std::swap(order[i], order[rng() % (i + 1)]);
        }
        try {
            for (std::size_t b0 = 0; b0 < n_fit; b0 += config.batch_size) {
                const std::size_t bsz = std::min(config.batch_size, n_fit - b0);
                parallel_for(bsz, config.threads, [&](std::size_t s) {
                    const std::size_t k = order[b0 + s];
                    NetworkWeights& g = sample_grads[s];
                    g.set_zero();
                    ForwardTrace trace;
                    const double y = model.forward(train_data.sample(k), trace);
                    model.backward(trace, 2.0 * (y - train_data.targets[k]) / static_cast<double>(bsz),
                                   g);
                });
                // Reduce in sample order so the sum does not depend on threads.
                batch_grad.set_zero();
                for (std::size_t s = 0; s < bsz; ++s) {
                    add_into(batch_grad, sample_grads[s]);
                }
                clip_global_norm(batch_grad, config.clip_norm);
                optimizer.step(std::as_const(batch_grad).tensors());
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::kNonFiniteActivation) {
                throw Error(ErrorCode::kNonFiniteLoss, "epoch " + std::to_string(epoch) + ": " + e.what());
            }
            throw;
        }
        const EpochLoss loss = measure(model);
        out.loss_history.push_back(loss);
        if (!std::isfinite(loss.train) || (n_val && !std::isfinite(loss.validation))) {
            throw Error(ErrorCode::kNonFiniteLoss, "epoch " + std::to_string(epoch));
        }
        if (monitored(loss) < best) {
            best = monitored(loss);
            best_epoch = epoch;
            best_weights = model.weights();
        } else if (config.early_stop_patience > 0 &&
                   epoch - best_epoch >= config.early_stop_patience) {
            break;
        }
    }
    model.weights() = std::move(best_weights);
    out.network = std::move(model);
    out.best_epoch = best_epoch;
    return out;
}

std::vector<double> predict_one_step_series(const TrainedModel& model,
                                            std::span<const double> full_scaled_series,
                                            std::size_t begin, std::size_t end) {
    const std::size_t w = model.spec().window;
    if (begin < w || end > full_scaled_series.size() || begin > end) {
        throw Error(ErrorCode::kInsufficientContext,
                    "range [" + std::to_string(begin) + ", " + std::to_string(end) +
                        ") needs " + std::to_string(w) + " days of history inside a series of " +
                        std::to_string(full_scaled_series.size()));
    }
    std::vector<double> out;
    out.reserve(end - begin);
    for (std::size_t t = begin; t < end; ++t) {
        const double scaled = model.network.predict(full_scaled_series.subspan(t - w, w));
        out.push_back(prep::inverse_transform_value(scaled, model.scaler));
    }
    return out;
}

}  // namespace tickerlab::models
