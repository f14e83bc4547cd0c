// tickerlab: fetch daily prices, compare forecasters, train, transfer, plot.
//
// Exit codes: 0 success, 1 data error, 2 configuration error, 3 training
// divergence.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tickerlab/date.h"
#include "tickerlab/error.h"
#include "tickerlab/experiments.h"
#include "tickerlab/market_data.h"
#include "tickerlab/metrics.h"
#include "tickerlab/model_io.h"
#include "tickerlab/models.h"
#include "tickerlab/util.h"

#ifndef TICKERLAB_FIXTURE_DIR
#define TICKERLAB_FIXTURE_DIR "data/fixtures"
#endif

namespace {

using namespace tickerlab;

constexpr const char* kDefaultEndpoint = "https://query1.finance.yahoo.com";

struct GlobalOptions {
    std::uint64_t seed = 42;
    bool offline = false;
    std::string endpoint;
    std::string csv_dir;
    std::string start = "2011-01-01";
    std::string end = "2021-01-01";
    std::string price_field = "close";
    double train_fraction = 0.75;
    std::size_t threads = 1;
};

struct ModelOptions {
    std::vector<std::string> models{"single", "dual", "bi", "cnn"};
    std::size_t units = 64;
    std::size_t units2 = 64;
    std::size_t filters = 64;
    std::size_t kernel_width = 2;
    std::size_t window = 3;
    std::size_t epochs = 100;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t patience = 10;
    double validation_fraction = 0.1;
    double clip_norm = 1.0;
};

struct KalmanFlags {
    std::optional<double> r;
    double r_scale = 1e-4;
    double alpha = 1.0;
    std::size_t window = 3;
    double p0 = 0.0;
    bool disabled = false;
};

void add_model_options(CLI::App& cmd, ModelOptions& m, bool list) {
    if (list) {
        cmd.add_option("--models", m.models, "Architectures: single, dual, bi, cnn")
            ->delimiter(',')
            ->capture_default_str();
    }
    cmd.add_option("--units", m.units, "LSTM width")->capture_default_str();
    cmd.add_option("--units2", m.units2, "Second LSTM width (dual)")->capture_default_str();
    cmd.add_option("--filters", m.filters, "Conv filters (cnn)")->capture_default_str();
    cmd.add_option("--kernel-width", m.kernel_width, "Conv kernel width (cnn)")->capture_default_str();
    cmd.add_option("--window", m.window, "Input window length")->capture_default_str();
    cmd.add_option("--epochs", m.epochs, "Maximum training epochs")->capture_default_str();
    cmd.add_option("--lr", m.learning_rate, "Adam learning rate")->capture_default_str();
    cmd.add_option("--batch-size", m.batch_size, "Mini-batch size")->capture_default_str();
    cmd.add_option("--patience", m.patience, "Early-stopping patience, 0 disables")
        ->capture_default_str();
    cmd.add_option("--validation-fraction", m.validation_fraction,
                   "Tail of the training windows held out for early stopping")
        ->capture_default_str();
    cmd.add_option("--clip-norm", m.clip_norm, "Global gradient norm cap, 0 disables")
        ->capture_default_str();
}

void add_kalman_options(CLI::App& cmd, KalmanFlags& k, bool allow_disable) {
    cmd.add_option("--kalman-r", k.r, "Measurement variance R (default scales with train mean)");
    cmd.add_option("--kalman-r-scale", k.r_scale, "R = scale * mean(train price)^2")
        ->capture_default_str();
    cmd.add_option("--kalman-alpha", k.alpha, "Process noise scale alpha")->capture_default_str();
    cmd.add_option("--kalman-window", k.window, "Local variance window")->capture_default_str();
    cmd.add_option("--kalman-p0", k.p0, "Initial estimate variance")->capture_default_str();
    if (allow_disable) {
        cmd.add_flag("--no-kalman", k.disabled, "Skip the Kalman filter");
    }
}

Date parse_date_flag(const std::string& text, const char* flag) {
    const auto d = parse_iso_date(text);
    if (!d) {
        throw Error(ErrorCode::kInvalidConfig, std::string(flag) + ": expected YYYY-MM-DD, got '" + text + "'");
    }
    return *d;
}

std::string upper(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return s;
}

experiments::ExperimentConfig base_config(const GlobalOptions& g) {
    experiments::ExperimentConfig c;
    c.start = parse_date_flag(g.start, "--start");
    c.end = parse_date_flag(g.end, "--end");
    c.split.train_fraction = g.train_fraction;
    if (g.price_field == "close") {
        c.price_field = data::PriceField::kClose;
    } else if (g.price_field == "adjclose" || g.price_field == "adj_close") {
        c.price_field = data::PriceField::kAdjClose;
    } else {
        throw Error(ErrorCode::kInvalidConfig, "--price-field must be close or adjclose");
    }
    if (!g.csv_dir.empty()) {
        c.source.csv_dir = g.csv_dir;
    } else if (g.offline) {
        c.source.endpoint = std::string("file://") + TICKERLAB_FIXTURE_DIR + "/chart";
    } else if (!g.endpoint.empty()) {
        c.source.endpoint = g.endpoint;
    } else if (const char* env = std::getenv("TICKERLAB_ENDPOINT"); env && *env) {
        c.source.endpoint = env;
    } else {
        c.source.endpoint = kDefaultEndpoint;
    }
    if (g.offline && c.source.endpoint.rfind("file://", 0) != 0 && c.source.csv_dir.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "--offline needs fixture data");
    }
    c.train.seed = g.seed;
    c.train.threads = g.threads;
    return c;
}

models::ModelSpec make_spec(const std::string& name, const ModelOptions& m) {
    const auto arch = models::parse_architecture(name);
    if (!arch) {
        throw Error(ErrorCode::kInvalidConfig, "unknown model '" + name + "'");
    }
    models::ModelSpec spec;
    spec.architecture = *arch;
    spec.units = m.units;
    spec.units2 = m.units2;
    spec.filters = m.filters;
    spec.kernel_width = m.kernel_width;
    spec.window = m.window;
    return spec;
}

void apply_model_options(experiments::ExperimentConfig& c, const ModelOptions& m) {
    c.train.epochs = m.epochs;
    c.train.learning_rate = m.learning_rate;
    c.train.batch_size = m.batch_size;
    c.train.early_stop_patience = m.patience;
    c.train.validation_fraction = m.validation_fraction;
    c.train.clip_norm = m.clip_norm;
}

void apply_kalman_options(experiments::ExperimentConfig& c, const KalmanFlags& k) {
    c.kalman.enabled = !k.disabled;
    c.kalman.measurement_variance = k.r;
    c.kalman.measurement_scale = k.r_scale;
    c.kalman.process_scale = k.alpha;
    c.kalman.variance_window = k.window;
    c.kalman.initial_variance = k.p0;
}

void print_metrics(const std::string& what, const metrics::MetricsReport& r) {
    std::cout << what << ": rmse=" << format_double(r.rmse) << " mae=" << format_double(r.mae)
              << " r_squared=" << format_double(r.r_squared) << " n=" << r.n << "\n";
}

int exit_code_for(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::kData: return 1;
        case ErrorCategory::kConfig: return 2;
        case ErrorCategory::kDivergence: return 3;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stock price forecasting with a Kalman filter and LSTM variants"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file mirroring the command-line flags");

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Training seed")->capture_default_str();
    app.add_flag("--offline", g.offline, "Replay bundled fixtures instead of the network");
    app.add_option("--endpoint", g.endpoint, "Chart API base URL (or TICKERLAB_ENDPOINT)");
    app.add_option("--csv-dir", g.csv_dir, "Read <dir>/<symbol>.csv instead of fetching");
    app.add_option("--start", g.start, "First date, inclusive")->capture_default_str();
    app.add_option("--end", g.end, "Last date, exclusive")->capture_default_str();
    app.add_option("--price-field", g.price_field, "close or adjclose")->capture_default_str();
    app.add_option("--split", g.train_fraction, "Training fraction")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for gradient evaluation")
        ->capture_default_str();

    // fetch
    auto* fetch = app.add_subcommand("fetch", "Download daily bars and write CSV files");
    std::vector<std::string> fetch_symbols;
    std::string fetch_out = ".";
    fetch->add_option("symbols", fetch_symbols, "Ticker symbols")->required();
    fetch->add_option("-o,--out", fetch_out, "Output directory")->capture_default_str();

    // compare
    auto* compare = app.add_subcommand("compare", "Train every model and the Kalman filter per symbol");
    std::vector<std::string> compare_symbols;
    std::string compare_out;
    bool no_plots = false;
    bool no_save = false;
    ModelOptions compare_models;
    KalmanFlags compare_kalman;
    compare->add_option("symbols", compare_symbols, "Ticker symbols")->required();
    compare->add_option("-o,--out", compare_out, "Directory for report, models and plots");
    compare->add_flag("--no-plots", no_plots, "Skip plot files");
    compare->add_flag("--no-save-models", no_save, "Skip model files");
    add_model_options(*compare, compare_models, true);
    add_kalman_options(*compare, compare_kalman, true);

    // train
    auto* train = app.add_subcommand("train", "Train one model and save it");
    std::string train_symbol;
    std::string train_model = "single";
    std::string train_out;
    ModelOptions train_models;
    train->add_option("symbol", train_symbol, "Ticker symbol")->required();
    train->add_option("-m,--model", train_model, "Architecture: single, dual, bi, cnn")->capture_default_str();
    train->add_option("-o,--out", train_out, "Model file to write")->required();
    add_model_options(*train, train_models, false);

    // transfer
    auto* transfer = app.add_subcommand("transfer", "Evaluate a saved model on another symbol");
    std::string transfer_model;
    std::string transfer_target;
    std::string transfer_out;
    transfer->add_option("-m,--model", transfer_model, "Saved model file")->required();
    transfer->add_option("target", transfer_target, "Target ticker symbol")->required();
    transfer->add_option("-o,--out", transfer_out, "Directory for the transfer plot");

    // plot
    auto* plot = app.add_subcommand("plot", "Write SVG and CSV plots of one algorithm's fit");
    std::string plot_symbol;
    std::string plot_algorithm = "kalman";
    std::string plot_model;
    std::string plot_out;
    ModelOptions plot_models;
    KalmanFlags plot_kalman;
    plot->add_option("symbol", plot_symbol, "Ticker symbol")->required();
    plot->add_option("-a,--algorithm", plot_algorithm, "kalman or an architecture")->capture_default_str();
    plot->add_option("-m,--model", plot_model, "Use a saved model instead of training");
    plot->add_option("-o,--out", plot_out, "Output path without extension")->required();
    add_model_options(*plot, plot_models, false);
    add_kalman_options(*plot, plot_kalman, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto config = base_config(g);

        if (fetch->parsed()) {
            std::filesystem::create_directories(fetch_out);
            for (const auto& s : fetch_symbols) {
                const std::string symbol = upper(s);
                const auto series = data::fetch_daily(symbol, config.start, config.end, config.source.endpoint);
                const auto path = std::filesystem::path(fetch_out) / (data::symbol_file_stem(symbol) + ".csv");
                data::save_csv_file(series, path);
                std::cout << symbol << ": " << series.size() << " bars -> " << path.string() << "\n";
            }
            return 0;
        }

        if (compare->parsed()) {
            for (const auto& s : compare_symbols) {
                config.symbols.push_back(upper(s));
            }
            apply_model_options(config, compare_models);
            apply_kalman_options(config, compare_kalman);
            for (const auto& name : compare_models.models) {
                if (name.empty()) {
                    continue;
                }
                config.models.push_back(make_spec(name, compare_models));
            }
            config.output_dir = compare_out;
            config.emit_plots = !no_plots;
            config.save_models = !no_save;
            const auto report = experiments::run_comparison(config);
            std::cout << report.to_table();
            return 0;
        }

        if (train->parsed()) {
            const std::string symbol = upper(train_symbol);
            apply_model_options(config, train_models);
            const auto spec = make_spec(train_model, train_models);
            spec.validate();
            config.train.validate();
            const auto series = experiments::prepare_series(symbol, config);
            const auto run = experiments::run_lstm(series, spec, config.train);
            models::save_model(run.model, train_out);
            std::cout << "fingerprint " << run.model.fingerprint.to_string() << ", best epoch "
                      << run.model.best_epoch << "\n";
            print_metrics(symbol + " " + std::string(models::architecture_name(spec.architecture)),
                          metrics::evaluate(run.test_predictions, series.test_actuals()));
            std::cout << "saved " << train_out << "\n";
            return 0;
        }

        if (transfer->parsed()) {
            const std::string target = upper(transfer_target);
            config.output_dir = transfer_out;
            const auto report = experiments::run_transfer(transfer_model, target, config);
            print_metrics(target + " (transferred)", report);
            return 0;
        }

        if (plot->parsed()) {
            const std::string symbol = upper(plot_symbol);
            apply_model_options(config, plot_models);
            apply_kalman_options(config, plot_kalman);
            const auto series = experiments::prepare_series(symbol, config);
            std::vector<double> predictions;
            std::string label;
            if (!plot_model.empty()) {
                const auto model = models::load_model(plot_model);
                auto result = experiments::transfer(model, symbol, config);
                predictions = std::move(result.test_predictions);
                label = experiments::algorithm_label(std::string(models::architecture_name(model.spec().architecture)));
            } else if (plot_algorithm == "kalman") {
                predictions = experiments::run_kalman(series, config.kalman).test_predictions;
                label = experiments::algorithm_label("kalman");
            } else {
                const auto spec = make_spec(plot_algorithm, plot_models);
                spec.validate();
                config.train.validate();
                predictions = experiments::run_lstm(series, spec, config.train).test_predictions;
                label = experiments::algorithm_label(std::string(models::architecture_name(spec.architecture)));
            }
            experiments::emit_plot(series.dates, series.prices, predictions, series.split, plot_out,
                                   symbol + " - " + label);
            print_metrics(symbol + " " + label, metrics::evaluate(predictions, series.test_actuals()));
            std::cout << "wrote " << plot_out << ".svg and " << plot_out << ".csv\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
