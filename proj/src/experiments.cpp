#include "tickerlab/experiments.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "tickerlab/error.h"
#include "tickerlab/model_io.h"
#include "tickerlab/util.h"

namespace tickerlab::experiments {

namespace {

// Re-raises with the (symbol, algorithm) cell prefixed to the message.
template <typename Fn>
auto tagged(const std::string& symbol, const std::string& algorithm, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), "[" + symbol + "/" + algorithm + "] " + e.message(), e.line());
    }
}

std::string kalman_describe(const kalman::KalmanConfig& c) {
    return "kalman(R=" + format_double(c.measurement_variance) +
           ",alpha=" + format_double(c.process_scale) +
           ",window=" + std::to_string(c.variance_window) +
           ",P0=" + format_double(c.initial_variance) + ")";
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
    }
}

std::string point_list(std::span<const double> xs, std::span<const double> ys) {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "", xs[i], ys[i]);
        out += buf;
    }
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (symbols.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "no symbols selected");
    }
    if (models.empty() && !kalman.enabled) {
        throw Error(ErrorCode::kInvalidConfig, "no models selected and the Kalman filter is disabled");
    }
    if (!(start < end)) {
        throw Error(ErrorCode::kInvalidConfig, "start date must precede end date");
    }
    if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
        throw Error(ErrorCode::kInvalidConfig, "train fraction must lie in (0, 1)");
    }
    for (const auto& m : models) {
        try {
            m.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::kInvalidConfig, e.what());
        }
    }
    train.validate();
    if (kalman.enabled) {
        kalman::KalmanConfig probe;
        probe.measurement_variance = kalman.measurement_variance.value_or(1.0);
        probe.process_scale = kalman.process_scale;
        probe.variance_window = kalman.variance_window;
        probe.initial_variance = kalman.initial_variance;
        probe.validate();
        if (!(kalman.measurement_scale > 0.0)) {
            throw Error(ErrorCode::kInvalidConfig, "measurement scale must be positive");
        }
    }
    if (source.csv_dir.empty() && source.endpoint.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "no data source configured");
    }
}

PreparedSeries prepare_series(const std::string& symbol, const ExperimentConfig& config) {
    return tagged(symbol, "data", [&] {
        const data::PriceSeries raw =
            config.source.csv_dir.empty()
                ? data::fetch_daily(symbol, config.start, config.end, config.source.endpoint)
                : data::load_csv_file(config.source.csv_dir / (data::symbol_file_stem(symbol) + ".csv"),
                                      symbol);
        const data::PriceSeries series = data::slice_range(raw, config.start, config.end);
        PreparedSeries out;
        out.symbol = symbol;
        out.dates = data::trading_dates(series);
        out.prices = data::closing_prices(series, config.price_field);
        // Validates that both partitions are non-empty.
        const auto parts = prep::chrono_split(out.prices, config.split);
        out.split = parts.first.size();
        out.scaler = prep::fit_scaler(parts.first);
        out.scaled = prep::transform(out.prices, out.scaler);
        return out;
    });
}

const ReportRow* ComparisonReport::find(const std::string& symbol, const std::string& algorithm) const {
    for (const auto& r : rows) {
        if (r.symbol == symbol && r.algorithm == algorithm) {
            return &r;
        }
    }
    return nullptr;
}

std::string algorithm_label(const std::string& algorithm) {
    if (algorithm == "kalman") {
        return "Kalman Filter";
    }
    if (auto arch = models::parse_architecture(algorithm)) {
        return std::string(models::architecture_label(*arch));
    }
    return algorithm;
}

std::string ComparisonReport::to_csv() const {
    std::string out = "symbol,algorithm,rmse,mae,r_squared,n,fingerprint\n";
    for (const auto& r : rows) {
        out += r.symbol + "," + r.algorithm + "," + format_double(r.metrics.rmse) + "," +
               format_double(r.metrics.mae) + "," + format_double(r.metrics.r_squared) + "," +
               std::to_string(r.metrics.n) + "," + r.fingerprint + "\n";
    }
    return out;
}

std::string ComparisonReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"symbol", r.symbol},
                             {"algorithm", r.algorithm},
                             {"label", algorithm_label(r.algorithm)},
                             {"rmse", r.metrics.rmse},
                             {"mae", r.metrics.mae},
                             {"r_squared", r.metrics.r_squared},
                             {"n", r.metrics.n},
                             {"fingerprint", r.fingerprint}});
    }
    return nlohmann::json{{"rows", rows_json}}.dump(2) + "\n";
}

std::string ComparisonReport::to_table() const {
    std::ostringstream ss;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-8s %-20s %12s %12s %8s %6s\n", "Symbol", "Algorithm", "RMSE",
                  "MAE", "R^2", "n");
    ss << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-8s %-20s %12.4f %12.4f %8.4f %6zu\n", r.symbol.c_str(),
                      algorithm_label(r.algorithm).c_str(), r.metrics.rmse, r.metrics.mae,
                      r.metrics.r_squared, r.metrics.n);
        ss << buf;
    }
    return ss.str();
}

KalmanRun run_kalman(const PreparedSeries& series, const KalmanOptions& options) {
    KalmanRun run;
    const std::span<const double> prices(series.prices);
    run.config = kalman::default_config(prices.first(series.split), options.measurement_scale);
    if (options.measurement_variance) {
        run.config.measurement_variance = *options.measurement_variance;
    }
    run.config.process_scale = options.process_scale;
    run.config.variance_window = options.variance_window;
    run.config.initial_variance = options.initial_variance;
    const std::size_t w = run.config.variance_window;
    if (series.split < w) {
        throw Error(ErrorCode::kInsufficientContext, "training partition shorter than variance window");
    }
    const auto all = kalman::filter_one_step_ahead(prices, run.config);
    run.test_predictions.assign(all.begin() + static_cast<std::ptrdiff_t>(series.split - w), all.end());
    Fnv1a config_hash;
    config_hash.update(kalman_describe(run.config));
    Fnv1a data_hash;
    data_hash.update(prices);
    run.fingerprint = "config=" + to_hex(config_hash.digest()) + ";data=" + to_hex(data_hash.digest());
    return run;
}

LstmRun run_lstm(const PreparedSeries& series, const models::ModelSpec& spec,
                 const models::TrainConfig& train) {
    const auto split = prep::make_supervised_split(series.scaled, series.split, spec.window);
    LstmRun run{models::train(models::build(spec, train.seed), split.train, train, series.scaler), {}};
    run.test_predictions = models::predict_one_step_series(run.model, series.scaled, series.split,
                                                           series.scaled.size());
    return run;
}

ComparisonReport run_comparison(const ExperimentConfig& config) {
    config.validate();
    const bool write = !config.output_dir.empty();
    if (write) {
        ensure_dir(config.output_dir);
        if (config.save_models) ensure_dir(config.output_dir / "models");
        if (config.emit_plots) ensure_dir(config.output_dir / "plots");
    }
    ComparisonReport report;
    for (const auto& symbol : config.symbols) {
        const PreparedSeries series = prepare_series(symbol, config);
        const std::string stem = data::symbol_file_stem(symbol);
        std::vector<ReportRow> rows;
        auto plot = [&](const std::string& algorithm, const std::vector<double>& predictions) {
            if (write && config.emit_plots) {
                emit_plot(series.dates, series.prices, predictions, series.split,
                          config.output_dir / "plots" / (stem + "_" + algorithm),
                          symbol + " - " + algorithm_label(algorithm));
            }
        };
        for (const auto& spec : config.models) {
            const std::string name(models::architecture_name(spec.architecture));
            tagged(symbol, name, [&] {
                LstmRun run = run_lstm(series, spec, config.train);
                rows.push_back({symbol, name,
                                metrics::evaluate(run.test_predictions, series.test_actuals()),
                                run.model.fingerprint.to_string()});
                if (write && config.save_models) {
                    models::save_model(run.model, config.output_dir / "models" / (stem + "_" + name + ".tklb"));
                }
                plot(name, run.test_predictions);
                return 0;
            });
        }
        if (config.kalman.enabled) {
            tagged(symbol, "kalman", [&] {
                const KalmanRun run = run_kalman(series, config.kalman);
                rows.push_back({symbol, "kalman",
                                metrics::evaluate(run.test_predictions, series.test_actuals()),
                                run.fingerprint});
                plot("kalman", run.test_predictions);
                return 0;
            });
        }
        std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
            return a.metrics.rmse < b.metrics.rmse;
        });
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
    if (write) {
        write_text(config.output_dir / "report.csv", report.to_csv());
        write_text(config.output_dir / "report.json", report.to_json());
    }
    return report;
}

TransferResult transfer(const models::TrainedModel& model, const std::string& target_symbol,
                        const ExperimentConfig& config) {
    const std::string name(models::architecture_name(model.spec().architecture));
    return tagged(target_symbol, name, [&] {
        TransferResult out;
        out.target = prepare_series(target_symbol, config);
        models::TrainedModel adapted = model;
        adapted.scaler = out.target.scaler;
        out.test_predictions = models::predict_one_step_series(
            adapted, out.target.scaled, out.target.split, out.target.scaled.size());
        out.metrics = metrics::evaluate(out.test_predictions, out.target.test_actuals());
        return out;
    });
}

metrics::MetricsReport run_transfer(const std::filesystem::path& model_path,
                                    const std::string& target_symbol,
                                    const ExperimentConfig& config) {
    const models::TrainedModel model = models::load_model(model_path);
    TransferResult result = transfer(model, target_symbol, config);
    if (!config.output_dir.empty() && config.emit_plots) {
        ensure_dir(config.output_dir);
        const std::string name(models::architecture_name(model.spec().architecture));
        emit_plot(result.target.dates, result.target.prices, result.test_predictions,
                  result.target.split,
                  config.output_dir / (data::symbol_file_stem(target_symbol) + "_transfer_" + name),
                  target_symbol + " - " + algorithm_label(name) + " (transferred)");
    }
    return result.metrics;
}

void emit_plot(std::span<const Date> dates, std::span<const double> actuals,
               std::span<const double> predictions, std::size_t split,
               const std::filesystem::path& path_stem, const std::string& title) {
    const std::size_t n = actuals.size();
    if (dates.size() != n || split > n || predictions.size() != n - split) {
        throw Error(ErrorCode::kAlignmentError,
                    std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(n - std::min(split, n)) + " test points");
    }
    if (n == 0) {
        throw Error(ErrorCode::kAlignmentError, "empty series");
    }

    std::string csv = "date,actual,prediction,partition\n";
    for (std::size_t i = 0; i < n; ++i) {
        csv += format_iso_date(dates[i]) + "," + format_double(actuals[i]) + ",";
        if (i >= split) {
            csv += format_double(predictions[i - split]);
        }
        csv += i < split ? ",train\n" : ",test\n";
    }

    constexpr double kWidth = 960.0;
    constexpr double kHeight = 480.0;
    constexpr double kMargin = 50.0;
    double lo = *std::min_element(actuals.begin(), actuals.end());
    double hi = *std::max_element(actuals.begin(), actuals.end());
    for (double p : predictions) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    auto x_of = [&](std::size_t i) {
        return kMargin + (kWidth - 2 * kMargin) * (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
    };
    auto y_of = [&](double v) { return kHeight - kMargin - (kHeight - 2 * kMargin) * (v - lo) / (hi - lo); };
    auto series_points = [&](std::size_t from, std::size_t to, auto value) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t i = from; i < to; ++i) {
            xs.push_back(x_of(i));
            ys.push_back(y_of(value(i)));
        }
        return point_list(xs, ys);
    };
    const auto actual_at = [&](std::size_t i) { return actuals[i]; };
    const auto predicted_at = [&](std::size_t i) { return predictions[i - split]; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "  <text x=\"" << kMargin << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(title) << "</text>\n"
        << "  <polyline class=\"train\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\""
        << series_points(0, split, actual_at) << "\"/>\n"
        << "  <polyline class=\"test\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1\" points=\""
        << series_points(split, n, actual_at) << "\"/>\n"
        << "  <polyline class=\"prediction\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\" "
           "stroke-dasharray=\"4 2\" points=\""
        << series_points(split, n, predicted_at) << "\"/>\n";
    const double sx = x_of(std::min(split, n - 1));
    svg << "  <line class=\"split\" x1=\"" << sx << "\" y1=\"" << kMargin << "\" x2=\"" << sx
        << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"gray\" stroke-dasharray=\"2 2\"/>\n";
    const char* legend[][2] = {{"#1f77b4", "train"}, {"#2ca02c", "test"}, {"#d62728", "predicted"}};
    for (int i = 0; i < 3; ++i) {
        const double ly = kMargin + 18.0 * i;
        svg << "  <text x=\"" << kWidth - kMargin - 80 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << legend[i][0] << "\">"
            << legend[i][1] << "</text>\n";
    }
    svg << "</svg>\n";

    const auto parent = path_stem.parent_path();
    if (!parent.empty()) {
        ensure_dir(parent);
    }
    auto with_ext = [&](const char* ext) {
        auto p = path_stem;
        p += ext;
        return p;
    };
    write_text(with_ext(".svg"), svg.str());
    write_text(with_ext(".csv"), csv);
}

}  // namespace tickerlab::experiments
