#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tickerlab/date.h"
#include "tickerlab/kalman.h"
#include "tickerlab/market_data.h"
#include "tickerlab/metrics.h"
#include "tickerlab/models.h"
#include "tickerlab/preprocess.h"

namespace tickerlab::experiments {

// Where price history comes from. A non-empty csv_dir wins and is read as
// <csv_dir>/<stem>.csv; otherwise fetch_daily() runs against `endpoint`.
struct DataSource {
    std::filesystem::path csv_dir;
    std::string endpoint;
};

struct KalmanOptions {
    bool enabled = true;
    std::optional<double> measurement_variance;  // overrides the scaled default
    double measurement_scale = 1e-4;             // R = scale * mean(train prices)^2
    double process_scale = 1.0;
    std::size_t variance_window = 3;
    double initial_variance = 0.0;
};

struct ExperimentConfig {
    std::vector<std::string> symbols;
    Date start = Date{std::chrono::year{2011} / 1 / 1};
    Date end = Date{std::chrono::year{2021} / 1 / 1};
    prep::SplitSpec split;
    std::vector<models::ModelSpec> models;
    models::TrainConfig train;
    KalmanOptions kalman;
    data::PriceField price_field = data::PriceField::kClose;
    DataSource source;
    // Empty: no files are written.
    std::filesystem::path output_dir;
    bool emit_plots = true;
    bool save_models = true;

    void validate() const;
};

// One symbol's history, split and scaled with the training partition's range.
struct PreparedSeries {
    std::string symbol;
    std::vector<Date> dates;
    std::vector<double> prices;
    std::size_t split = 0;  // first test index
    prep::ScalingParams scaler;
    std::vector<double> scaled;

    std::span<const double> test_actuals() const {
        return std::span<const double>(prices).subspan(split);
    }
};

PreparedSeries prepare_series(const std::string& symbol, const ExperimentConfig& config);

struct ReportRow {
    std::string symbol;
    std::string algorithm;  // "kalman" or an architecture name
    metrics::MetricsReport metrics;
    std::string fingerprint;
};

struct ComparisonReport {
    std::vector<ReportRow> rows;

    const ReportRow* find(const std::string& symbol, const std::string& algorithm) const;

    // symbol,algorithm,rmse,mae,r_squared,n,fingerprint with shortest
    // round-trip decimals.
    std::string to_csv() const;
    std::string to_json() const;
    std::string to_table() const;
};

std::string algorithm_label(const std::string& algorithm);

// Kalman run on raw prices; fingerprint covers config and data.
struct KalmanRun {
    kalman::KalmanConfig config;
    std::vector<double> test_predictions;
    std::string fingerprint;
};
KalmanRun run_kalman(const PreparedSeries& series, const KalmanOptions& options);

struct LstmRun {
    models::TrainedModel model;
    std::vector<double> test_predictions;
};
LstmRun run_lstm(const PreparedSeries& series, const models::ModelSpec& spec,
                 const models::TrainConfig& train);

// Per symbol: load, split, scale, window; train every model; filter with
// Kalman; score the test partition. Rows are grouped by symbol in config
// order and sorted by RMSE within each symbol. With an output directory,
// writes report.csv, report.json, models/ and plots/.
ComparisonReport run_comparison(const ExperimentConfig& config);

struct TransferResult {
    metrics::MetricsReport metrics;
    std::vector<double> test_predictions;
    PreparedSeries target;
};

// Applies a saved model to another symbol. Only the scaler is refitted (on
// the target's training partition); weights are used as stored.
TransferResult transfer(const models::TrainedModel& model, const std::string& target_symbol,
                        const ExperimentConfig& config);
metrics::MetricsReport run_transfer(const std::filesystem::path& model_path,
                                    const std::string& target_symbol,
                                    const ExperimentConfig& config);

// Writes <path_stem>.svg (train actuals, test actuals and predictions as
// three polylines plus a split marker) and <path_stem>.csv with columns
// date,actual,prediction,partition. predictions cover [split, n).
void emit_plot(std::span<const Date> dates, std::span<const double> actuals,
               std::span<const double> predictions, std::size_t split,
               const std::filesystem::path& path_stem, const std::string& title = "");

}  // namespace tickerlab::experiments
