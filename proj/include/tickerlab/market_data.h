#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tickerlab/date.h"

namespace tickerlab::data {

struct PriceBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    std::int64_t volume = 0;

    bool operator==(const PriceBar&) const = default;
};

// Which bar field is treated as "the price" downstream.
enum class PriceField { kClose, kAdjClose };

// Ordered daily bars for one symbol. Construction validates every bar and
// the strict date ordering; instances are immutable afterwards.
class PriceSeries {
public:
    PriceSeries(std::string symbol, std::vector<PriceBar> bars);

    const std::string& symbol() const noexcept { return symbol_; }
    const std::vector<PriceBar>& bars() const noexcept { return bars_; }
    std::size_t size() const noexcept { return bars_.size(); }
    const PriceBar& operator[](std::size_t i) const { return bars_[i]; }

    bool operator==(const PriceSeries&) const = default;

private:
    std::string symbol_;
    std::vector<PriceBar> bars_;
};

// Uppercase letters, digits and `^ . - =`, 1-10 characters.
bool is_valid_symbol(std::string_view symbol);

// Strips a leading '^' so index symbols map onto plain file names.
std::string symbol_file_stem(std::string_view symbol);

// Yahoo daily-history export: Date, Open, High, Low, Close, Adj Close, Volume
// (header names case-insensitive, any column order, extra columns ignored).
PriceSeries parse_csv(std::string_view text, std::string symbol);
std::string serialize_csv(const PriceSeries& series);

PriceSeries load_csv_file(const std::filesystem::path& path, std::string symbol);
void save_csv_file(const PriceSeries& series, const std::filesystem::path& path);

// Parses a v8 chart payload and keeps bars with start <= date < end.
PriceSeries parse_chart_payload(std::string_view json_text, const std::string& symbol, Date start,
                                Date end);

// GET {endpoint}/v8/finance/chart/{symbol}?period1=..&period2=..&interval=1d
//
// `endpoint` is an http(s) base URL or `file://<dir>`, which replays recorded
// payloads from `<dir>/<stem>.json`.
PriceSeries fetch_daily(const std::string& symbol, Date start, Date end,
                        const std::string& endpoint);

std::vector<double> closing_prices(const PriceSeries& series,
                                   PriceField field = PriceField::kClose);

std::vector<Date> trading_dates(const PriceSeries& series);

// Bars with start <= date < end.
PriceSeries slice_range(const PriceSeries& series, Date start, Date end);

}  // namespace tickerlab::data
