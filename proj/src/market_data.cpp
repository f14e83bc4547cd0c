#include "tickerlab/market_data.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "tickerlab/error.h"
#include "tickerlab/util.h"

namespace tickerlab::data {

namespace {

constexpr std::array<std::string_view, 7> kColumns = {"date",  "open",      "high",  "low",
                                                      "close", "adj close", "volume"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const auto comma = line.find(',', begin);
        out.push_back(trim(line.substr(begin, comma - begin)));
        if (comma == std::string_view::npos) {
            break;
        }
        begin = comma + 1;
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

// Row-level checks shared by CSV and chart ingestion. Returns the failing
// code, or nullopt when the bar is valid.
std::optional<std::pair<ErrorCode, std::string>> check_bar(const PriceBar& bar) {
    for (double p : {bar.open, bar.high, bar.low, bar.close, bar.adj_close}) {
        if (!std::isfinite(p)) {
            return std::pair{ErrorCode::kMalformedRow, std::string("non-finite price")};
        }
        if (p <= 0.0) {
            return std::pair{ErrorCode::kNonPositivePrice,
                             "price " + format_double(p) + " on " + format_iso_date(bar.date)};
        }
    }
    if (bar.volume < 0) {
        return std::pair{ErrorCode::kMalformedRow, std::string("negative volume")};
    }
    if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close)) {
        return std::pair{ErrorCode::kMalformedRow,
                         "high/low do not bracket open/close on " + format_iso_date(bar.date)};
    }
    return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string url_encode(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

double json_price(const nlohmann::json& v) {
    return v.is_number() ? v.get<double>() : std::nan("");
}

std::string fetch_http(const std::string& endpoint, const std::string& symbol, Date start,
                       Date end) {
    // Split "scheme://host[:port]/base" into client origin and path prefix.
    const auto scheme_end = endpoint.find("://");
    const auto path_begin = endpoint.find('/', scheme_end + 3);
    const std::string origin =
        path_begin == std::string::npos ? endpoint : endpoint.substr(0, path_begin);
    std::string base = path_begin == std::string::npos ? "" : endpoint.substr(path_begin);
    while (!base.empty() && base.back() == '/') {
        base.pop_back();
    }
    const std::string path = base + "/v8/finance/chart/" + url_encode(symbol) +
                             "?period1=" + std::to_string(to_unix_seconds(start)) +
                             "&period2=" + std::to_string(to_unix_seconds(end)) + "&interval=1d";

    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    client.set_follow_location(true);
    client.set_default_headers({{"User-Agent", "tickerlab/1.0"}});
    auto res = client.Get(path);
    if (!res) {
        throw Error(ErrorCode::kNetworkUnavailable,
                    origin + ": " + httplib::to_string(res.error()));
    }
    if (res->status == 404) {
        throw Error(ErrorCode::kSymbolNotFound, symbol);
    }
    if (res->status != 200) {
        // Yahoo reports unknown symbols with a structured error body on
        // other status codes too; let the payload parser classify it.
        if (res->body.find("\"error\"") != std::string::npos) {
            return res->body;
        }
        throw Error(ErrorCode::kMalformedResponse, "HTTP status " + std::to_string(res->status));
    }
    return res->body;
}

}  // namespace

bool is_valid_symbol(std::string_view symbol) {
    if (symbol.empty() || symbol.size() > 10) {
        return false;
    }
    return std::all_of(symbol.begin(), symbol.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '^' || c == '.' ||
               c == '-' || c == '=';
    });
}

std::string symbol_file_stem(std::string_view symbol) {
    while (!symbol.empty() && symbol.front() == '^') {
        symbol.remove_prefix(1);
    }
    return std::string(symbol);
}

PriceSeries::PriceSeries(std::string symbol, std::vector<PriceBar> bars)
    : symbol_(std::move(symbol)), bars_(std::move(bars)) {
    if (!is_valid_symbol(symbol_)) {
        throw Error(ErrorCode::kInvalidConfig, "invalid symbol '" + symbol_ + "'");
    }
    if (bars_.empty()) {
        throw Error(ErrorCode::kEmptyRange, "no bars for " + symbol_);
    }
    for (std::size_t i = 0; i < bars_.size(); ++i) {
        if (auto bad = check_bar(bars_[i])) {
            throw Error(bad->first, bad->second);
        }
        if (i > 0 && bars_[i].date <= bars_[i - 1].date) {
            throw Error(ErrorCode::kNonMonotonicDates, format_iso_date(bars_[i].date));
        }
    }
}

PriceSeries parse_csv(std::string_view text, std::string symbol) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }
    std::vector<PriceBar> bars;
    std::array<std::size_t, kColumns.size()> column{};
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (trim(line).empty()) {
            if (nl == text.size()) {
                break;
            }
            continue;
        }
        const auto fields = split_fields(line);
        if (!have_header) {
            std::map<std::string, std::size_t> index;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                index.emplace(lower(fields[i]), i);
            }
            for (std::size_t c = 0; c < kColumns.size(); ++c) {
                auto it = index.find(std::string(kColumns[c]));
                if (it == index.end()) {
                    throw Error(ErrorCode::kMissingColumn, std::string(kColumns[c]), line_no);
                }
                column[c] = it->second;
            }
            have_header = true;
            continue;
        }
        const std::size_t needed = *std::max_element(column.begin(), column.end()) + 1;
        if (fields.size() < needed) {
            throw Error(ErrorCode::kMalformedRow, "expected " + std::to_string(needed) + " fields",
                        line_no);
        }
        PriceBar bar;
        const auto date = parse_iso_date(fields[column[0]]);
        const auto open = parse_number<double>(fields[column[1]]);
        const auto high = parse_number<double>(fields[column[2]]);
        const auto low = parse_number<double>(fields[column[3]]);
        const auto close = parse_number<double>(fields[column[4]]);
        const auto adj = parse_number<double>(fields[column[5]]);
        const auto volume = parse_number<std::int64_t>(fields[column[6]]);
        if (!date || !open || !high || !low || !close || !adj || !volume) {
            throw Error(ErrorCode::kMalformedRow, std::string(line), line_no);
        }
        bar = {*date, *open, *high, *low, *close, *adj, *volume};
        if (auto bad = check_bar(bar)) {
            throw Error(bad->first, bad->second, line_no);
        }
        if (!bars.empty() && bar.date <= bars.back().date) {
            throw Error(ErrorCode::kNonMonotonicDates, format_iso_date(bar.date), line_no);
        }
        bars.push_back(bar);
        if (nl == text.size()) {
            break;
        }
    }
    if (!have_header) {
        throw Error(ErrorCode::kMissingColumn, "no header row");
    }
    return PriceSeries(std::move(symbol), std::move(bars));
}

std::string serialize_csv(const PriceSeries& series) {
    std::string out = "Date,Open,High,Low,Close,Adj Close,Volume\n";
    for (const auto& b : series.bars()) {
        out += format_iso_date(b.date);
        for (double v : {b.open, b.high, b.low, b.close, b.adj_close}) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += std::to_string(b.volume);
        out += '\n';
    }
    return out;
}

PriceSeries load_csv_file(const std::filesystem::path& path, std::string symbol) {
    return parse_csv(read_file(path), std::move(symbol));
}

void save_csv_file(const PriceSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    out << serialize_csv(series);
    if (!out) {
        throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
    }
}

PriceSeries parse_chart_payload(std::string_view json_text, const std::string& symbol, Date start,
                                Date end) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedResponse, e.what());
    }
    try {
        const auto& chart = doc.at("chart");
        if (chart.contains("error") && !chart["error"].is_null()) {
            const auto& err = chart["error"];
            const std::string code = err.value("code", "");
            if (code == "Not Found" || chart.value("result", nlohmann::json()).is_null()) {
                throw Error(ErrorCode::kSymbolNotFound,
                            symbol + ": " + err.value("description", code));
            }
            throw Error(ErrorCode::kMalformedResponse, err.dump());
        }
        const auto& result = chart.at("result").at(0);
        if (!result.contains("timestamp")) {
            // Yahoo omits the arrays entirely when the range holds no sessions.
            throw Error(ErrorCode::kEmptyRange, symbol);
        }
        const auto& stamps = result.at("timestamp");
        const auto& quote = result.at("indicators").at("quote").at(0);
        const auto& opens = quote.at("open");
        const auto& highs = quote.at("high");
        const auto& lows = quote.at("low");
        const auto& closes = quote.at("close");
        const auto& volumes = quote.at("volume");
        const nlohmann::json* adj = nullptr;
        if (result.at("indicators").contains("adjclose")) {
            adj = &result["indicators"]["adjclose"].at(0).at("adjclose");
        }
        const std::size_t n = stamps.size();
        for (const auto* arr : {&opens, &highs, &lows, &closes, &volumes}) {
            if (arr->size() != n) {
                throw Error(ErrorCode::kMalformedResponse, "quote arrays differ in length");
            }
        }
        if (adj && adj->size() != n) {
            throw Error(ErrorCode::kMalformedResponse, "adjclose length differs");
        }
        const std::int64_t offset = result.value("meta", nlohmann::json::object())
                                        .value("gmtoffset", std::int64_t{0});
        std::vector<PriceBar> bars;
        for (std::size_t i = 0; i < n; ++i) {
            const bool all_null = opens[i].is_null() && highs[i].is_null() &&
                                  lows[i].is_null() && closes[i].is_null();
            if (all_null) {
                continue;
            }
            PriceBar bar;
            bar.date = from_unix_seconds(stamps[i].get<std::int64_t>(), offset);
            if (bar.date < start || bar.date >= end) {
                continue;
            }
            bar.open = json_price(opens[i]);
            bar.high = json_price(highs[i]);
            bar.low = json_price(lows[i]);
            bar.close = json_price(closes[i]);
            bar.adj_close = adj ? json_price((*adj)[i]) : bar.close;
            bar.volume = volumes[i].is_number() ? volumes[i].get<std::int64_t>() : 0;
            if (auto bad = check_bar(bar)) {
                throw Error(bad->first == ErrorCode::kNonPositivePrice ? bad->first
                                                                       : ErrorCode::kMalformedResponse,
                            bad->second);
            }
            if (!bars.empty() && bar.date <= bars.back().date) {
                throw Error(ErrorCode::kMalformedResponse,
                            "non-increasing timestamp at " + format_iso_date(bar.date));
            }
            bars.push_back(bar);
        }
        if (bars.empty()) {
            throw Error(ErrorCode::kEmptyRange, symbol + " has no sessions in range");
        }
        return PriceSeries(symbol, std::move(bars));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedResponse, e.what());
    }
}

PriceSeries fetch_daily(const std::string& symbol, Date start, Date end,
                        const std::string& endpoint) {
    if (!(start < end)) {
        throw Error(ErrorCode::kEmptyRange,
                    format_iso_date(start) + " is not before " + format_iso_date(end));
    }
    if (!is_valid_symbol(symbol)) {
        throw Error(ErrorCode::kSymbolNotFound, "invalid ticker '" + symbol + "'");
    }
    std::string body;
    if (endpoint.rfind("file://", 0) == 0) {
        const std::filesystem::path file =
            std::filesystem::path(endpoint.substr(7)) / (symbol_file_stem(symbol) + ".json");
        if (!std::filesystem::exists(file)) {
            throw Error(ErrorCode::kSymbolNotFound, symbol + " not in " + endpoint);
        }
        body = read_file(file);
    } else if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0) {
        body = fetch_http(endpoint, symbol, start, end);
    } else {
        throw Error(ErrorCode::kInvalidConfig, "unsupported endpoint '" + endpoint + "'");
    }
    return parse_chart_payload(body, symbol, start, end);
}

std::vector<double> closing_prices(const PriceSeries& series, PriceField field) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& b : series.bars()) {
        out.push_back(field == PriceField::kClose ? b.close : b.adj_close);
    }
    return out;
}

std::vector<Date> trading_dates(const PriceSeries& series) {
    std::vector<Date> out;
    out.reserve(series.size());
    for (const auto& b : series.bars()) {
        out.push_back(b.date);
    }
    return out;
}

PriceSeries slice_range(const PriceSeries& series, Date start, Date end) {
    if (!(start < end)) {
        throw Error(ErrorCode::kEmptyRange,
                    format_iso_date(start) + " is not before " + format_iso_date(end));
    }
    const auto& bars = series.bars();
    auto first = std::lower_bound(bars.begin(), bars.end(), start,
                                  [](const PriceBar& b, Date d) { return b.date < d; });
    auto last = std::lower_bound(first, bars.end(), end,
                                 [](const PriceBar& b, Date d) { return b.date < d; });
    if (first == last) {
        throw Error(ErrorCode::kEmptyRange, series.symbol() + " has no bars in [" +
                                                format_iso_date(start) + ", " +
                                                format_iso_date(end) + ")");
    }
    return PriceSeries(series.symbol(), std::vector<PriceBar>(first, last));
}

}  // namespace tickerlab::data
