#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wfbt {

/// One OHLCV observation. Timestamps are UTC epoch seconds.
struct Candle {
    std::int64_t timestamp = 0;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    friend bool operator==(const Candle&, const Candle&) = default;
};

inline constexpr std::int64_t kDailyInterval = 86400;

/// Ascending, duplicate-free candles at a nominal fixed interval.
/// Holes are allowed here and reported by validate_series().
struct CandleSeries {
    std::vector<Candle> candles;
    std::int64_t interval = kDailyInterval;

    std::size_t size() const noexcept { return candles.size(); }
    bool empty() const noexcept { return candles.empty(); }
    const Candle& operator[](std::size_t i) const { return candles[i]; }

    friend bool operator==(const CandleSeries&, const CandleSeries&) = default;
};

struct GapRecord {
    std::size_t index = 0;  // index of the later candle
    std::int64_t previous_timestamp = 0;
    std::int64_t timestamp = 0;
};

struct ValidationReport {
    std::vector<GapRecord> gaps;

    bool clean() const noexcept { return gaps.empty(); }
};

struct FetchConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8080"
    /// Placeholders: {symbol} {interval} {start} {end} {limit}
    std::string path_template = "/candles?symbol={symbol}&interval={interval}&start={start}&end={end}&limit={limit}";
    int page_limit = 500;
    int max_retries = 3;
    std::chrono::milliseconds retry_backoff{250};
    std::chrono::seconds timeout{30};
};

/// Parses `timestamp,open,high,low,close,volume` CSV text (LF or CRLF).
/// Rows may arrive in any order; the result is sorted ascending.
CandleSeries parse_candles_csv(std::string_view text, std::int64_t interval = kDailyInterval);

/// Writes the same schema using shortest round-trip decimal text.
std::string serialize_candles_csv(const CandleSeries& series);

CandleSeries read_candles_csv(const std::string& path, std::int64_t interval = kDailyInterval);

ValidationReport validate_series(const CandleSeries& series);

/// Throws GapInSeries naming the first hole when the report is not clean.
void require_gap_free(const CandleSeries& series);

/// Checks per-candle invariants; `where` is prefixed to error messages.
void check_candle(const Candle& candle, const std::string& where);

/// Paged HTTP GET of [start, end). Each response body is a JSON array of
/// [timestamp, open, high, low, close, volume] arrays.
CandleSeries fetch_candles(const FetchConfig& config, const std::string& symbol, std::int64_t interval,
                           std::int64_t start, std::int64_t end);

/// Expands the {placeholders} in a path template.
std::string expand_path_template(std::string_view templ, const std::string& symbol, std::int64_t interval,
                                 std::int64_t start, std::int64_t end, int limit);

}  // namespace wfbt
