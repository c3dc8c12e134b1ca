#include "wfbt/ingest.hpp"

#include "wfbt/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace wfbt {

namespace {

constexpr std::string_view kHeader = "timestamp,open,high,low,close,volume";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, std::int64_t& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

bool parse_real(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty() && std::isfinite(out);
}

void append_real(std::string& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

struct Row {
    Candle candle;
    std::size_t line = 0;
};

}  // namespace

void check_candle(const Candle& c, const std::string& where) {
    if (!(c.open > 0.0) || !(c.high > 0.0) || !(c.low > 0.0) || !(c.close > 0.0)) {
        throw Error(ErrorCode::NonPositivePrice, where + ": prices must be strictly positive");
    }
    if (!(c.volume >= 0.0)) {
        throw Error(ErrorCode::MalformedRow, where + ": volume must be non-negative");
    }
    if (c.high < c.low) {
        throw Error(ErrorCode::OhlcViolation, where + ": high < low");
    }
    if (c.low > std::min(c.open, c.close) || c.high < std::max(c.open, c.close)) {
        throw Error(ErrorCode::OhlcViolation, where + ": open/close outside [low, high]");
    }
}

CandleSeries parse_candles_csv(std::string_view text, std::int64_t interval) {
    if (interval <= 0) {
        throw Error(ErrorCode::InvalidArgument, "interval must be positive");
    }
    std::vector<Row> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const auto line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (!header_seen) {
            // tolerate a UTF-8 byte order mark
            auto header = line;
            if (header.starts_with("\xEF\xBB\xBF")) {
                header.remove_prefix(3);
            }
            if (header != kHeader) {
                throw Error(ErrorCode::MalformedRow,
                            "line 1: expected header '" + std::string(kHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        const std::string where = "line " + std::to_string(line_no);
        if (fields.size() != 6) {
            throw Error(ErrorCode::MalformedRow, where + ": expected 6 fields");
        }
        Row row;
        row.line = line_no;
        auto& c = row.candle;
        if (!parse_int(fields[0], c.timestamp) || !parse_real(fields[1], c.open) ||
            !parse_real(fields[2], c.high) || !parse_real(fields[3], c.low) ||
            !parse_real(fields[4], c.close) || !parse_real(fields[5], c.volume)) {
            throw Error(ErrorCode::MalformedRow, where + ": unparsable field");
        }
        check_candle(c, where);
        rows.push_back(row);
    }
    if (!header_seen) {
        throw Error(ErrorCode::MalformedRow, "line 1: empty document");
    }
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyRange, "no candle rows");
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.candle.timestamp < b.candle.timestamp; });
    CandleSeries series;
    series.interval = interval;
    series.candles.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].candle.timestamp == rows[i - 1].candle.timestamp) {
            throw Error(ErrorCode::DuplicateTimestamp,
                        "timestamp " + std::to_string(rows[i].candle.timestamp) + " on lines " +
                            std::to_string(rows[i - 1].line) + " and " + std::to_string(rows[i].line));
        }
        series.candles.push_back(rows[i].candle);
    }
    return series;
}

std::string serialize_candles_csv(const CandleSeries& series) {
    std::string out(kHeader);
    out.push_back('\n');
    for (const auto& c : series.candles) {
        out += std::to_string(c.timestamp);
        for (double v : {c.open, c.high, c.low, c.close, c.volume}) {
            out.push_back(',');
            append_real(out, v);
        }
        out.push_back('\n');
    }
    return out;
}

CandleSeries read_candles_csv(const std::string& path, std::int64_t interval) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_candles_csv(buf.str(), interval);
}

ValidationReport validate_series(const CandleSeries& series) {
    ValidationReport report;
    for (std::size_t i = 1; i < series.candles.size(); ++i) {
        const auto prev = series.candles[i - 1].timestamp;
        const auto cur = series.candles[i].timestamp;
        if (cur - prev != series.interval) {
            report.gaps.push_back({i, prev, cur});
        }
    }
    return report;
}

void require_gap_free(const CandleSeries& series) {
    if (series.empty()) {
        throw Error(ErrorCode::EmptyRange, "empty candle series");
    }
    const auto report = validate_series(series);
    if (!report.clean()) {
        const auto& g = report.gaps.front();
        throw Error(ErrorCode::GapInSeries, std::to_string(report.gaps.size()) + " gap(s); first between " +
                                                std::to_string(g.previous_timestamp) + " and " +
                                                std::to_string(g.timestamp));
    }
}

std::string expand_path_template(std::string_view templ, const std::string& symbol, std::int64_t interval,
                                 std::int64_t start, std::int64_t end, int limit) {
    const std::map<std::string_view, std::string> values{
        {"symbol", symbol},
        {"interval", std::to_string(interval)},
        {"start", std::to_string(start)},
        {"end", std::to_string(end)},
        {"limit", std::to_string(limit)},
    };
    std::string out;
    std::size_t pos = 0;
    while (pos < templ.size()) {
        const auto open = templ.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(templ.substr(pos));
            break;
        }
        const auto close = templ.find('}', open);
        if (close == std::string_view::npos) {
            throw Error(ErrorCode::InvalidConfig, "unterminated placeholder in path template");
        }
        out.append(templ.substr(pos, open - pos));
        const auto key = templ.substr(open + 1, close - open - 1);
        const auto it = values.find(key);
        if (it == values.end()) {
            throw Error(ErrorCode::InvalidConfig, "unknown placeholder {" + std::string(key) + "}");
        }
        out += it->second;
        pos = close + 1;
    }
    return out;
}

namespace {

struct SplitUrl {
    std::string scheme_host_port;
    std::string prefix;
};

SplitUrl split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "base_url needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, {}};
    }
    auto prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {url.substr(0, path_start), prefix};
}

double json_number(const nlohmann::json& v, const std::string& where) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string()) {
        double out = 0.0;
        if (parse_real(v.get_ref<const std::string&>(), out)) {
            return out;
        }
    }
    throw Error(ErrorCode::MalformedPayload, where + ": expected a number");
}

std::vector<Candle> parse_page(const std::string& body, const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedPayload, path + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw Error(ErrorCode::MalformedPayload, path + ": expected a JSON array");
    }
    std::vector<Candle> page;
    page.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& row = doc[i];
        const std::string where = path + " element " + std::to_string(i);
        if (!row.is_array() || row.size() != 6) {
            throw Error(ErrorCode::MalformedPayload, where + ": expected a 6-element array");
        }
        Candle c;
        const double ts = json_number(row[0], where);
        if (ts != std::floor(ts) || std::abs(ts) > 9.0e15) {
            throw Error(ErrorCode::MalformedPayload, where + ": timestamp is not an integer");
        }
        c.timestamp = static_cast<std::int64_t>(ts);
        c.open = json_number(row[1], where);
        c.high = json_number(row[2], where);
        c.low = json_number(row[3], where);
        c.close = json_number(row[4], where);
        c.volume = json_number(row[5], where);
        check_candle(c, where);
        page.push_back(c);
    }
    return page;
}

}  // namespace

CandleSeries fetch_candles(const FetchConfig& config, const std::string& symbol, std::int64_t interval,
                           std::int64_t start, std::int64_t end) {
    if (config.page_limit < 1 || config.max_retries < 0 || interval <= 0) {
        throw Error(ErrorCode::InvalidConfig, "page_limit >= 1, max_retries >= 0 and interval > 0 required");
    }
    if (start >= end) {
        throw Error(ErrorCode::EmptyRange, "start must precede end");
    }
    const auto url = split_base_url(config.base_url);
    httplib::Client client(url.scheme_host_port);
    if (!client.is_valid()) {
        throw Error(ErrorCode::InvalidConfig, "unsupported base_url: " + config.base_url);
    }
    client.set_connection_timeout(config.timeout);
    client.set_read_timeout(config.timeout);

    auto get_body = [&](const std::string& path) {
        std::string last_failure;
        for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(config.retry_backoff);
            }
            auto res = client.Get(path);
            if (!res) {
                last_failure = httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                return res->body;
            }
            last_failure = "HTTP " + std::to_string(res->status);
            if (res->status != 429 && res->status < 500) {
                break;  // not transient
            }
        }
        throw Error(ErrorCode::NetworkError, "GET " + path + " failed: " + last_failure);
    };

    std::map<std::int64_t, Candle> by_time;
    std::int64_t cursor = start;
    while (cursor < end) {
        const auto path = url.prefix + expand_path_template(config.path_template, symbol, interval, cursor, end,
                                                            config.page_limit);
        const auto page = parse_page(get_body(path), path);
        if (page.empty()) {
            break;
        }
        std::int64_t last = cursor - 1;
        for (const auto& c : page) {
            if (c.timestamp >= start && c.timestamp < end) {
                by_time.try_emplace(c.timestamp, c);
            }
            last = std::max(last, c.timestamp);
        }
        if (last < cursor || static_cast<int>(page.size()) < config.page_limit) {
            break;
        }
        cursor = last + interval;
    }
    if (by_time.empty()) {
        throw Error(ErrorCode::EmptyRange, "no candles for " + symbol + " in [" + std::to_string(start) + ", " +
                                               std::to_string(end) + ")");
    }
    CandleSeries series;
    series.interval = interval;
    series.candles.reserve(by_time.size());
    for (const auto& [ts, c] : by_time) {
        series.candles.push_back(c);
    }
    return series;
}

}  // namespace wfbt
