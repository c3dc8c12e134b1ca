#include "wfbt/app.hpp"

#include "wfbt/error.hpp"
#include "wfbt/parallel.hpp"
#include "wfbt/rng.hpp"
#include "json_io.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wfbt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kUnboundedLow = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kUnboundedHigh = std::numeric_limits<std::int64_t>::max();

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2 ? 1 : 0;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t parse_instant(const json& v, std::int64_t unbounded, const std::string& field) {
    if (v.is_null()) {
        return unbounded;
    }
    if (v.is_number_integer()) {
        return v.get<std::int64_t>();
    }
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        int y = 0;
        unsigned m = 0;
        unsigned d = 0;
        char tail = 0;
        if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) == 3 && m >= 1 && m <= 12 && d >= 1 &&
            d <= 31) {
            return days_from_civil(y, m, d) * 86400;
        }
    }
    throw Error(ErrorCode::InvalidConfig, field + ": expected epoch seconds, \"YYYY-MM-DD\" or null");
}

json instant_json(std::int64_t v) {
    if (v == kUnboundedLow || v == kUnboundedHigh) {
        return nullptr;
    }
    return v;
}

TimeRange parse_range(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2) {
        throw Error(ErrorCode::InvalidConfig, field + ": expected [begin, end]");
    }
    return {parse_instant(v[0], kUnboundedLow, field), parse_instant(v[1], kUnboundedHigh, field)};
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return fallback;
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidConfig, std::string("field '") + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
    const auto v = get_or<std::int64_t>(obj, key, static_cast<std::int64_t>(fallback));
    if (v < 0) {
        throw Error(ErrorCode::InvalidConfig, std::string("field '") + key + "' must be non-negative");
    }
    return static_cast<std::size_t>(v);
}

IndicatorConfig parse_indicators(const json& j) {
    IndicatorConfig c;
    if (j.is_null()) {
        return c;
    }
    c.mfi_period = get_or(j, "mfi_period", c.mfi_period);
    c.bb_period = get_or(j, "bb_period", c.bb_period);
    c.bb_k = get_or(j, "bb_k", c.bb_k);
    c.kc_ema_period = get_or(j, "kc_ema_period", c.kc_ema_period);
    c.kc_atr_period = get_or(j, "kc_atr_period", c.kc_atr_period);
    c.kc_mult = get_or(j, "kc_mult", c.kc_mult);
    c.sar_af_start = get_or(j, "sar_af_start", c.sar_af_start);
    c.sar_af_step = get_or(j, "sar_af_step", c.sar_af_step);
    c.sar_af_max = get_or(j, "sar_af_max", c.sar_af_max);
    return c;
}

json indicators_json(const IndicatorConfig& c) {
    return {{"mfi_period", c.mfi_period},       {"bb_period", c.bb_period},       {"bb_k", c.bb_k},
            {"kc_ema_period", c.kc_ema_period}, {"kc_atr_period", c.kc_atr_period}, {"kc_mult", c.kc_mult},
            {"sar_af_start", c.sar_af_start},   {"sar_af_step", c.sar_af_step},   {"sar_af_max", c.sar_af_max}};
}

const std::set<std::string>& known_top_level_keys() {
    static const std::set<std::string> keys{
        "data",      "interval",   "indicators",     "split",         "models",           "windows",
        "mode",      "retrain_stride", "fee_bps",    "threshold",     "risk_free_rate",   "periods_per_year",
        "params",    "tuner",      "seed",           "threads",       "out",              "run_id"};
    return keys;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing " + path.string());
    }
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

json config_json(const RunConfig& c, bool include_runtime) {
    json j;
    json data = json::object();
    if (!c.data.csv_path.empty()) {
        data["csv"] = c.data.csv_path;
    }
    if (c.data.fetch) {
        const auto& f = *c.data.fetch;
        data["fetch"] = {{"base_url", f.http.base_url},
                         {"path_template", f.http.path_template},
                         {"page_limit", f.http.page_limit},
                         {"max_retries", f.http.max_retries},
                         {"retry_backoff_ms", f.http.retry_backoff.count()},
                         {"timeout_s", f.http.timeout.count()},
                         {"symbol", f.symbol},
                         {"start", f.start},
                         {"end", f.end}};
    }
    j["data"] = data;
    j["interval"] = c.interval;
    j["indicators"] = indicators_json(c.indicators);
    j["split"] = {{"train", {instant_json(c.split.train.begin), instant_json(c.split.train.end)}},
                  {"backtest", {instant_json(c.split.backtest.begin), instant_json(c.split.backtest.end)}},
                  {"forward", {instant_json(c.split.forward.begin), instant_json(c.split.forward.end)}}};
    json models = json::array();
    for (auto k : c.models) {
        models.push_back(kind_name(k));
    }
    j["models"] = models;
    j["windows"] = c.windows;
    j["mode"] = mode_name(c.mode);
    j["retrain_stride"] = c.retrain_stride;
    j["fee_bps"] = c.cost.fee_bps;
    j["threshold"] = c.threshold;
    j["risk_free_rate"] = c.risk_free_rate;
    j["periods_per_year"] = c.periods_per_year ? json(*c.periods_per_year) : json(nullptr);
    json params = json::object();
    for (const auto& [kind, p] : c.params) {
        params[std::string(kind_name(kind))] = detail::params_to_json(p);
    }
    j["params"] = params;
    if (c.tuner) {
        j["tuner"] = {{"n_trials", c.tuner->n_trials},
                      {"seed", c.tuner->seed},
                      {"objective_segment", segment_name(c.tuner->objective_segment)}};
    } else {
        j["tuner"] = nullptr;
    }
    j["seed"] = c.seed;
    if (include_runtime) {
        j["threads"] = c.threads;
        j["out"] = c.out_dir;
        j["run_id"] = c.run_id;
    }
    return j;
}

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    if (data.csv_path.empty() && !data.fetch) {
        throw Error(ErrorCode::InvalidConfig, "data source needs a csv path or fetch settings");
    }
    if (interval <= 0) {
        throw Error(ErrorCode::InvalidConfig, "interval must be positive");
    }
    indicators.validate();
    split.validate();
    if (models.empty() || windows.empty()) {
        throw Error(ErrorCode::InvalidConfig, "at least one model and one window are required");
    }
    for (auto w : windows) {
        if (w < 1) {
            throw Error(ErrorCode::InvalidConfig, "windows must be >= 1");
        }
    }
    if (retrain_stride < 1 || threads < 1) {
        throw Error(ErrorCode::InvalidConfig, "retrain_stride and threads must be >= 1");
    }
    cost.validate();
    if (!(threshold >= 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "threshold must be >= 0");
    }
    if (periods_per_year && !(*periods_per_year > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "periods_per_year must be positive");
    }
    if (tuner) {
        tuner->validate();
        if (tuner->objective_segment == Segment::Train) {
            throw Error(ErrorCode::InvalidConfig, "the tuning objective must be backtest or forward");
        }
    }
    for (const auto& [kind, p] : params) {
        resolve_params(kind, p);
    }
    if (data.fetch) {
        if (data.fetch->http.page_limit < 1 || data.fetch->http.max_retries < 0) {
            throw Error(ErrorCode::InvalidConfig, "fetch.page_limit >= 1 and fetch.max_retries >= 0 required");
        }
    }
}

EvalOptions RunConfig::eval_options() const {
    EvalOptions o;
    o.cost = cost;
    o.threshold = threshold;
    o.risk_free_rate = risk_free_rate;
    o.periods_per_year = periods_per_year ? *periods_per_year : periods_per_year_for(interval);
    return o;
}

WalkForwardConfig RunConfig::walkforward(std::size_t window) const { return {window, mode, retrain_stride}; }

RunConfig parse_run_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (!known_top_level_keys().contains(key)) {
            throw Error(ErrorCode::InvalidConfig, "unknown config field '" + key + "'");
        }
    }

    RunConfig c;
    if (const auto it = j.find("data"); it != j.end() && it->is_object()) {
        c.data.csv_path = get_or<std::string>(*it, "csv", "");
        if (const auto f = it->find("fetch"); f != it->end() && f->is_object()) {
            FetchSource src;
            src.http.base_url = get_or<std::string>(*f, "base_url", "");
            src.http.path_template = get_or(*f, "path_template", src.http.path_template);
            src.http.page_limit = get_or(*f, "page_limit", src.http.page_limit);
            src.http.max_retries = get_or(*f, "max_retries", src.http.max_retries);
            src.http.retry_backoff =
                std::chrono::milliseconds(get_or<std::int64_t>(*f, "retry_backoff_ms", src.http.retry_backoff.count()));
            src.http.timeout = std::chrono::seconds(get_or<std::int64_t>(*f, "timeout_s", src.http.timeout.count()));
            src.symbol = get_or<std::string>(*f, "symbol", "");
            src.start = parse_instant(f->value("start", json()), 0, "data.fetch.start");
            src.end = parse_instant(f->value("end", json()), 0, "data.fetch.end");
            c.data.fetch = src;
        }
    }
    c.interval = get_or(j, "interval", c.interval);
    c.indicators = parse_indicators(j.value("indicators", json()));
    if (const auto it = j.find("split"); it != j.end() && !it->is_null()) {
        c.split.train = parse_range(it->value("train", json()), "split.train");
        c.split.backtest = parse_range(it->value("backtest", json()), "split.backtest");
        c.split.forward = parse_range(it->value("forward", json()), "split.forward");
    }
    if (const auto it = j.find("models"); it == j.end() || it->is_null()) {
        c.models = all_kinds();
    } else {
        if (it->is_string() && it->get<std::string>() == "all") {
            c.models = all_kinds();
        } else if (it->is_array()) {
            for (const auto& m : *it) {
                if (!m.is_string()) {
                    throw Error(ErrorCode::InvalidConfig, "models must be kind names");
                }
                if (m.get<std::string>() == "all") {
                    c.models = all_kinds();
                    break;
                }
                try {
                    c.models.push_back(parse_kind(m.get<std::string>()));
                } catch (const Error& e) {
                    throw Error(ErrorCode::InvalidConfig, e.detail());
                }
            }
        } else {
            throw Error(ErrorCode::InvalidConfig, "models must be \"all\" or a list of kind names");
        }
    }
    if (const auto it = j.find("windows"); it != j.end()) {
        c.windows.clear();
        for (const auto& w : *it) {
            if (!w.is_number_integer() || w.get<std::int64_t>() < 1) {
                throw Error(ErrorCode::InvalidConfig, "windows must be positive integers");
            }
            c.windows.push_back(w.get<std::size_t>());
        }
    }
    c.mode = parse_mode(get_or<std::string>(j, "mode", "trailing"));
    c.retrain_stride = get_count(j, "retrain_stride", c.retrain_stride);
    c.cost.fee_bps = get_or(j, "fee_bps", 0.0);
    c.threshold = get_or(j, "threshold", 0.0);
    c.risk_free_rate = get_or(j, "risk_free_rate", 0.0);
    if (const auto it = j.find("periods_per_year"); it != j.end() && !it->is_null()) {
        c.periods_per_year = get_or(j, "periods_per_year", 0.0);
    }
    if (const auto it = j.find("params"); it != j.end() && it->is_object()) {
        for (const auto& [name, p] : it->items()) {
            ModelKind kind;
            try {
                kind = parse_kind(name);
            } catch (const Error& e) {
                throw Error(ErrorCode::InvalidConfig, e.detail());
            }
            c.params[kind] = detail::params_from_json(p);
        }
    }
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (const auto it = j.find("tuner"); it != j.end() && it->is_object()) {
        TunerConfig t;
        t.n_trials = get_count(*it, "n_trials", t.n_trials);
        t.seed = get_or<std::uint64_t>(*it, "seed", c.seed);
        t.objective_segment = parse_segment(get_or<std::string>(*it, "objective_segment", "backtest"));
        c.tuner = t;
    }
    c.threads = get_count(j, "threads", 1);
    c.out_dir = get_or<std::string>(j, "out", c.out_dir);
    c.run_id = get_or<std::string>(j, "run_id", "");
    c.validate();
    return c;
}

std::string serialize_run_config(const RunConfig& config) { return config_json(config, true).dump(2) + "\n"; }

std::string config_hash(const RunConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config_json(config, false).dump())));
    return buf;
}

CandleSeries load_candles(const RunConfig& config) {
    CandleSeries candles;
    try {
        if (!config.data.csv_path.empty()) {
            candles = read_candles_csv(config.data.csv_path, config.interval);
        } else {
            const auto& f = *config.data.fetch;
            candles = fetch_candles(f.http, f.symbol, config.interval, f.start, f.end);
        }
        require_gap_free(candles);
    } catch (const Error& e) {
        throw e.with_context("ingest");
    }
    return candles;
}

std::shared_ptr<const LabeledDataset> build_dataset(const CandleSeries& candles, const IndicatorConfig& indicators) {
    try {
        auto frame = build_features(candles, indicators);
        return std::make_shared<const LabeledDataset>(label(std::move(frame), log_diff(candles)));
    } catch (const Error& e) {
        throw e.with_context("features");
    }
}

RunArtifact run_experiment_on(const RunConfig& config, const CandleSeries& candles) {
    config.validate();
    const auto dataset = build_dataset(candles, config.indicators);
    SegmentViews views;
    try {
        views = split(dataset, config.split);
    } catch (const Error& e) {
        throw e.with_context("split");
    }

    struct Job {
        ModelKind kind;
        std::size_t window;
        EvalReport backtest;
        EvalReport forward;
        EquityCurve backtest_curve;
        EquityCurve forward_curve;
        std::optional<TunerResult> study;
    };
    std::vector<Job> jobs;
    for (auto kind : config.models) {
        for (auto window : config.windows) {
            jobs.push_back(Job{kind, window, {}, {}, {}, {}, std::nullopt});
        }
    }

    const auto options = config.eval_options();
    parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
        Job& job = jobs[i];
        const std::string stage =
            "evaluate " + std::string(kind_name(job.kind)) + " window " + std::to_string(job.window);
        try {
            const auto job_seed = hash_combine(hash_combine(config.seed, static_cast<std::uint64_t>(job.kind)),
                                               static_cast<std::uint64_t>(job.window));
            const auto wf = config.walkforward(job.window);
            const DatasetView* training = config.mode == WalkForwardMode::Global ? &views.train : nullptr;
            ModelSpec spec{job.kind, {}, job_seed};
            if (const auto it = config.params.find(job.kind); it != config.params.end()) {
                spec.params = it->second;
            }
            if (config.tuner) {
                TunerConfig tc = *config.tuner;
                tc.seed = hash_combine(hash_combine(tc.seed, static_cast<std::uint64_t>(job.kind)),
                                       static_cast<std::uint64_t>(job.window));
                tc.threads = 1;
                job.study = run_study(job.kind, wf, views, options, tc);
                spec.params = job.study->best().params;
                spec.seed = job.study->best().seed;
            }
            auto bt = evaluate_segment(views.backtest, Segment::Backtest, spec, wf, options, training);
            auto fw = evaluate_segment(views.forward, Segment::Forward, spec, wf, options, training);
            job.backtest = std::move(bt.report);
            job.backtest_curve = std::move(bt.simulation.curve);
            job.forward = std::move(fw.report);
            job.forward_curve = std::move(fw.simulation.curve);
        } catch (const Error& e) {
            throw e.with_context(stage);
        }
    });

    RunArtifact artifact;
    artifact.config = config;
    for (auto& job : jobs) {
        artifact.reports.push_back(job.backtest);
        artifact.reports.push_back(job.forward);
        artifact.equity[{job.kind, job.window, Segment::Backtest}] = std::move(job.backtest_curve);
        artifact.equity[{job.kind, job.window, Segment::Forward}] = std::move(job.forward_curve);
        if (job.study) {
            artifact.studies.push_back(std::move(*job.study));
        }
    }
    return artifact;
}

RunArtifact run_experiment(const RunConfig& config, bool persist) {
    config.validate();
    const auto candles = load_candles(config);
    auto artifact = run_experiment_on(config, candles);
    if (persist) {
        persist_run(artifact);
    }
    return artifact;
}

std::string persist_run(RunArtifact& artifact) {
    auto& config = artifact.config;
    if (config.run_id.empty()) {
        config.run_id = utc_stamp() + "-" + config_hash(config).substr(0, 8);
    }
    fs::path dir = fs::path(config.out_dir) / config.run_id;
    std::error_code ec;
    for (int suffix = 1; fs::exists(dir, ec) && !fs::is_empty(dir, ec); ++suffix) {
        dir = fs::path(config.out_dir) / (config.run_id + "-" + std::to_string(suffix));
    }
    config.run_id = dir.filename().string();
    fs::create_directories(dir / "equity", ec);
    if (ec) {
        throw Error(ErrorCode::InvalidConfig, "cannot create " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "config.json", serialize_run_config(config));
    write_text(dir / "report.json", report_json(artifact));
    write_text(dir / "trials.jsonl", trials_jsonl(artifact.studies));
    for (const auto& [key, curve] : artifact.equity) {
        const auto name = std::string(kind_name(key.kind)) + "_" + std::to_string(key.window) + "_" +
                          std::string(segment_name(key.segment)) + ".csv";
        write_text(dir / "equity" / name, equity_csv(curve));
    }
    artifact.run_dir = dir.string();
    return artifact.run_dir;
}

RunArtifact load_run(const std::string& run_dir) {
    const fs::path dir(run_dir);
    RunArtifact artifact;
    artifact.config = parse_run_config(read_text(dir / "config.json"));
    json report;
    try {
        report = json::parse(read_text(dir / "report.json"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedPayload, "report.json: " + std::string(e.what()));
    }
    artifact.engine_version = report.value("engine_version", std::string(kEngineVersion));
    for (const auto& r : report.at("reports")) {
        artifact.reports.push_back(detail::report_from_json(r));
    }
    for (const auto& r : artifact.reports) {
        const auto name = std::string(kind_name(r.kind)) + "_" + std::to_string(r.window) + "_" +
                          std::string(segment_name(r.segment)) + ".csv";
        artifact.equity[{r.kind, r.window, r.segment}] = detail::parse_equity_csv(read_text(dir / "equity" / name));
    }
    artifact.run_dir = dir.string();
    return artifact;
}

std::string export_equity(const RunArtifact& artifact, ModelKind kind, std::size_t window, Segment segment) {
    const auto it = artifact.equity.find({kind, window, segment});
    if (it == artifact.equity.end()) {
        throw Error(ErrorCode::UnknownSelector, std::string(kind_name(kind)) + " window " + std::to_string(window) +
                                                    " " + std::string(segment_name(segment)) + " is not in the run");
    }
    return equity_csv(it->second);
}

std::string indicator_csv(const CandleSeries& candles, const IndicatorConfig& c, std::string_view name) {
    c.validate();
    IndicatorSeries series;
    if (name == "acc_dist") {
        series = acc_dist(candles);
    } else if (name == "mfi") {
        series = mfi(candles, c.mfi_period);
    } else if (name.starts_with("bb_")) {
        auto bands = bollinger(candles, c.bb_period, c.bb_k);
        if (name == "bb_middle") series = std::move(bands.middle);
        else if (name == "bb_upper") series = std::move(bands.upper);
        else if (name == "bb_lower") series = std::move(bands.lower);
        else if (name == "bb_bandwidth") series = std::move(bands.bandwidth);
    } else if (name == "kc_width") {
        series = keltner_width(candles, c.kc_ema_period, c.kc_atr_period, c.kc_mult);
    } else if (name == "sar") {
        series = parabolic_sar(candles, c.sar_af_start, c.sar_af_step, c.sar_af_max).sar;
    }
    if (series.values.empty()) {
        throw Error(ErrorCode::UnknownSelector, "unknown indicator '" + std::string(name) + "'");
    }
    std::string out = "timestamp,value\n";
    char buf[64];
    for (std::size_t t = series.warmup_len; t < series.size(); ++t) {
        out += std::to_string(candles[t].timestamp);
        out.push_back(',');
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), series.values[t]);
        out.append(buf, ptr);
        out.push_back('\n');
    }
    return out;
}

}  // namespace wfbt
