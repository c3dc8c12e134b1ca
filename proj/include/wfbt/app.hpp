#pragma once

#include "wfbt/dataset.hpp"
#include "wfbt/evaluation.hpp"
#include "wfbt/ingest.hpp"
#include "wfbt/tuner.hpp"

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfbt {

inline constexpr std::string_view kEngineVersion = "wfbt 1.0.0";

struct FetchSource {
    FetchConfig http;
    std::string symbol;
    std::int64_t start = 0;
    std::int64_t end = 0;
};

struct DataSource {
    std::string csv_path;
    std::optional<FetchSource> fetch;  // used when csv_path is empty
};

struct RunConfig {
    DataSource data;
    std::int64_t interval = kDailyInterval;
    IndicatorConfig indicators;
    SegmentSplit split = SegmentSplit::calendar_default();
    std::vector<ModelKind> models;
    std::vector<std::size_t> windows{1, 7, 14, 21, 28};
    WalkForwardMode mode = WalkForwardMode::Trailing;
    std::size_t retrain_stride = 1;
    CostModel cost;
    double threshold = 0.0;
    double risk_free_rate = 0.0;
    std::optional<double> periods_per_year;  // inferred from interval when empty
    std::map<ModelKind, Params> params;      // fixed hyperparameters when not tuning
    std::optional<TunerConfig> tuner;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string out_dir = "runs";
    std::string run_id;  // generated when empty

    /// Throws InvalidConfig.
    void validate() const;
    EvalOptions eval_options() const;
    WalkForwardConfig walkforward(std::size_t window) const;
};

/// Accepts "models": "all" or a list of kind names, and split bounds as
/// epoch seconds, "YYYY-MM-DD" strings or null (unbounded).
RunConfig parse_run_config(std::string_view json_text);

/// Canonical JSON; parse_run_config(serialize_run_config(c)) reproduces c.
std::string serialize_run_config(const RunConfig& config);

/// Hex digest of the settings that determine results (excludes threads,
/// output location and run id).
std::string config_hash(const RunConfig& config);

struct EquityKey {
    ModelKind kind = ModelKind::LogisticC;
    std::size_t window = 0;
    Segment segment = Segment::Backtest;

    auto operator<=>(const EquityKey&) const = default;
};

struct RunArtifact {
    RunConfig config;
    std::string engine_version{kEngineVersion};
    std::vector<EvalReport> reports;  // models x windows x {backtest, forward}
    std::map<EquityKey, EquityCurve> equity;
    std::vector<TunerResult> studies;
    std::string run_dir;  // empty when not persisted
};

/// Candles from the configured CSV file or HTTP endpoint; holes are errors.
CandleSeries load_candles(const RunConfig& config);

std::shared_ptr<const LabeledDataset> build_dataset(const CandleSeries& candles, const IndicatorConfig& indicators);

/// ingest -> features -> label -> split, then per (model, window) optional
/// tuning and evaluation on the backtest and forward segments. Persists under
/// <out_dir>/<run_id>/ when `persist` is set.
RunArtifact run_experiment(const RunConfig& config, bool persist = true);

/// Same pipeline on an already loaded series (no persistence).
RunArtifact run_experiment_on(const RunConfig& config, const CandleSeries& candles);

/// Writes config.json, report.json, trials.jsonl and equity/*.csv; returns
/// the run directory.
std::string persist_run(RunArtifact& artifact);

/// Reads a persisted run back (config, reports, equity curves).
RunArtifact load_run(const std::string& run_dir);

std::string report_json(const RunArtifact& artifact);
std::string trials_jsonl(std::span<const TunerResult> studies);
std::string best_trial_json(const TunerResult& study);

/// Text table with one row per model at its best-backtest-PNL window, a
/// backtest block and a forward-test block. '*' marks the best backtest
/// PNL, '+' the best forward-test PNL. Throws MixedTasks.
std::string emit_table(std::span<const EvalReport> reports, Task task);

std::vector<std::string> table_columns(Task task);

/// `timestamp,equity_fraction`. Throws UnknownSelector.
std::string export_equity(const RunArtifact& artifact, ModelKind kind, std::size_t window, Segment segment);

/// `timestamp,value` for one indicator: acc_dist, mfi, bb_middle, bb_upper,
/// bb_lower, bb_bandwidth, kc_width or sar.
std::string indicator_csv(const CandleSeries& candles, const IndicatorConfig& config, std::string_view name);

}  // namespace wfbt
