#pragma once

#include "wfbt/dataset.hpp"
#include "wfbt/metrics.hpp"
#include "wfbt/models.hpp"
#include "wfbt/trading.hpp"
#include "wfbt/walkforward.hpp"

#include <optional>

namespace wfbt {

struct EvalOptions {
    CostModel cost;
    double threshold = 0.0;  // regressor dead band
    double risk_free_rate = 0.0;
    double periods_per_year = 365.0;
};

/// All metrics for one (model, window) pair on one segment. Undefined
/// values (Sharpe on a flat curve, R^2 on a constant series) stay empty.
struct EvalReport {
    ModelKind kind = ModelKind::LogisticC;
    Task task = Task::Classifier;
    std::size_t window = 0;
    Segment segment = Segment::Backtest;
    Params params;

    double pnl_percent = 0.0;
    std::optional<double> sharpe;
    /// Regressors: R^2 of predicted vs realized returns. Classifiers: R^2 of
    /// the equity curve's linear trend.
    std::optional<double> r2;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    std::size_t n_trades = 0;
    std::size_t n_predictions = 0;
};

struct Evaluation {
    EvalReport report;
    PredictionSeries predictions;
    Simulation simulation;
};

/// Walk-forward predictions on `view`, the resulting trades, and the report.
Evaluation evaluate_segment(const DatasetView& view, Segment segment, const ModelSpec& spec,
                            const WalkForwardConfig& config, const EvalOptions& options,
                            const DatasetView* training = nullptr);

}  // namespace wfbt
