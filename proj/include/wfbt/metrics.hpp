#pragma once

#include "wfbt/trading.hpp"
#include "wfbt/types.hpp"

#include <span>

namespace wfbt {

/// Annualized Sharpe ratio with sample (n - 1) standard deviation.
/// Throws TooFewObservations (< 2 returns) or ZeroVolatility.
double sharpe(std::span<const double> step_returns, double risk_free_rate, double periods_per_year);

struct ClassificationScores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Up is the positive class; a zero denominator yields 0.
ClassificationScores classification_metrics(std::span<const Direction> y_true, std::span<const Direction> y_pred);

struct RegressionErrors {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

RegressionErrors regression_errors(std::span<const double> y_true, std::span<const double> y_pred);

/// 1 - SS_res / SS_tot. Throws ConstantTruth.
double r_squared(std::span<const double> y_true, std::span<const double> y_pred);

/// R^2 of the least-squares line through (step index, equity). Throws
/// TooFewObservations (< 3 points) or ConstantCurve.
double equity_trend_r2(const EquityCurve& curve);

/// 365 * 86400 / interval: crypto markets trade every day.
double periods_per_year_for(std::int64_t interval_seconds);

}  // namespace wfbt
