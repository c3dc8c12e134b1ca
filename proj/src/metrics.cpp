#include "wfbt/metrics.hpp"

#include "wfbt/error.hpp"

#include <algorithm>
#include <cmath>

namespace wfbt {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(a) + " vs " + std::to_string(b) + " observations");
    }
    if (a == 0) {
        throw Error(ErrorCode::TooFewObservations, "no observations");
    }
}

double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    return sum / static_cast<double>(v.size());
}

bool all_equal(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double sharpe(std::span<const double> step_returns, double risk_free_rate, double periods_per_year) {
    const auto n = step_returns.size();
    if (n < 2) {
        throw Error(ErrorCode::TooFewObservations, "Sharpe needs at least 2 returns");
    }
    if (!(periods_per_year > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "periods_per_year must be positive");
    }
    const double mean = mean_of(step_returns);
    double ss = 0.0;
    for (double r : step_returns) {
        ss += (r - mean) * (r - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (all_equal(step_returns) || !(sd > 0.0)) {
        throw Error(ErrorCode::ZeroVolatility, "returns have zero standard deviation");
    }
    return (mean - risk_free_rate / periods_per_year) / sd * std::sqrt(periods_per_year);
}

ClassificationScores classification_metrics(std::span<const Direction> y_true, std::span<const Direction> y_pred) {
    require_same_length(y_true.size(), y_pred.size());
    double tp = 0;
    double fp = 0;
    double fn = 0;
    double tn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool truth = y_true[i] == Direction::Up;
        const bool pred = y_pred[i] == Direction::Up;
        if (truth && pred) {
            tp += 1;
        } else if (!truth && pred) {
            fp += 1;
        } else if (truth) {
            fn += 1;
        } else {
            tn += 1;
        }
    }
    ClassificationScores s;
    s.accuracy = (tp + tn) / static_cast<double>(y_true.size());
    s.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

RegressionErrors regression_errors(std::span<const double> y_true, std::span<const double> y_pred) {
    require_same_length(y_true.size(), y_pred.size());
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double e = y_pred[i] - y_true[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    const double n = static_cast<double>(y_true.size());
    RegressionErrors out;
    out.mae = abs_sum / n;
    out.mse = sq_sum / n;
    out.rmse = std::sqrt(out.mse);
    return out;
}

double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
    require_same_length(y_true.size(), y_pred.size());
    if (y_true.size() < 2) {
        throw Error(ErrorCode::TooFewObservations, "R^2 needs at least 2 observations");
    }
    const double mean = mean_of(y_true);
    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    }
    if (all_equal(y_true) || !(ss_tot > 0.0)) {
        throw Error(ErrorCode::ConstantTruth, "truth values are constant");
    }
    return 1.0 - ss_res / ss_tot;
}

double equity_trend_r2(const EquityCurve& curve) {
    const auto n = curve.size();
    if (n < 3) {
        throw Error(ErrorCode::TooFewObservations, "trend R^2 needs at least 3 points");
    }
    const double x_mean = static_cast<double>(n - 1) / 2.0;
    const double y_mean = mean_of(curve.equity);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - x_mean;
        const double dy = curve.equity[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (all_equal(curve.equity) || !(syy > 0.0)) {
        throw Error(ErrorCode::ConstantCurve, "equity curve is constant");
    }
    // R^2 of a simple least-squares line equals the squared correlation.
    return (sxy * sxy) / (sxx * syy);
}

double periods_per_year_for(std::int64_t interval_seconds) {
    if (interval_seconds <= 0) {
        throw Error(ErrorCode::InvalidArgument, "interval must be positive");
    }
    return 365.0 * 86400.0 / static_cast<double>(interval_seconds);
}

}  // namespace wfbt
