#include "wfbt/evaluation.hpp"

#include "wfbt/error.hpp"

namespace wfbt {

namespace {

template <typename F>
std::optional<double> defined_or_empty(F&& compute) {
    try {
        return compute();
    } catch (const Error& e) {
        switch (e.code()) {
            case ErrorCode::ZeroVolatility:
            case ErrorCode::TooFewObservations:
            case ErrorCode::ConstantTruth:
            case ErrorCode::ConstantCurve:
                return std::nullopt;
            default:
                throw;
        }
    }
}

}  // namespace

Evaluation evaluate_segment(const DatasetView& view, Segment segment, const ModelSpec& spec,
                            const WalkForwardConfig& config, const EvalOptions& options,
                            const DatasetView* training) {
    Evaluation ev;
    ev.predictions = run_walkforward(view, spec, config, training);
    const auto task = task_of(spec.kind);
    const auto positions = signal_from_predictions(ev.predictions, task, options.threshold);

    const auto n = ev.predictions.size();
    std::vector<double> simple(n);
    std::vector<double> realized(n);
    std::vector<Direction> truth(n);
    std::vector<Direction> predicted(n);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = ev.predictions.records[i];
        realized[i] = r.realized_return;
        simple[i] = simple_return(r.realized_return);
        truth[i] = r.realized_class;
        predicted[i] = r.direction;
        values[i] = r.value;
    }
    ev.simulation = simulate(positions, simple, options.cost);

    auto& rep = ev.report;
    rep.kind = spec.kind;
    rep.task = task;
    rep.window = config.window;
    rep.segment = segment;
    rep.params = resolve_params(spec.kind, spec.params);
    rep.n_predictions = n;
    rep.pnl_percent = pnl_percent(ev.simulation.curve);
    rep.n_trades = count_trades(ev.simulation.ledger);
    rep.sharpe = defined_or_empty(
        [&] { return sharpe(ev.simulation.curve.step_returns, options.risk_free_rate, options.periods_per_year); });

    const auto cls = classification_metrics(truth, predicted);
    rep.accuracy = cls.accuracy;
    rep.precision = cls.precision;
    rep.recall = cls.recall;
    rep.f1 = cls.f1;
    if (task == Task::Regressor) {
        const auto err = regression_errors(realized, values);
        rep.mae = err.mae;
        rep.mse = err.mse;
        rep.rmse = err.rmse;
        rep.r2 = defined_or_empty([&] { return r_squared(realized, values); });
    } else {
        rep.r2 = defined_or_empty([&] { return equity_trend_r2(ev.simulation.curve); });
    }
    return ev;
}

}  // namespace wfbt
