#include "wfbt/trading.hpp"

#include "wfbt/error.hpp"

#include <charconv>
#include <cmath>

namespace wfbt {

void CostModel::validate() const {
    if (!(fee_bps >= 0.0) || !std::isfinite(fee_bps)) {
        throw Error(ErrorCode::InvalidConfig, "fee_bps must be a finite value >= 0");
    }
}

double simple_return(double log_return) { return std::expm1(log_return); }

Simulation simulate(const PositionSeries& positions, std::span<const double> simple_returns, const CostModel& cost) {
    cost.validate();
    const auto n = positions.size();
    if (simple_returns.size() != n || positions.timestamps.size() != n) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(n) + " positions but " +
                                                   std::to_string(simple_returns.size()) + " returns");
    }
    const double fee = cost.fee_bps / 1e4;
    Simulation sim;
    sim.curve.timestamps = positions.timestamps;
    sim.curve.step_returns.reserve(n);
    sim.curve.equity.reserve(n);
    int previous = 0;
    double equity = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const int pos = positions.positions[t];
        if (pos < -1 || pos > 1) {
            throw Error(ErrorCode::InvalidArgument, "positions must lie in {-1, 0, +1}");
        }
        if (!std::isfinite(simple_returns[t])) {
            throw Error(ErrorCode::NonFiniteInput, "non-finite realized return");
        }
        double step = static_cast<double>(pos) * simple_returns[t];
        if (pos != previous) {
            step -= fee;
            sim.ledger.trades.push_back({positions.timestamps[t], previous, pos});
        }
        equity += step;
        sim.curve.step_returns.push_back(step);
        sim.curve.equity.push_back(equity);
        previous = pos;
    }
    return sim;
}

double pnl_percent(const EquityCurve& curve) {
    if (curve.empty()) {
        throw Error(ErrorCode::TooFewObservations, "empty equity curve");
    }
    return 100.0 * curve.equity.back();
}

std::size_t count_trades(const TradeLedger& ledger) { return ledger.count(); }

std::string equity_csv(const EquityCurve& curve) {
    std::string out = "timestamp,equity_fraction\n";
    char buf[64];
    for (std::size_t t = 0; t < curve.size(); ++t) {
        out += std::to_string(curve.timestamps[t]);
        out.push_back(',');
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), curve.equity[t]);
        out.append(buf, ptr);
        out.push_back('\n');
    }
    return out;
}

}  // namespace wfbt
