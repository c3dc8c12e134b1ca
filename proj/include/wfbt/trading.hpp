#pragma once

#include "wfbt/walkforward.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wfbt {

struct CostModel {
    double fee_bps = 0.0;  // charged on full notional per position change

    void validate() const;
};

/// Additive PNL on unit notional.
struct EquityCurve {
    std::vector<std::int64_t> timestamps;
    std::vector<double> step_returns;
    std::vector<double> equity;  // running sum of step_returns

    std::size_t size() const noexcept { return equity.size(); }
    bool empty() const noexcept { return equity.empty(); }
};

struct Trade {
    std::int64_t timestamp = 0;
    int old_position = 0;
    int new_position = 0;
};

struct TradeLedger {
    std::vector<Trade> trades;

    std::size_t count() const noexcept { return trades.size(); }
};

struct Simulation {
    EquityCurve curve;
    TradeLedger ledger;
};

/// Converts a log return to the simple return exp(r) - 1.
double simple_return(double log_return);

/// Step return pos[t] * simple[t] - fee_bps / 1e4 whenever pos[t] differs
/// from pos[t-1]; the position before the first step is flat, so opening a
/// position is a charged trade.
Simulation simulate(const PositionSeries& positions, std::span<const double> simple_returns, const CostModel& cost);

double pnl_percent(const EquityCurve& curve);
std::size_t count_trades(const TradeLedger& ledger);

/// `timestamp,equity_fraction`
std::string equity_csv(const EquityCurve& curve);

}  // namespace wfbt
