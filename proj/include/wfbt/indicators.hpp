#pragma once

#include "wfbt/ingest.hpp"
#include "wfbt/types.hpp"

#include <string>
#include <vector>

namespace wfbt {

struct IndicatorConfig {
    int mfi_period = 14;
    int bb_period = 20;
    double bb_k = 2.0;
    int kc_ema_period = 20;
    int kc_atr_period = 10;
    double kc_mult = 2.0;
    double sar_af_start = 0.02;
    double sar_af_step = 0.02;
    double sar_af_max = 0.2;

    /// Throws InvalidConfig on a violated invariant.
    void validate() const;
};

/// Values before `warmup_len` are NaN; every later value is finite.
struct IndicatorSeries {
    std::string name;
    std::vector<double> values;
    std::size_t warmup_len = 0;

    std::size_t size() const noexcept { return values.size(); }
    bool defined(std::size_t i) const noexcept { return i >= warmup_len && i < values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

struct BollingerBands {
    IndicatorSeries middle;
    IndicatorSeries upper;
    IndicatorSeries lower;
    IndicatorSeries bandwidth;
};

struct ParabolicSar {
    IndicatorSeries sar;
    /// Trend in force at each index; index 0 carries the initial trend.
    std::vector<Direction> trend;
};

/// Accumulation/distribution line; a doji (H == L) contributes nothing.
IndicatorSeries acc_dist(const CandleSeries& series);

/// Money flow index on typical price. Flows with an unchanged typical price
/// count toward neither side; a window with no flows reads 50.
IndicatorSeries mfi(const CandleSeries& series, int period);

/// SMA middle band with population standard deviation.
BollingerBands bollinger(const CandleSeries& series, int period, double k);

/// Keltner channel width (upper - lower) / middle, using an SMA-seeded EMA of
/// typical price and Wilder's ATR seeded with the mean of the first
/// `atr_period` true ranges (true range starts at index 1).
IndicatorSeries keltner_width(const CandleSeries& series, int ema_period, int atr_period, double mult);

/// Wilder's parabolic stop-and-reverse.
///
/// The initial trend follows close[1] - close[0] (a tie counts as up) and the
/// first SAR, at index 1, is low[0] for an up trend or high[0] for a down
/// trend, with the extreme point taken over bars 0 and 1. From index 2 on the
/// SAR advances by af * (ep - sar), is clamped outside the previous two bars'
/// range, and a bar whose low (high) strictly crosses it reverses the trend:
/// SAR resets to the old extreme point and af to af_start.
ParabolicSar parabolic_sar(const CandleSeries& series, double af_start, double af_step, double af_max);

}  // namespace wfbt
