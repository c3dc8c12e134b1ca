#include "wfbt/indicators.hpp"

#include "wfbt/error.hpp"

#include <algorithm>
#include <cmath>

namespace wfbt {

namespace {

void require_length(const CandleSeries& series, std::size_t min_len, const char* what) {
    if (series.size() < min_len) {
        throw Error(ErrorCode::SeriesTooShort, std::string(what) + " needs at least " + std::to_string(min_len) +
                                                  " candles, got " + std::to_string(series.size()));
    }
}

void require_period(int period, const char* what) {
    if (period < 1) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " period must be >= 1");
    }
}

IndicatorSeries make_series(std::string name, std::size_t n, std::size_t warmup) {
    IndicatorSeries out;
    out.name = std::move(name);
    out.values.assign(n, kUndefined);
    out.warmup_len = warmup;
    return out;
}

double typical_price(const Candle& c) { return (c.high + c.low + c.close) / 3.0; }

}  // namespace

void IndicatorConfig::validate() const {
    if (mfi_period < 1 || bb_period < 1 || kc_ema_period < 1 || kc_atr_period < 1) {
        throw Error(ErrorCode::InvalidConfig, "indicator periods must be >= 1");
    }
    if (!(bb_k > 0.0) || !(kc_mult > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "bb_k and kc_mult must be positive");
    }
    if (!(sar_af_start > 0.0) || !(sar_af_step > 0.0) || !(sar_af_max > 0.0) || sar_af_start > sar_af_max) {
        throw Error(ErrorCode::InvalidConfig, "SAR factors must be positive with af_start <= af_max");
    }
}

IndicatorSeries acc_dist(const CandleSeries& series) {
    auto out = make_series("acc_dist", series.size(), 0);
    double ad = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto& c = series[t];
        const double range = c.high - c.low;
        if (range > 0.0) {
            const double clv = ((c.close - c.low) - (c.high - c.close)) / range;
            ad += clv * c.volume;
        }
        out.values[t] = ad;
    }
    return out;
}

IndicatorSeries mfi(const CandleSeries& series, int period) {
    require_period(period, "mfi");
    const auto p = static_cast<std::size_t>(period);
    require_length(series, p + 1, "mfi");
    const auto n = series.size();

    // flow[t] for t >= 1: +money flow, -money flow or 0 when unchanged.
    std::vector<double> positive(n, 0.0);
    std::vector<double> negative(n, 0.0);
    double prev_tp = typical_price(series[0]);
    for (std::size_t t = 1; t < n; ++t) {
        const double tp = typical_price(series[t]);
        const double flow = tp * series[t].volume;
        if (tp > prev_tp) {
            positive[t] = flow;
        } else if (tp < prev_tp) {
            negative[t] = flow;
        }
        prev_tp = tp;
    }

    auto out = make_series("mfi", n, p);
    for (std::size_t t = p; t < n; ++t) {
        double pos = 0.0;
        double neg = 0.0;
        for (std::size_t i = t + 1 - p; i <= t; ++i) {
            pos += positive[i];
            neg += negative[i];
        }
        const double total = pos + neg;
        out.values[t] = total > 0.0 ? 100.0 * pos / total : 50.0;
    }
    return out;
}

BollingerBands bollinger(const CandleSeries& series, int period, double k) {
    require_period(period, "bollinger");
    const auto p = static_cast<std::size_t>(period);
    require_length(series, p, "bollinger");
    const auto n = series.size();
    BollingerBands bands{make_series("bb_middle", n, p - 1), make_series("bb_upper", n, p - 1),
                         make_series("bb_lower", n, p - 1), make_series("bb_bandwidth", n, p - 1)};
    for (std::size_t t = p - 1; t < n; ++t) {
        double sum = 0.0;
        for (std::size_t i = t + 1 - p; i <= t; ++i) {
            sum += series[i].close;
        }
        const double mean = sum / static_cast<double>(p);
        double ss = 0.0;
        for (std::size_t i = t + 1 - p; i <= t; ++i) {
            const double d = series[i].close - mean;
            ss += d * d;
        }
        const double sigma = std::sqrt(ss / static_cast<double>(p));
        const double upper = mean + k * sigma;
        const double lower = mean - k * sigma;
        bands.middle.values[t] = mean;
        bands.upper.values[t] = upper;
        bands.lower.values[t] = lower;
        bands.bandwidth.values[t] = (upper - lower) / mean;
    }
    return bands;
}

IndicatorSeries keltner_width(const CandleSeries& series, int ema_period, int atr_period, double mult) {
    require_period(ema_period, "keltner ema");
    require_period(atr_period, "keltner atr");
    const auto ep = static_cast<std::size_t>(ema_period);
    const auto ap = static_cast<std::size_t>(atr_period);
    const auto warmup = std::max(ep, ap);
    require_length(series, warmup + 1, "keltner_width");
    const auto n = series.size();

    std::vector<double> ema(n, kUndefined);
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < ep; ++i) {
            sum += typical_price(series[i]);
        }
        ema[ep - 1] = sum / static_cast<double>(ep);
        const double alpha = 2.0 / (static_cast<double>(ep) + 1.0);
        for (std::size_t t = ep; t < n; ++t) {
            ema[t] = alpha * typical_price(series[t]) + (1.0 - alpha) * ema[t - 1];
        }
    }

    std::vector<double> atr(n, kUndefined);
    {
        auto true_range = [&](std::size_t t) {
            const auto& c = series[t];
            const double prev_close = series[t - 1].close;
            return std::max({c.high - c.low, std::abs(c.high - prev_close), std::abs(c.low - prev_close)});
        };
        double sum = 0.0;
        for (std::size_t t = 1; t <= ap; ++t) {
            sum += true_range(t);
        }
        atr[ap] = sum / static_cast<double>(ap);
        const double a = static_cast<double>(ap);
        for (std::size_t t = ap + 1; t < n; ++t) {
            atr[t] = (atr[t - 1] * (a - 1.0) + true_range(t)) / a;
        }
    }

    auto out = make_series("kc_width", n, warmup);
    for (std::size_t t = warmup; t < n; ++t) {
        out.values[t] = (2.0 * mult * atr[t]) / ema[t];
    }
    return out;
}

ParabolicSar parabolic_sar(const CandleSeries& series, double af_start, double af_step, double af_max) {
    if (!(af_start > 0.0) || !(af_step > 0.0) || !(af_max >= af_start)) {
        throw Error(ErrorCode::InvalidArgument, "SAR factors must be positive with af_start <= af_max");
    }
    require_length(series, 2, "parabolic_sar");
    const auto n = series.size();
    ParabolicSar out{make_series("sar", n, 1), std::vector<Direction>(n, Direction::Up)};

    bool up = series[1].close >= series[0].close;
    double af = af_start;
    double sar = up ? series[0].low : series[0].high;
    double extreme = up ? std::max(series[0].high, series[1].high) : std::min(series[0].low, series[1].low);
    out.trend[0] = out.trend[1] = up ? Direction::Up : Direction::Down;
    out.sar.values[1] = sar;

    for (std::size_t t = 2; t < n; ++t) {
        const auto& bar = series[t];
        double next = sar + af * (extreme - sar);
        if (up) {
            next = std::min({next, series[t - 1].low, series[t - 2].low});
            if (bar.low < next) {
                up = false;
                next = extreme;
                extreme = bar.low;
                af = af_start;
            } else if (bar.high > extreme) {
                extreme = bar.high;
                af = std::min(af + af_step, af_max);
            }
        } else {
            next = std::max({next, series[t - 1].high, series[t - 2].high});
            if (bar.high > next) {
                up = true;
                next = extreme;
                extreme = bar.high;
                af = af_start;
            } else if (bar.low < extreme) {
                extreme = bar.low;
                af = std::min(af + af_step, af_max);
            }
        }
        sar = next;
        out.sar.values[t] = sar;
        out.trend[t] = up ? Direction::Up : Direction::Down;
    }
    return out;
}

}  // namespace wfbt
