#include "wfbt/dataset.hpp"

#include "wfbt/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace wfbt {

namespace {

constexpr std::int64_t kFeb2023 = 1675209600;
constexpr std::int64_t kAug2023 = 1690848000;
constexpr std::int64_t kNov2023 = 1698796800;

void append_real(std::string& out, double v) {
    if (!std::isfinite(v)) {
        return;
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

SegmentSplit SegmentSplit::calendar_default() {
    SegmentSplit s;
    s.train.end = kFeb2023;
    s.backtest = {kFeb2023, kAug2023};
    s.forward = {kAug2023, kNov2023};
    return s;
}

void SegmentSplit::validate() const {
    for (const auto* r : {&train, &backtest, &forward}) {
        if (r->begin >= r->end) {
            throw Error(ErrorCode::InvalidSplit, "segment range must satisfy begin < end");
        }
    }
    if (train.end > backtest.begin || backtest.end > forward.begin) {
        throw Error(ErrorCode::InvalidSplit, "segments must be disjoint and ordered train < backtest < forward");
    }
}

std::string_view segment_name(Segment s) noexcept {
    switch (s) {
        case Segment::Train: return "train";
        case Segment::Backtest: return "backtest";
        case Segment::Forward: return "forward";
    }
    return "unknown";
}

Segment parse_segment(std::string_view name) {
    if (name == "train") return Segment::Train;
    if (name == "backtest") return Segment::Backtest;
    if (name == "forward" || name == "forwardtest") return Segment::Forward;
    throw Error(ErrorCode::UnknownSelector, "unknown segment '" + std::string(name) + "'");
}

DatasetView::DatasetView(std::shared_ptr<const LabeledDataset> parent, std::size_t begin, std::size_t end)
    : parent_(std::move(parent)), begin_(begin), end_(end) {
    if (!parent_ || begin_ > end_ || begin_ < parent_->usable_begin || end_ > parent_->usable_end) {
        throw Error(ErrorCode::InvalidArgument, "view must lie inside the parent's usable rows");
    }
}

std::size_t DatasetView::history_available(std::size_t index) const {
    const auto first = parent_->usable_begin;
    return index > first ? index - first : 0;
}

MatrixView DatasetView::rows_before(std::size_t index, std::size_t count) const {
    if (history_available(index) < count) {
        throw Error(ErrorCode::InsufficientHistory, "row " + std::to_string(index) + " has " +
                                                        std::to_string(history_available(index)) +
                                                        " usable rows of history, " + std::to_string(count) +
                                                        " requested");
    }
    return parent_->frame.rows.view(index - count, count);
}

const DatasetView& SegmentViews::get(Segment s) const {
    switch (s) {
        case Segment::Train: return train;
        case Segment::Backtest: return backtest;
        case Segment::Forward: return forward;
    }
    return train;
}

ReturnSeries log_diff(const CandleSeries& series) {
    if (series.size() < 2) {
        throw Error(ErrorCode::SeriesTooShort, "log_diff needs at least 2 candles");
    }
    ReturnSeries out;
    out.values.assign(series.size(), kUndefined);
    for (std::size_t t = 1; t < series.size(); ++t) {
        out.values[t] = std::log(series[t].close) - std::log(series[t - 1].close);
    }
    return out;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names{"logret",       "ad_diff",  "mfi",     "bb_percent_b",
                                                "bb_bandwidth", "kc_width", "sar_side"};
    return names;
}

FeatureFrame build_features(const CandleSeries& series, const IndicatorConfig& config) {
    config.validate();
    const auto n = series.size();
    const auto bb_p = static_cast<std::size_t>(config.bb_period);
    const std::size_t ad_warmup = std::max<std::size_t>(1, bb_p - 1);
    const std::size_t kc_warmup =
        static_cast<std::size_t>(std::max(config.kc_ema_period, config.kc_atr_period));
    const std::size_t valid_from = std::max({std::size_t{1}, ad_warmup, static_cast<std::size_t>(config.mfi_period),
                                             bb_p - 1, kc_warmup});
    if (n <= valid_from) {
        throw Error(ErrorCode::SeriesTooShort, "feature warm-up needs more than " + std::to_string(valid_from) +
                                                   " candles, got " + std::to_string(n));
    }

    const auto returns = log_diff(series);
    const auto ad = acc_dist(series);
    const auto money_flow = mfi(series, config.mfi_period);
    const auto bands = bollinger(series, config.bb_period, config.bb_k);
    const auto keltner = keltner_width(series, config.kc_ema_period, config.kc_atr_period, config.kc_mult);
    const auto sar = parabolic_sar(series, config.sar_af_start, config.sar_af_step, config.sar_af_max);

    FeatureFrame frame;
    frame.feature_names = feature_names();
    frame.timestamps.reserve(n);
    for (const auto& c : series.candles) {
        frame.timestamps.push_back(c.timestamp);
    }
    frame.rows = RowMatrix(n, frame.feature_names.size(), kUndefined);
    frame.valid_from = valid_from;

    for (std::size_t t = 0; t < n; ++t) {
        auto row = frame.rows.row(t);
        if (t >= returns.warmup_len) {
            row[0] = returns.values[t];
        }
        if (t >= ad_warmup) {
            double volume_sum = 0.0;
            for (std::size_t i = t + 1 - bb_p; i <= t; ++i) {
                volume_sum += series[i].volume;
            }
            const double volume_mean = volume_sum / static_cast<double>(bb_p);
            row[1] = volume_mean > 0.0 ? (ad.values[t] - ad.values[t - 1]) / volume_mean : 0.0;
        }
        if (money_flow.defined(t)) {
            row[2] = money_flow.values[t] / 100.0;
        }
        if (bands.middle.defined(t)) {
            const double width = bands.upper.values[t] - bands.lower.values[t];
            row[3] = width > 0.0 ? (series[t].close - bands.lower.values[t]) / width : 0.5;
            row[4] = bands.bandwidth.values[t];
        }
        if (keltner.defined(t)) {
            row[5] = keltner.values[t];
        }
        if (sar.sar.defined(t)) {
            row[6] = series[t].close > sar.sar.values[t] ? 1.0 : -1.0;
        }
    }
    return frame;
}

LabeledDataset label(FeatureFrame frame, const ReturnSeries& returns) {
    const auto n = frame.size();
    if (returns.size() != n || frame.rows.rows() != n) {
        throw Error(ErrorCode::LengthMismatch, "frame has " + std::to_string(n) + " rows, returns " +
                                                   std::to_string(returns.size()));
    }
    LabeledDataset ds;
    ds.class_target.assign(n, Direction::Down);
    ds.reg_target.assign(n, kUndefined);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        const double next = returns.values[t + 1];
        ds.reg_target[t] = next;
        ds.class_target[t] = next > 0.0 ? Direction::Up : Direction::Down;
    }
    ds.usable_begin = frame.valid_from;
    ds.usable_end = n > 0 ? std::max(frame.valid_from, n - 1) : 0;
    ds.frame = std::move(frame);
    return ds;
}

SegmentViews split(std::shared_ptr<const LabeledDataset> dataset, const SegmentSplit& ranges) {
    ranges.validate();
    const auto& ts = dataset->frame.timestamps;
    auto make_view = [&](const TimeRange& range, Segment segment) {
        const auto first = ts.begin() + static_cast<std::ptrdiff_t>(dataset->usable_begin);
        const auto last = ts.begin() + static_cast<std::ptrdiff_t>(dataset->usable_end);
        const auto lo = std::lower_bound(first, last, range.begin);
        const auto hi = std::lower_bound(lo, last, range.end);
        if (lo == hi) {
            throw Error(ErrorCode::EmptySegment,
                        std::string(segment_name(segment)) + " segment contains no usable rows");
        }
        return DatasetView(dataset, static_cast<std::size_t>(lo - ts.begin()),
                           static_cast<std::size_t>(hi - ts.begin()));
    };
    return {make_view(ranges.train, Segment::Train), make_view(ranges.backtest, Segment::Backtest),
            make_view(ranges.forward, Segment::Forward)};
}

std::string features_csv(const LabeledDataset& dataset) {
    const auto& frame = dataset.frame;
    std::string out = "timestamp";
    for (const auto& name : frame.feature_names) {
        out += ',' + name;
    }
    out += ",class_target,reg_target\n";
    for (std::size_t t = frame.valid_from; t < frame.size(); ++t) {
        out += std::to_string(frame.timestamps[t]);
        for (double v : frame.rows.row(t)) {
            out.push_back(',');
            append_real(out, v);
        }
        out.push_back(',');
        if (std::isfinite(dataset.reg_target[t])) {
            out += dataset.class_target[t] == Direction::Up ? "up" : "down";
        }
        out.push_back(',');
        append_real(out, dataset.reg_target[t]);
        out.push_back('\n');
    }
    return out;
}

}  // namespace wfbt
