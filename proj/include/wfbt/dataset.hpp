#pragma once

#include "wfbt/indicators.hpp"
#include "wfbt/ingest.hpp"
#include "wfbt/types.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wfbt {

/// Non-owning row-major matrix.
struct MatrixView {
    std::span<const double> values;
    std::size_t cols = 0;

    std::size_t rows() const noexcept { return cols == 0 ? 0 : values.size() / cols; }
    std::span<const double> row(std::size_t i) const { return values.subspan(i * cols, cols); }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Owning row-major matrix.
struct RowMatrix {
    std::size_t cols = 0;
    std::vector<double> values;

    RowMatrix() = default;
    RowMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : cols(cols), values(rows * cols, fill) {}

    std::size_t rows() const noexcept { return cols == 0 ? 0 : values.size() / cols; }
    std::span<double> row(std::size_t i) { return std::span<double>(values).subspan(i * cols, cols); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * cols, cols);
    }
    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

    MatrixView view() const { return {values, cols}; }
    MatrixView view(std::size_t first_row, std::size_t count) const {
        return {std::span<const double>(values).subspan(first_row * cols, count * cols), cols};
    }
};

/// log(close[t]) - log(close[t-1]); index 0 is undefined.
struct ReturnSeries {
    std::vector<double> values;
    std::size_t warmup_len = 1;

    std::size_t size() const noexcept { return values.size(); }
};

struct FeatureFrame {
    std::vector<std::string> feature_names;
    std::vector<std::int64_t> timestamps;
    RowMatrix rows;  // NaN before valid_from
    std::size_t valid_from = 0;

    std::size_t size() const noexcept { return timestamps.size(); }
    std::size_t width() const noexcept { return feature_names.size(); }
};

/// Row t carries the features known at the close of t and, as targets, the
/// log return realized over (t, t+1].
struct LabeledDataset {
    FeatureFrame frame;
    std::vector<Direction> class_target;
    std::vector<double> reg_target;
    std::size_t usable_begin = 0;  // == frame.valid_from
    std::size_t usable_end = 0;    // exclusive; the last row has no target

    std::size_t size() const noexcept { return frame.size(); }
    std::size_t width() const noexcept { return frame.width(); }
    std::size_t usable_size() const noexcept { return usable_end > usable_begin ? usable_end - usable_begin : 0; }
};

/// Half-open [begin, end) in epoch seconds.
struct TimeRange {
    std::int64_t begin = std::numeric_limits<std::int64_t>::min();
    std::int64_t end = std::numeric_limits<std::int64_t>::max();

    bool contains(std::int64_t ts) const noexcept { return ts >= begin && ts < end; }
    friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

struct SegmentSplit {
    TimeRange train;
    TimeRange backtest;
    TimeRange forward;

    /// Train through January 2023, backtest February-July 2023, forward
    /// August-October 2023.
    static SegmentSplit calendar_default();

    /// Throws InvalidSplit unless the ranges are non-empty, disjoint and
    /// ordered train < backtest < forward.
    void validate() const;

    friend bool operator==(const SegmentSplit&, const SegmentSplit&) = default;
};

enum class Segment { Train, Backtest, Forward };

std::string_view segment_name(Segment s) noexcept;
Segment parse_segment(std::string_view name);

/// A contiguous range of usable rows of a shared parent dataset. Evaluation
/// iterates [begin, end); training may reach back into the parent's earlier
/// usable rows.
class DatasetView {
public:
    DatasetView() = default;
    DatasetView(std::shared_ptr<const LabeledDataset> parent, std::size_t begin, std::size_t end);

    const LabeledDataset& parent() const { return *parent_; }
    const std::shared_ptr<const LabeledDataset>& parent_ptr() const { return parent_; }
    std::size_t begin() const noexcept { return begin_; }
    std::size_t end() const noexcept { return end_; }
    std::size_t size() const noexcept { return end_ - begin_; }
    bool empty() const noexcept { return begin_ == end_; }

    /// Number of usable parent rows strictly before `index`.
    std::size_t history_available(std::size_t index) const;

    /// The `count` rows immediately preceding `index`; throws
    /// InsufficientHistory when fewer usable rows exist.
    MatrixView rows_before(std::size_t index, std::size_t count) const;

private:
    std::shared_ptr<const LabeledDataset> parent_;
    std::size_t begin_ = 0;
    std::size_t end_ = 0;
};

struct SegmentViews {
    DatasetView train;
    DatasetView backtest;
    DatasetView forward;

    const DatasetView& get(Segment s) const;
};

ReturnSeries log_diff(const CandleSeries& series);

/// Stationary feature encoding, in this column order:
/// logret, ad_diff, mfi, bb_percent_b, bb_bandwidth, kc_width, sar_side.
FeatureFrame build_features(const CandleSeries& series, const IndicatorConfig& config);

const std::vector<std::string>& feature_names();

/// Zero next-period returns are labeled Down.
LabeledDataset label(FeatureFrame frame, const ReturnSeries& returns);

SegmentViews split(std::shared_ptr<const LabeledDataset> dataset, const SegmentSplit& split);

/// `timestamp,<features...>,class_target,reg_target` from valid_from on.
/// Undefined values are written as empty fields.
std::string features_csv(const LabeledDataset& dataset);

}  // namespace wfbt
