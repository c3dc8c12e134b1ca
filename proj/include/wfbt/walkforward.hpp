#pragma once

#include "wfbt/dataset.hpp"
#include "wfbt/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wfbt {

enum class WalkForwardMode { Trailing, Global };

std::string_view mode_name(WalkForwardMode mode) noexcept;
WalkForwardMode parse_mode(std::string_view name);

struct WalkForwardConfig {
    /// Training rows per fit, counted in candle intervals.
    std::size_t window = 7;
    WalkForwardMode mode = WalkForwardMode::Trailing;
    /// Refit every `retrain_stride` evaluations; the rows in between reuse
    /// the latest model.
    std::size_t retrain_stride = 1;

    void validate() const;
};

struct PredictionRecord {
    std::int64_t timestamp = 0;
    std::size_t index = 0;  // row in the parent dataset
    Direction direction = Direction::Down;
    double score = 0.0;
    double value = kUndefined;  // regressors only
    Direction realized_class = Direction::Down;
    double realized_return = 0.0;  // next-period log return
    std::size_t train_begin = 0;   // rows [train_begin, train_end) fitted the model
    std::size_t train_end = 0;
};

struct PredictionSeries {
    Task task = Task::Classifier;
    std::vector<PredictionRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
};

/// Trailing mode fits on the `window` rows before each evaluated row and
/// predicts that row; evaluation starts at the first row with a full window
/// of usable history. Global mode fits once on `training` (required) and
/// predicts every row of `view`.
PredictionSeries run_walkforward(const DatasetView& view, const ModelSpec& spec, const WalkForwardConfig& config,
                                 const DatasetView* training = nullptr);

/// Per-step exposure in {-1, 0, +1}.
struct PositionSeries {
    std::vector<std::int64_t> timestamps;
    std::vector<int> positions;

    std::size_t size() const noexcept { return positions.size(); }
};

/// Classifiers are always in the market. Regressors go long above
/// `threshold`, short below -threshold and otherwise keep the previous
/// position, starting flat.
PositionSeries signal_from_predictions(const PredictionSeries& predictions, Task task, double threshold = 0.0);

/// `timestamp,direction,score,value,realized_class,realized_return`
std::string predictions_csv(const PredictionSeries& predictions);

}  // namespace wfbt
