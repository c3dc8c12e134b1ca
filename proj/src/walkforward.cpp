#include "wfbt/walkforward.hpp"

#include "wfbt/error.hpp"

#include <charconv>
#include <cmath>
#include <optional>

namespace wfbt {

namespace {

void append_real(std::string& out, double v) {
    if (!std::isfinite(v)) {
        return;
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

const char* direction_text(Direction d) { return d == Direction::Up ? "up" : "down"; }

TrainedModel fit_rows(const ModelSpec& spec, const LabeledDataset& data, std::size_t begin, std::size_t end) {
    const auto x = data.frame.rows.view(begin, end - begin);
    if (task_of(spec.kind) == Task::Classifier) {
        return fit(spec, x, std::span<const Direction>(data.class_target).subspan(begin, end - begin));
    }
    return fit(spec, x, std::span<const double>(data.reg_target).subspan(begin, end - begin));
}

}  // namespace

std::string_view mode_name(WalkForwardMode mode) noexcept {
    return mode == WalkForwardMode::Trailing ? "trailing" : "global";
}

WalkForwardMode parse_mode(std::string_view name) {
    if (name == "trailing") return WalkForwardMode::Trailing;
    if (name == "global") return WalkForwardMode::Global;
    throw Error(ErrorCode::InvalidConfig, "unknown walk-forward mode '" + std::string(name) + "'");
}

void WalkForwardConfig::validate() const {
    if (window < 1 || retrain_stride < 1) {
        throw Error(ErrorCode::InvalidConfig, "window and retrain_stride must be >= 1");
    }
}

PredictionSeries run_walkforward(const DatasetView& view, const ModelSpec& spec, const WalkForwardConfig& config,
                                 const DatasetView* training) {
    config.validate();
    const auto& data = view.parent();
    const auto task = task_of(spec.kind);
    PredictionSeries out;
    out.task = task;

    std::size_t first = view.begin();
    std::optional<TrainedModel> model;
    std::size_t fit_begin = 0;
    std::size_t fit_end = 0;

    if (config.mode == WalkForwardMode::Global) {
        if (training == nullptr || training->empty()) {
            throw Error(ErrorCode::InsufficientHistory, "global mode needs a non-empty training segment");
        }
        if (training->parent_ptr() != view.parent_ptr() || training->end() > view.begin()) {
            throw Error(ErrorCode::InvalidSplit, "training segment must precede the evaluated view");
        }
        fit_begin = training->begin();
        fit_end = training->end();
        model = fit_rows(spec, data, fit_begin, fit_end);
    } else {
        const auto earliest = data.usable_begin + config.window;
        first = std::max(first, earliest);
        if (first >= view.end()) {
            throw Error(ErrorCode::InsufficientHistory,
                        "window " + std::to_string(config.window) + " leaves no evaluable row in [" +
                            std::to_string(view.begin()) + ", " + std::to_string(view.end()) + ")");
        }
    }

    out.records.reserve(view.end() - first);
    std::size_t since_fit = 0;
    for (std::size_t t = first; t < view.end(); ++t) {
        if (config.mode == WalkForwardMode::Trailing && (!model || since_fit == config.retrain_stride)) {
            fit_begin = t - config.window;
            fit_end = t;
            model = fit_rows(spec, data, fit_begin, fit_end);
            since_fit = 0;
        }
        ++since_fit;

        PredictionRecord rec;
        rec.timestamp = data.frame.timestamps[t];
        rec.index = t;
        rec.realized_class = data.class_target[t];
        rec.realized_return = data.reg_target[t];
        rec.train_begin = fit_begin;
        rec.train_end = fit_end;
        const auto x = data.frame.rows.row(t);
        if (task == Task::Classifier) {
            const auto p = predict_class(*model, x);
            rec.direction = p.direction;
            rec.score = p.score;
        } else {
            rec.value = predict_value(*model, x);
            rec.score = rec.value;
            rec.direction = rec.value > 0.0 ? Direction::Up : Direction::Down;
        }
        out.records.push_back(rec);
    }
    return out;
}

PositionSeries signal_from_predictions(const PredictionSeries& predictions, Task task, double threshold) {
    if (!(threshold >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
    }
    PositionSeries out;
    out.timestamps.reserve(predictions.size());
    out.positions.reserve(predictions.size());
    int position = 0;
    for (const auto& rec : predictions.records) {
        if (task == Task::Classifier) {
            position = rec.direction == Direction::Up ? 1 : -1;
        } else if (rec.value > threshold) {
            position = 1;
        } else if (rec.value < -threshold) {
            position = -1;
        }
        out.timestamps.push_back(rec.timestamp);
        out.positions.push_back(position);
    }
    return out;
}

std::string predictions_csv(const PredictionSeries& predictions) {
    std::string out = "timestamp,direction,score,value,realized_class,realized_return\n";
    for (const auto& r : predictions.records) {
        out += std::to_string(r.timestamp);
        out.push_back(',');
        out += direction_text(r.direction);
        out.push_back(',');
        append_real(out, r.score);
        out.push_back(',');
        append_real(out, r.value);
        out.push_back(',');
        out += direction_text(r.realized_class);
        out.push_back(',');
        append_real(out, r.realized_return);
        out.push_back('\n');
    }
    return out;
}

}  // namespace wfbt
