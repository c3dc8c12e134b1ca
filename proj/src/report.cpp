#include "wfbt/app.hpp"

#include "wfbt/error.hpp"
#include "json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>

namespace wfbt {

using nlohmann::json;

namespace detail {

json params_to_json(const Params& params) {
    json j = json::object();
    for (const auto& [name, value] : params) {
        std::visit([&](const auto& v) { j[name] = v; }, value);
    }
    return j;
}

Params params_from_json(const json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidConfig, "params must be a JSON object");
    }
    Params out;
    for (const auto& [name, v] : j.items()) {
        if (v.is_number_integer()) {
            out.emplace(name, v.get<std::int64_t>());
        } else if (v.is_number_float()) {
            out.emplace(name, v.get<double>());
        } else if (v.is_string()) {
            out.emplace(name, v.get<std::string>());
        } else if (v.is_boolean()) {
            out.emplace(name, std::string(v.get<bool>() ? "true" : "false"));
        } else {
            throw Error(ErrorCode::InvalidConfig, "param '" + name + "' must be a number, string or boolean");
        }
    }
    return out;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<double>();
}

}  // namespace

json report_to_json(const EvalReport& r) {
    json j = {{"model", kind_name(r.kind)},
              {"task", task_name(r.task)},
              {"window", r.window},
              {"segment", segment_name(r.segment)},
              {"params", params_to_json(r.params)},
              {"pnl_percent", r.pnl_percent},
              {"sharpe", optional_json(r.sharpe)},
              {"r2", optional_json(r.r2)},
              {"n_trades", r.n_trades},
              {"n_predictions", r.n_predictions}};
    if (r.task == Task::Classifier) {
        j["accuracy"] = r.accuracy;
        j["precision"] = r.precision;
        j["recall"] = r.recall;
        j["f1"] = r.f1;
    } else {
        j["mae"] = r.mae;
        j["mse"] = r.mse;
        j["rmse"] = r.rmse;
    }
    return j;
}

EvalReport report_from_json(const json& j) {
    try {
        EvalReport r;
        r.kind = parse_kind(j.at("model").get<std::string>());
        r.task = task_of(r.kind);
        r.window = j.at("window").get<std::size_t>();
        r.segment = parse_segment(j.at("segment").get<std::string>());
        r.params = params_from_json(j.at("params"));
        r.pnl_percent = j.at("pnl_percent").get<double>();
        r.sharpe = optional_from(j, "sharpe");
        r.r2 = optional_from(j, "r2");
        r.n_trades = j.at("n_trades").get<std::size_t>();
        r.n_predictions = j.at("n_predictions").get<std::size_t>();
        r.accuracy = j.value("accuracy", 0.0);
        r.precision = j.value("precision", 0.0);
        r.recall = j.value("recall", 0.0);
        r.f1 = j.value("f1", 0.0);
        r.mae = j.value("mae", 0.0);
        r.mse = j.value("mse", 0.0);
        r.rmse = j.value("rmse", 0.0);
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedPayload, std::string("report entry: ") + e.what());
    }
}

EquityCurve parse_equity_csv(std::string_view text) {
    EquityCurve curve;
    std::size_t pos = text.find('\n');
    if (pos == std::string_view::npos || text.substr(0, pos) != "timestamp,equity_fraction") {
        throw Error(ErrorCode::MalformedPayload, "equity CSV header must be timestamp,equity_fraction");
    }
    ++pos;
    double previous = 0.0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        std::int64_t ts = 0;
        double eq = 0.0;
        const auto a = std::from_chars(line.data(), line.data() + comma, ts);
        const auto b = comma == std::string_view::npos
                           ? std::from_chars_result{nullptr, std::errc::invalid_argument}
                           : std::from_chars(line.data() + comma + 1, line.data() + line.size(), eq);
        if (a.ec != std::errc() || b.ec != std::errc() || b.ptr != line.data() + line.size()) {
            throw Error(ErrorCode::MalformedPayload, "bad equity row '" + std::string(line) + "'");
        }
        curve.timestamps.push_back(ts);
        curve.step_returns.push_back(eq - previous);
        curve.equity.push_back(eq);
        previous = eq;
    }
    return curve;
}

}  // namespace detail

std::string report_json(const RunArtifact& artifact) {
    json reports = json::array();
    for (const auto& r : artifact.reports) {
        reports.push_back(detail::report_to_json(r));
    }
    json j = {{"engine_version", artifact.engine_version},
              {"config_hash", config_hash(artifact.config)},
              {"classifier_r2", "R^2 of the equity curve's least-squares trend line"},
              {"regressor_r2", "R^2 of predicted vs realized next-step log return"},
              {"reports", reports}};
    return j.dump(2) + "\n";
}

namespace {

json trial_json(const TunerResult& study, const Trial& t) {
    json j = {{"model", kind_name(study.kind)},
              {"window", study.window},
              {"index", t.index},
              {"seed", t.seed},
              {"params", detail::params_to_json(t.params)},
              {"objective", t.failed() ? json(nullptr) : json(t.objective)}};
    if (!t.error.empty()) {
        j["error"] = t.error;
    }
    return j;
}

}  // namespace

std::string trials_jsonl(std::span<const TunerResult> studies) {
    std::string out;
    for (const auto& study : studies) {
        for (const auto& t : study.trials) {
            out += trial_json(study, t).dump();
            out.push_back('\n');
        }
    }
    return out;
}

std::string best_trial_json(const TunerResult& study) {
    const auto& best = study.best();
    json j = trial_json(study, best);
    if (best.report) {
        j["report"] = detail::report_to_json(*best.report);
    }
    return j.dump(2) + "\n";
}

std::vector<std::string> table_columns(Task task) {
    std::vector<std::string> metrics;
    if (task == Task::Classifier) {
        metrics = {"PNL (%)", "Sharpe", "R2", "Accuracy", "F1 score", "Precision", "Recall", "No. of Trades"};
    } else {
        metrics = {"PNL (%)", "Sharpe", "R2", "MAE", "MSE", "RMSE", "No. of Trades"};
    }
    std::vector<std::string> cols{task == Task::Classifier ? "Classifier" : "Regressor", "Rolling window"};
    for (int block = 0; block < 2; ++block) {
        cols.insert(cols.end(), metrics.begin(), metrics.end());
    }
    return cols;
}

namespace {

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, v);
    return buf;
}

std::string fixed(const std::optional<double>& v, int places) { return v ? fixed(*v, places) : "n/a"; }

std::vector<std::string> metric_cells(const EvalReport* r, Task task) {
    const std::size_t n = task == Task::Classifier ? 8 : 7;
    if (r == nullptr) {
        return std::vector<std::string>(n, "n/a");
    }
    std::vector<std::string> cells{fixed(r->pnl_percent, 2), fixed(r->sharpe, 2), fixed(r->r2, 2)};
    if (task == Task::Classifier) {
        cells.push_back(fixed(r->accuracy, 2));
        cells.push_back(fixed(r->f1, 2));
        cells.push_back(fixed(r->precision, 2));
        cells.push_back(fixed(r->recall, 2));
    } else {
        cells.push_back(fixed(r->mae, 4));
        cells.push_back(fixed(r->mse, 4));
        cells.push_back(fixed(r->rmse, 4));
    }
    cells.push_back(std::to_string(r->n_trades));
    return cells;
}

struct TableRow {
    ModelKind kind;
    std::size_t window;
    const EvalReport* backtest = nullptr;
    const EvalReport* forward = nullptr;
};

}  // namespace

std::string emit_table(std::span<const EvalReport> reports, Task task) {
    for (const auto& r : reports) {
        if (r.task != task) {
            throw Error(ErrorCode::MixedTasks, std::string(kind_name(r.kind)) + " is not a " +
                                                   std::string(task_name(task)));
        }
    }

    // Best window per model by backtest PNL; ties go to the smaller window.
    std::vector<TableRow> rows;
    for (const auto& r : reports) {
        if (r.segment != Segment::Backtest) {
            continue;
        }
        auto it = std::find_if(rows.begin(), rows.end(), [&](const TableRow& row) { return row.kind == r.kind; });
        if (it == rows.end()) {
            rows.push_back({r.kind, r.window, &r, nullptr});
        } else if (r.pnl_percent > it->backtest->pnl_percent ||
                   (r.pnl_percent == it->backtest->pnl_percent && r.window < it->window)) {
            it->window = r.window;
            it->backtest = &r;
        }
    }
    for (auto& row : rows) {
        for (const auto& r : reports) {
            if (r.segment == Segment::Forward && r.kind == row.kind && r.window == row.window) {
                row.forward = &r;
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) { return a.kind < b.kind; });

    std::size_t best_bt = rows.size();
    std::size_t best_fw = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (best_bt == rows.size() || rows[i].backtest->pnl_percent > rows[best_bt].backtest->pnl_percent) {
            best_bt = i;
        }
        if (rows[i].forward != nullptr &&
            (best_fw == rows.size() || rows[i].forward->pnl_percent > rows[best_fw].forward->pnl_percent)) {
            best_fw = i;
        }
    }

    const auto columns = table_columns(task);
    const std::size_t block = task == Task::Classifier ? 8 : 7;
    std::vector<std::vector<std::string>> grid;
    grid.push_back(columns);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string name(kind_name(rows[i].kind));
        if (i == best_bt) name += " *";
        if (i == best_fw) name += " +";
        std::vector<std::string> line{name, std::to_string(rows[i].window)};
        const auto bt = metric_cells(rows[i].backtest, task);
        const auto fw = metric_cells(rows[i].forward, task);
        line.insert(line.end(), bt.begin(), bt.end());
        line.insert(line.end(), fw.begin(), fw.end());
        grid.push_back(std::move(line));
    }

    std::vector<std::size_t> width(columns.size(), 0);
    for (const auto& line : grid) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            width[c] = std::max(width[c], line[c].size());
        }
    }
    const std::string sep = " | ";
    auto pad = [](const std::string& s, std::size_t w, bool left) {
        const std::string fill(w - std::min(w, s.size()), ' ');
        return left ? s + fill : fill + s;
    };
    auto render = [&](const std::vector<std::string>& line) {
        std::string out;
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c > 0) out += sep;
            out += pad(line[c], width[c], c == 0);
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        return out + "\n";
    };

    std::size_t lead = width[0] + sep.size() + width[1];
    std::size_t block_width = 0;
    for (std::size_t c = 2; c < 2 + block; ++c) {
        block_width += width[c] + sep.size();
    }
    block_width -= sep.size();
    std::string header = std::string(lead, ' ') + sep + pad("Backtest", block_width, true) + sep + "Forwardtest";
    std::string out = header + "\n" + render(grid[0]);
    std::string rule;
    for (std::size_t c = 0; c < width.size(); ++c) {
        if (c > 0) rule += "-+-";
        rule += std::string(width[c], '-');
    }
    out += rule + "\n";
    for (std::size_t i = 1; i < grid.size(); ++i) {
        out += render(grid[i]);
    }
    out += "* best backtest PNL, + best forward-test PNL; R2: " +
           std::string(task == Task::Classifier ? "equity-curve trend fit" : "predicted vs realized return") + "\n";
    return out;
}

}  // namespace wfbt
