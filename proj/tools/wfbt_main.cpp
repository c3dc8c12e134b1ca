#include "wfbt/wfbt.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct Overrides {
    std::string config_path;
    std::string csv;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> models;
    std::vector<std::size_t> windows;
    std::optional<double> fee_bps;
    std::string mode;
    std::string out;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> trials;
};

struct Failure {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Failure{WFBT_ERR_CONFIG, "cannot read " + path};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string build_config(const Overrides& o) {
    json j = json::object();
    if (!o.config_path.empty()) {
        try {
            j = json::parse(read_file(o.config_path));
        } catch (const json::exception& e) {
            throw Failure{WFBT_ERR_CONFIG, o.config_path + ": " + e.what()};
        }
    }
    if (!o.csv.empty()) {
        j["data"] = {{"csv", o.csv}};
    }
    if (o.seed) j["seed"] = *o.seed;
    if (!o.models.empty()) j["models"] = o.models.size() == 1 && o.models[0] == "all" ? json("all") : json(o.models);
    if (!o.windows.empty()) j["windows"] = o.windows;
    if (o.fee_bps) j["fee_bps"] = *o.fee_bps;
    if (!o.mode.empty()) j["mode"] = o.mode;
    if (!o.out.empty()) j["out"] = o.out;
    if (o.threads) j["threads"] = *o.threads;
    if (o.trials) {
        json tuner = j.contains("tuner") && j["tuner"].is_object() ? j["tuner"] : json::object();
        tuner["n_trials"] = *o.trials;
        j["tuner"] = tuner;
    }
    return j.dump();
}

void check(wfbt_status status) {
    if (status != WFBT_OK) {
        throw Failure{static_cast<int>(status), wfbt_last_error()};
    }
}

std::string take(char* s) {
    std::string out = s == nullptr ? "" : s;
    wfbt_free_string(s);
    return out;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw Failure{WFBT_ERR_CONFIG, "cannot write " + path};
    }
}

struct RunHandle {
    wfbt_run* run = nullptr;
    ~RunHandle() { wfbt_run_free(run); }
};

void print_tables(const wfbt_run* run) {
    for (const char* task : {"classifier", "regressor"}) {
        char* text = nullptr;
        check(wfbt_run_table(run, task, &text));
        std::cout << (std::string(task) == "classifier" ? "Classifiers\n" : "\nRegressors\n") << take(text);
    }
}

void add_data_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON run config");
    cmd->add_option("--csv", o.csv, "candle CSV file (overrides the config data source)");
}

void add_run_options(CLI::App* cmd, Overrides& o) {
    add_data_options(cmd, o);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--models", o.models, "model kinds or 'all'")->delimiter(',');
    cmd->add_option("--windows", o.windows, "rolling window sizes")->delimiter(',');
    cmd->add_option("--fee-bps", o.fee_bps, "fee per position change in basis points");
    cmd->add_option("--mode", o.mode, "walk-forward mode")->check(CLI::IsMember({"trailing", "global"}));
    cmd->add_option("--out", o.out, "output directory for runs");
    cmd->add_option("--threads", o.threads, "concurrent jobs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Walk-forward backtesting of ML trading signals on candle series"};
    app.set_version_flag("--version", std::string(wfbt_version()));
    app.require_subcommand(1);

    Overrides o;
    std::string output;
    std::string indicator;
    std::string model;
    std::size_t window = 0;
    std::string segment;
    std::string run_dir;
    std::string task;

    auto* ingest = app.add_subcommand("ingest", "validate candles and write canonical CSV");
    add_data_options(ingest, o);
    ingest->add_option("-o,--output", output, "output file (default stdout)");

    auto* features = app.add_subcommand("features", "dump the feature/label CSV or one indicator");
    add_data_options(features, o);
    features->add_option("--indicator", indicator, "single indicator instead of the feature frame");
    features->add_option("-o,--output", output, "output file (default stdout)");

    auto* run = app.add_subcommand("run", "full experiment; prints the run directory and tables");
    add_run_options(run, o);
    run->add_option("--trials", o.trials, "enable tuning with this many trials per (model, window)");

    auto* tune = app.add_subcommand("tune", "hyperparameter study for one model and window");
    add_run_options(tune, o);
    tune->add_option("--model", model, "model kind")->required();
    tune->add_option("--window", window, "rolling window")->required();
    tune->add_option("--trials", o.trials, "number of trials");
    tune->add_option("-o,--output", output, "write trials.jsonl here (best trial goes to stdout)");

    auto* report = app.add_subcommand("report", "re-render tables from a persisted run");
    report->add_option("--run", run_dir, "run directory")->required();
    report->add_option("--task", task, "classifier or regressor (default both)")
        ->check(CLI::IsMember({"classifier", "regressor"}));
    report->add_flag("--json", "print report.json instead of tables");

    auto* export_eq = app.add_subcommand("export-equity", "equity curve CSV for one run entry");
    export_eq->add_option("--run", run_dir, "run directory")->required();
    export_eq->add_option("--model", model, "model kind")->required();
    export_eq->add_option("--window", window, "rolling window")->required();
    export_eq->add_option("--segment", segment, "backtest or forward")->required();
    export_eq->add_option("-o,--output", output, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : WFBT_ERR_CONFIG;
    }

    try {
        if (ingest->parsed()) {
            char* csv = nullptr;
            check(wfbt_ingest(build_config(o).c_str(), &csv));
            emit(take(csv), output);
        } else if (features->parsed()) {
            char* csv = nullptr;
            const auto config = build_config(o);
            check(indicator.empty() ? wfbt_features(config.c_str(), &csv)
                                    : wfbt_indicator(config.c_str(), indicator.c_str(), &csv));
            emit(take(csv), output);
        } else if (run->parsed()) {
            RunHandle h;
            check(wfbt_run_experiment(build_config(o).c_str(), &h.run));
            std::cout << "run: " << wfbt_run_dir(h.run) << "\n\n";
            print_tables(h.run);
        } else if (tune->parsed()) {
            char* trials = nullptr;
            char* best = nullptr;
            check(wfbt_tune(build_config(o).c_str(), model.c_str(), window, &trials, &best));
            const auto trials_text = take(trials);
            const auto best_text = take(best);
            if (!output.empty()) {
                emit(trials_text, output);
            }
            std::cout << best_text;
        } else if (report->parsed()) {
            RunHandle h;
            check(wfbt_run_open(run_dir.c_str(), &h.run));
            if (report->count("--json") > 0) {
                char* text = nullptr;
                check(wfbt_run_report_json(h.run, &text));
                std::cout << take(text);
            } else if (!task.empty()) {
                char* text = nullptr;
                check(wfbt_run_table(h.run, task.c_str(), &text));
                std::cout << take(text);
            } else {
                print_tables(h.run);
            }
        } else if (export_eq->parsed()) {
            RunHandle h;
            check(wfbt_run_open(run_dir.c_str(), &h.run));
            char* csv = nullptr;
            check(wfbt_run_export_equity(h.run, model.c_str(), window, segment.c_str(), &csv));
            emit(take(csv), output);
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return 0;
}
