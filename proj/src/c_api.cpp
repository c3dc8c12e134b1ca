#include "wfbt/wfbt.h"

#include "wfbt/app.hpp"
#include "wfbt/error.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct wfbt_run {
    wfbt::RunArtifact artifact;
};

namespace {

thread_local std::string g_last_error;

wfbt_status status_of(wfbt::ErrorCategory category) {
    switch (category) {
        case wfbt::ErrorCategory::Config: return WFBT_ERR_CONFIG;
        case wfbt::ErrorCategory::Data: return WFBT_ERR_DATA;
        case wfbt::ErrorCategory::Engine: return WFBT_ERR_ENGINE;
    }
    return WFBT_ERR_ENGINE;
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

template <typename F>
wfbt_status guarded(F&& body) {
    g_last_error.clear();
    try {
        body();
        return WFBT_OK;
    } catch (const wfbt::Error& e) {
        g_last_error = e.what();
        return status_of(e.category());
    } catch (const std::exception& e) {
        g_last_error = std::string("internal error: ") + e.what();
        return WFBT_ERR_ENGINE;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) {
        throw wfbt::Error(wfbt::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
    }
}

wfbt::RunConfig config_from(const char* json) {
    require(json, "config_json");
    return wfbt::parse_run_config(json);
}

}  // namespace

extern "C" {

const char* wfbt_version(void) { return wfbt::kEngineVersion.data(); }

const char* wfbt_last_error(void) { return g_last_error.c_str(); }

void wfbt_free_string(char* s) { std::free(s); }

wfbt_status wfbt_config_normalize(const char* config_json, char** out_json) {
    return guarded([&] {
        require(out_json, "out_json");
        *out_json = dup_string(wfbt::serialize_run_config(config_from(config_json)));
    });
}

wfbt_status wfbt_ingest(const char* config_json, char** out_csv) {
    return guarded([&] {
        require(out_csv, "out_csv");
        *out_csv = dup_string(wfbt::serialize_candles_csv(wfbt::load_candles(config_from(config_json))));
    });
}

wfbt_status wfbt_features(const char* config_json, char** out_csv) {
    return guarded([&] {
        require(out_csv, "out_csv");
        const auto config = config_from(config_json);
        const auto dataset = wfbt::build_dataset(wfbt::load_candles(config), config.indicators);
        *out_csv = dup_string(wfbt::features_csv(*dataset));
    });
}

wfbt_status wfbt_indicator(const char* config_json, const char* name, char** out_csv) {
    return guarded([&] {
        require(name, "name");
        require(out_csv, "out_csv");
        const auto config = config_from(config_json);
        *out_csv = dup_string(wfbt::indicator_csv(wfbt::load_candles(config), config.indicators, name));
    });
}

wfbt_status wfbt_tune(const char* config_json, const char* model, size_t window, char** out_trials_jsonl,
                      char** out_best_json) {
    return guarded([&] {
        require(model, "model");
        auto config = config_from(config_json);
        wfbt::ModelKind kind;
        try {
            kind = wfbt::parse_kind(model);
        } catch (const wfbt::Error& e) {
            throw wfbt::Error(wfbt::ErrorCode::InvalidArgument, e.detail());
        }
        if (window < 1) {
            throw wfbt::Error(wfbt::ErrorCode::InvalidArgument, "window must be >= 1");
        }
        auto tuner = config.tuner.value_or(wfbt::TunerConfig{.seed = config.seed});
        tuner.threads = config.threads;
        const auto dataset = wfbt::build_dataset(wfbt::load_candles(config), config.indicators);
        wfbt::SegmentViews views;
        try {
            views = wfbt::split(dataset, config.split);
        } catch (const wfbt::Error& e) {
            throw e.with_context("split");
        }
        wfbt::TunerResult study;
        try {
            study = wfbt::run_study(kind, config.walkforward(window), views, config.eval_options(), tuner);
        } catch (const wfbt::Error& e) {
            throw e.with_context("tune");
        }
        const std::string trials = wfbt::trials_jsonl({&study, 1});
        const std::string best = wfbt::best_trial_json(study);
        if (out_trials_jsonl != nullptr) {
            *out_trials_jsonl = dup_string(trials);
        }
        if (out_best_json != nullptr) {
            *out_best_json = dup_string(best);
        }
    });
}

wfbt_status wfbt_run_experiment(const char* config_json, wfbt_run** out_run) {
    return guarded([&] {
        require(out_run, "out_run");
        *out_run = nullptr;
        auto run = std::make_unique<wfbt_run>();
        run->artifact = wfbt::run_experiment(config_from(config_json), true);
        *out_run = run.release();
    });
}

wfbt_status wfbt_run_open(const char* run_dir, wfbt_run** out_run) {
    return guarded([&] {
        require(run_dir, "run_dir");
        require(out_run, "out_run");
        *out_run = nullptr;
        auto run = std::make_unique<wfbt_run>();
        run->artifact = wfbt::load_run(run_dir);
        *out_run = run.release();
    });
}

void wfbt_run_free(wfbt_run* run) { delete run; }

const char* wfbt_run_dir(const wfbt_run* run) { return run == nullptr ? "" : run->artifact.run_dir.c_str(); }

size_t wfbt_run_report_count(const wfbt_run* run) { return run == nullptr ? 0 : run->artifact.reports.size(); }

wfbt_status wfbt_run_report_json(const wfbt_run* run, char** out_json) {
    return guarded([&] {
        require(run, "run");
        require(out_json, "out_json");
        *out_json = dup_string(wfbt::report_json(run->artifact));
    });
}

wfbt_status wfbt_run_table(const wfbt_run* run, const char* task, char** out_text) {
    return guarded([&] {
        require(run, "run");
        require(task, "task");
        require(out_text, "out_text");
        const std::string t(task);
        if (t != "classifier" && t != "regressor") {
            throw wfbt::Error(wfbt::ErrorCode::UnknownSelector, "task must be classifier or regressor");
        }
        const auto want = t == "classifier" ? wfbt::Task::Classifier : wfbt::Task::Regressor;
        std::vector<wfbt::EvalReport> rows;
        for (const auto& r : run->artifact.reports) {
            if (r.task == want) {
                rows.push_back(r);
            }
        }
        *out_text = dup_string(wfbt::emit_table(rows, want));
    });
}

wfbt_status wfbt_run_export_equity(const wfbt_run* run, const char* model, size_t window, const char* segment,
                                   char** out_csv) {
    return guarded([&] {
        require(run, "run");
        require(model, "model");
        require(segment, "segment");
        require(out_csv, "out_csv");
        wfbt::ModelKind kind;
        try {
            kind = wfbt::parse_kind(model);
        } catch (const wfbt::Error& e) {
            throw wfbt::Error(wfbt::ErrorCode::UnknownSelector, e.detail());
        }
        *out_csv = dup_string(wfbt::export_equity(run->artifact, kind, window, wfbt::parse_segment(segment)));
    });
}

}  // extern "C"
