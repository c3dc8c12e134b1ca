#pragma once

#include "wfbt/evaluation.hpp"
#include "wfbt/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wfbt {

struct TunerConfig {
    std::size_t n_trials = 100;
    std::uint64_t seed = 0;
    Segment objective_segment = Segment::Backtest;
    std::size_t threads = 1;

    void validate() const;
};

struct Trial {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Params params;
    double objective = 0.0;  // PNL % on the objective segment; -inf on failure
    std::optional<EvalReport> report;
    std::string error;

    bool failed() const noexcept { return report == std::nullopt; }
};

struct TunerResult {
    ModelKind kind = ModelKind::LogisticC;
    std::size_t window = 0;
    std::vector<Trial> trials;  // index order
    std::size_t best_index = 0;

    const Trial& best() const { return trials.at(best_index); }
};

/// Per-trial seed derived from the study seed.
std::uint64_t trial_seed(std::uint64_t study_seed, std::size_t trial_index);

/// One independent draw per dimension, keyed by (trial_seed, dimension
/// index); log-uniform dimensions are uniform in log space.
Params sample_params(const HyperParamSpace& space, std::uint64_t trial_seed);

/// Random search maximizing PNL % on the objective segment. Failed trials
/// score -inf and keep their error text; ties go to the lowest index.
/// Throws AllTrialsFailed.
TunerResult run_study(ModelKind kind, const WalkForwardConfig& walkforward, const SegmentViews& data,
                      const EvalOptions& options, const TunerConfig& config);

/// Index of the best trial under the max-objective, lowest-index rule.
std::size_t select_best(const std::vector<Trial>& trials);

}  // namespace wfbt
