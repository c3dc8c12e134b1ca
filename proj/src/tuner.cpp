#include "wfbt/tuner.hpp"

#include "wfbt/error.hpp"
#include "wfbt/parallel.hpp"
#include "wfbt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wfbt {

void TunerConfig::validate() const {
    if (n_trials < 1) {
        throw Error(ErrorCode::InvalidConfig, "n_trials must be >= 1");
    }
}

std::uint64_t trial_seed(std::uint64_t study_seed, std::size_t trial_index) {
    return hash_combine(study_seed, static_cast<std::uint64_t>(trial_index));
}

Params sample_params(const HyperParamSpace& space, std::uint64_t seed) {
    Params out;
    for (std::size_t d = 0; d < space.dimensions.size(); ++d) {
        const auto& dim = space.dimensions[d];
        const auto& dist = dim.distribution;
        const double u = unit_interval(hash_combine(seed, d));
        switch (dist.type) {
            case Distribution::Type::Uniform:
                out.emplace(dim.name, dist.lo + u * (dist.hi - dist.lo));
                break;
            case Distribution::Type::LogUniform: {
                const double lo = std::log(dist.lo);
                const double hi = std::log(dist.hi);
                out.emplace(dim.name, std::clamp(std::exp(lo + u * (hi - lo)), dist.lo, dist.hi));
                break;
            }
            case Distribution::Type::Int: {
                const auto lo = static_cast<std::int64_t>(dist.lo);
                const auto hi = static_cast<std::int64_t>(dist.hi);
                const auto span = static_cast<double>(hi - lo + 1);
                out.emplace(dim.name, std::min(hi, lo + static_cast<std::int64_t>(std::floor(u * span))));
                break;
            }
            case Distribution::Type::Categorical: {
                const auto n = dist.choices.size();
                const auto i = std::min(n - 1, static_cast<std::size_t>(std::floor(u * static_cast<double>(n))));
                out.emplace(dim.name, dist.choices[i]);
                break;
            }
        }
    }
    return out;
}

std::size_t select_best(const std::vector<Trial>& trials) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < trials.size(); ++i) {
        if (trials[i].objective > trials[best].objective) {
            best = i;
        }
    }
    return best;
}

TunerResult run_study(ModelKind kind, const WalkForwardConfig& walkforward, const SegmentViews& data,
                      const EvalOptions& options, const TunerConfig& config) {
    config.validate();
    walkforward.validate();
    const auto space = default_space(kind);
    const auto& view = data.get(config.objective_segment);
    const DatasetView* training = walkforward.mode == WalkForwardMode::Global ? &data.train : nullptr;

    TunerResult result;
    result.kind = kind;
    result.window = walkforward.window;
    result.trials.resize(config.n_trials);

    parallel_for(config.n_trials, config.threads, [&](std::size_t i) {
        Trial& trial = result.trials[i];
        trial.index = i;
        trial.seed = trial_seed(config.seed, i);
        trial.objective = -std::numeric_limits<double>::infinity();
        try {
            trial.params = sample_params(space, trial.seed);
            const ModelSpec spec{kind, trial.params, trial.seed};
            auto ev = evaluate_segment(view, config.objective_segment, spec, walkforward, options, training);
            trial.objective = ev.report.pnl_percent;
            trial.report = std::move(ev.report);
        } catch (const Error& e) {
            trial.error = e.what();
        }
    });

    result.best_index = select_best(result.trials);
    if (result.best().failed()) {
        throw Error(ErrorCode::AllTrialsFailed, std::string(kind_name(kind)) + " window " +
                                                    std::to_string(walkforward.window) + ": " +
                                                    result.trials.front().error);
    }
    return result;
}

}  // namespace wfbt
