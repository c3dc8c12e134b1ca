#include "wfbt/error.hpp"
#include "wfbt/tuner.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>

using namespace wfbt;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no wfbt::Error thrown";
    return ErrorCode::InvalidArgument;
}

SegmentViews momentum_views() {
    const auto ds = fixture::momentum_dataset();
    return {DatasetView(ds, 0, 60), DatasetView(ds, 60, 140), DatasetView(ds, 140, 200)};
}

SegmentViews random_views(std::uint64_t seed) {
    const auto ds = fixture::random_dataset(150, 3, seed);
    return {DatasetView(ds, 0, 50), DatasetView(ds, 50, 100), DatasetView(ds, 100, 150)};
}

Trial trial(std::size_t index, double objective, bool ok = true) {
    Trial t;
    t.index = index;
    t.objective = objective;
    if (ok) t.report = EvalReport{};
    return t;
}

}  // namespace

TEST(Sampling, Deterministic) {
    for (auto kind : all_kinds()) {
        const auto space = default_space(kind);
        for (std::size_t i = 0; i < 20; ++i) {
            EXPECT_EQ(sample_params(space, trial_seed(42, i)), sample_params(space, trial_seed(42, i)));
        }
    }
    EXPECT_NE(trial_seed(42, 0), trial_seed(42, 1));
    EXPECT_NE(trial_seed(42, 0), trial_seed(43, 0));
}

TEST(Sampling, SamplesStayInBounds) {
    for (auto kind : all_kinds()) {
        const auto space = default_space(kind);
        for (std::size_t i = 0; i < 200; ++i) {
            const auto p = sample_params(space, trial_seed(7, i));
            for (const auto& d : space.dimensions) {
                ASSERT_TRUE(p.count(d.name)) << d.name;
                EXPECT_TRUE(d.distribution.contains(p.at(d.name))) << kind_name(kind) << " " << d.name;
            }
        }
    }
}

TEST(Sampling, DegenerateIntRange) {
    HyperParamSpace space{{{"n", Distribution::integer(3, 3)}}};
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_EQ(std::get<std::int64_t>(sample_params(space, trial_seed(1, i)).at("n")), 3);
    }
}

TEST(Sampling, LogUniformMedian) {
    HyperParamSpace space{{{"lr", Distribution::log_uniform(1e-4, 1.0)}}};
    std::vector<double> draws;
    for (std::size_t i = 0; i < 10000; ++i) draws.push_back(std::get<double>(sample_params(space, trial_seed(3, i)).at("lr")));
    std::nth_element(draws.begin(), draws.begin() + 5000, draws.end());
    const double median = draws[5000];
    EXPECT_GT(median, 1e-2 / 3.0);
    EXPECT_LT(median, 1e-2 * 3.0);
}

TEST(Study, SingleTrial) {
    const auto views = random_views(1);
    const auto r = run_study(ModelKind::RidgeR, {7}, views, {}, {1, 5});
    ASSERT_EQ(r.trials.size(), 1u);
    EXPECT_EQ(r.best_index, 0u);
    EXPECT_EQ(r.trials[0].seed, trial_seed(5, 0));
}

TEST(Study, DeterministicAndBestIsMaximal) {
    const auto views = random_views(2);
    for (auto kind : {ModelKind::DecisionTreeC, ModelKind::SgdR}) {
        const TunerConfig cfg{25, 9};
        const auto a = run_study(kind, {14}, views, {}, cfg);
        const auto b = run_study(kind, {14}, views, {}, cfg);
        ASSERT_EQ(a.trials.size(), 25u);
        EXPECT_EQ(a.best_index, b.best_index);
        for (std::size_t i = 0; i < a.trials.size(); ++i) {
            EXPECT_EQ(a.trials[i].params, b.trials[i].params);
            EXPECT_EQ(a.trials[i].objective, b.trials[i].objective);
            EXPECT_LE(a.trials[i].objective, a.best().objective);
            if (a.trials[i].objective == a.best().objective) EXPECT_GE(i, a.best_index);
        }
    }
}

TEST(Study, ParallelMatchesSequential) {
    const auto views = random_views(3);
    TunerConfig seq{30, 4};
    TunerConfig par = seq;
    par.threads = 4;
    const auto a = run_study(ModelKind::RandomForestR, {7}, views, {}, seq);
    const auto b = run_study(ModelKind::RandomForestR, {7}, views, {}, par);
    EXPECT_EQ(a.best_index, b.best_index);
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        EXPECT_EQ(a.trials[i].params, b.trials[i].params);
        EXPECT_EQ(a.trials[i].objective, b.trials[i].objective);
    }
}

TEST(Study, MomentumFixturePrefersSmallK) {
    const auto views = momentum_views();
    std::int64_t sweep_best = 0;
    double sweep_pnl = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 1; k <= 25; ++k) {
        const auto ev = evaluate_segment(views.backtest, Segment::Backtest, {ModelKind::KnnC, {{"k", k}}, 0}, {28}, {});
        if (ev.report.pnl_percent > sweep_pnl) {
            sweep_pnl = ev.report.pnl_percent;
            sweep_best = k;
        }
    }
    EXPECT_TRUE(sweep_best == 1 || sweep_best == 2) << sweep_best;

    const auto r = run_study(ModelKind::KnnC, {28}, views, {}, {100, 1});
    const auto k = std::get<std::int64_t>(r.best().params.at("k"));
    EXPECT_TRUE(k == 1 || k == 2) << k;
    EXPECT_EQ(r.best().objective, sweep_pnl);
}

TEST(Study, FailedTrialsScoreMinusInfinity) {
    std::vector<Trial> trials{trial(0, -std::numeric_limits<double>::infinity(), false), trial(1, -5.0), trial(2, -5.0)};
    EXPECT_EQ(select_best(trials), 1u);
    trials.push_back(trial(3, 2.0));
    EXPECT_EQ(select_best(trials), 3u);
}

TEST(Study, AllTrialsFailed) {
    const auto views = random_views(4);
    const SegmentViews early{DatasetView(views.train.parent_ptr(), 0, 3), DatasetView(views.train.parent_ptr(), 3, 6),
                             DatasetView(views.train.parent_ptr(), 6, 9)};
    EXPECT_EQ(code_of([&] { run_study(ModelKind::KnnC, {28}, early, {}, {5, 0}); }), ErrorCode::AllTrialsFailed);
}

TEST(Study, RejectsZeroTrials) {
    const auto views = random_views(5);
    EXPECT_EQ(code_of([&] { run_study(ModelKind::KnnC, {7}, views, {}, {0, 0}); }), ErrorCode::InvalidConfig);
}
