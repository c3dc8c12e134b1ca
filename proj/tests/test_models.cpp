#include "wfbt/error.hpp"
#include "wfbt/models.hpp"
#include "wfbt/tuner.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstring>

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

struct Fixture {
    RowMatrix x;
    std::vector<Direction> classes;
    std::vector<double> values;
};

Fixture random_fixture(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    oracle::TestRng rng(seed);
    Fixture f{RowMatrix(rows, cols), {}, {}};
    for (std::size_t i = 0; i < rows; ++i) {
        double signal = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            f.x(i, j) = rng.normal();
            signal += (j % 2 == 0 ? 1.0 : -1.0) * f.x(i, j);
        }
        const double v = 0.01 * signal + 0.005 * rng.normal();
        f.values.push_back(v);
        f.classes.push_back(v > 0.0 ? Direction::Up : Direction::Down);
    }
    return f;
}

TrainedModel fit_any(const ModelSpec& spec, const Fixture& f) {
    return task_of(spec.kind) == Task::Classifier ? fit(spec, f.x.view(), f.classes) : fit(spec, f.x.view(), f.values);
}

double evaluate(const TrainedModel& m, std::span<const double> row) {
    return m.task() == Task::Classifier ? predict_class(m, row).score : predict_value(m, row);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(Registry, NamesRoundTrip) {
    EXPECT_EQ(all_kinds().size(), 18u);
    for (auto k : all_kinds()) EXPECT_EQ(parse_kind(kind_name(k)), k);
    EXPECT_EQ(code_of([] { parse_kind("svm_c"); }), ErrorCode::InvalidParam);
    EXPECT_EQ(kind_name(ModelKind::RandomForestC), "random_forest_c");
}

TEST(Registry, DeclaredSpaces) {
    const auto knn = default_space(ModelKind::KnnC);
    const auto* k = knn.find("k");
    ASSERT_NE(k, nullptr);
    EXPECT_EQ(k->distribution.type, Distribution::Type::Int);
    EXPECT_EQ(k->distribution.lo, 1.0);
    EXPECT_EQ(k->distribution.hi, 25.0);
    EXPECT_TRUE(default_space(ModelKind::OlsR).empty());

    const auto lr = default_space(ModelKind::LogisticC).find("learning_rate");
    ASSERT_NE(lr, nullptr);
    EXPECT_EQ(lr->distribution.type, Distribution::Type::LogUniform);
    EXPECT_EQ(lr->distribution.lo, 1e-4);
    EXPECT_EQ(lr->distribution.hi, 1.0);
    const auto lambda = default_space(ModelKind::RidgeR).find("lambda");
    ASSERT_NE(lambda, nullptr);
    EXPECT_EQ(lambda->distribution.lo, 1e-6);
    EXPECT_EQ(lambda->distribution.hi, 1e3);
    const auto forest = default_space(ModelKind::RandomForestR);
    ASSERT_NE(forest.find("max_depth"), nullptr);
    EXPECT_EQ(forest.find("max_depth")->distribution.hi, 12.0);
    ASSERT_NE(forest.find("min_samples_leaf"), nullptr);
    EXPECT_EQ(forest.find("min_samples_leaf")->distribution.hi, 20.0);
    ASSERT_NE(forest.find("n_members"), nullptr);
    EXPECT_EQ(forest.find("n_members")->distribution.lo, 5.0);
    EXPECT_EQ(forest.find("n_members")->distribution.hi, 200.0);
    ASSERT_NE(default_space(ModelKind::SgdR).find("epochs"), nullptr);
}

TEST(Registry, ResolveParamsChecksBounds) {
    EXPECT_EQ(code_of([] { resolve_params(ModelKind::KnnC, {{"k", std::int64_t{0}}}); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { resolve_params(ModelKind::KnnC, {{"depth", std::int64_t{3}}}); }),
              ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { resolve_params(ModelKind::SgdC, {{"loss", std::string("huber")}}); }),
              ErrorCode::InvalidParam);
    const auto p = resolve_params(ModelKind::RidgeR, {{"lambda", std::int64_t{2}}});
    EXPECT_EQ(std::get<double>(p.at("lambda")), 2.0);
    EXPECT_EQ(default_params(ModelKind::BernoulliNbC).count("smoothing"), 1u);
}

TEST(Registry, SampledParamsAlwaysFit) {
    const auto data = random_fixture(30, 3, 2);
    for (auto kind : all_kinds()) {
        const auto space = default_space(kind);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto params = sample_params(space, s);
            EXPECT_NO_THROW(resolve_params(kind, params)) << kind_name(kind);
            EXPECT_NO_THROW(fit_any({kind, params, s}, data)) << kind_name(kind);
        }
    }
}

TEST(Ols, RecoversNoiselessLine) {
    RowMatrix x(5, 1);
    std::vector<double> y;
    for (int i = 0; i < 5; ++i) {
        x(i, 0) = i - 1.5;
        y.push_back(3.0 + 2.0 * x(i, 0));
    }
    const auto m = fit({ModelKind::OlsR, {}, 0}, x.view(), y);
    const double zero[] = {0.0};
    const double one[] = {1.0};
    const double ten[] = {10.0};
    EXPECT_NEAR(predict_value(m, zero), 3.0, 1e-8);
    EXPECT_NEAR(predict_value(m, one) - predict_value(m, zero), 2.0, 1e-8);
    EXPECT_NEAR(predict_value(m, ten), 23.0, 1e-8);
}

TEST(Ridge, LargeLambdaShrinksWeights) {
    auto f = random_fixture(40, 3, 7);
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 40; ++i) mean += f.x(i, j) / 40.0;
        for (std::size_t i = 0; i < 40; ++i) f.x(i, j) -= mean;
    }
    const auto m = fit({ModelKind::RidgeR, {{"lambda", 1e9}}, 0}, f.x.view(), f.values);
    const std::vector<double> origin(3, 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
        std::vector<double> unit(3, 0.0);
        unit[j] = 1.0;
        EXPECT_NEAR(predict_value(m, unit) - predict_value(m, origin), 0.0, 1e-6);
    }
}

TEST(Degenerate, SingleClassAndSingleRow) {
    RowMatrix x(3, 2, 1.0);
    const std::vector<Direction> ups(3, Direction::Up);
    for (auto kind : all_kinds()) {
        if (task_of(kind) != Task::Classifier) continue;
        const auto m = fit({kind, {}, 1}, x.view(), ups);
        EXPECT_TRUE(m.is_constant());
        const auto p = predict_class(m, std::vector<double>{5.0, -5.0});
        EXPECT_EQ(p.direction, Direction::Up);
        EXPECT_EQ(p.score, 0.5);
    }
    RowMatrix one(1, 2, 1.0);
    const std::vector<double> y{0.02};
    for (auto kind : all_kinds()) {
        if (task_of(kind) != Task::Regressor) continue;
        const auto m = fit({kind, {}, 1}, one.view(), y);
        EXPECT_TRUE(m.is_constant());
        EXPECT_EQ(predict_value(m, std::vector<double>{0.0, 0.0}), 0.02);
    }
}

TEST(Knn, SoleNeighborAndMeanOfTwo) {
    RowMatrix x(1, 2, 0.0);
    const std::vector<Direction> up{Direction::Up};
    for (std::int64_t k : {1, 3, 25}) {
        const auto m = fit({ModelKind::KnnC, {{"k", k}}, 0}, x.view(), up);
        EXPECT_EQ(predict_class(m, std::vector<double>{3.0, -1.0}).direction, Direction::Up);
    }
    RowMatrix xr(3, 1);
    xr(0, 0) = 0.0;
    xr(1, 0) = 1.0;
    xr(2, 0) = 10.0;
    const std::vector<double> y{0.01, 0.03, 0.5};
    const auto m = fit({ModelKind::KnnR, {{"k", std::int64_t{2}}}, 0}, xr.view(), y);
    EXPECT_NEAR(predict_value(m, std::vector<double>{0.4}), 0.02, 1e-15);
}

TEST(Knn, OneNeighborReproducesTrainingLabels) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto f = random_fixture(60, 4, seed);
        const auto m = fit({ModelKind::KnnC, {{"k", std::int64_t{1}}}, 0}, f.x.view(), f.classes);
        for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(predict_class(m, f.x.row(i)).direction, f.classes[i]);
    }
}

TEST(Perceptron, SeparatesFourPoints) {
    RowMatrix x(4, 2);
    const double pts[4][2] = {{1, 1}, {2, 2}, {-1, -1}, {-2, -1}};
    for (int i = 0; i < 4; ++i) {
        x(i, 0) = pts[i][0];
        x(i, 1) = pts[i][1];
    }
    const std::vector<Direction> y{Direction::Up, Direction::Up, Direction::Down, Direction::Down};
    const auto m = fit({ModelKind::PerceptronC, {}, 0}, x.view(), y);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(predict_class(m, x.row(i)).direction, y[i]);
}

TEST(Gradient, LossIsMonotoneOnSeparablePair) {
    RowMatrix x(2, 1);
    x(0, 0) = -1.0;
    x(1, 0) = 1.0;
    const std::vector<Direction> y{Direction::Down, Direction::Up};
    const std::vector<double> v{-0.5, 0.5};
    const Params p{{"learning_rate", 0.1}, {"epochs", std::int64_t{100}}};
    auto log_params = p;
    log_params["loss"] = std::string("log");
    const TrainedModel models[] = {fit({ModelKind::LogisticC, p, 3}, x.view(), y),
                                   fit({ModelKind::SgdC, log_params, 3}, x.view(), y),
                                   fit({ModelKind::SgdC, p, 3}, x.view(), y),
                                   fit({ModelKind::SgdR, p, 3}, x.view(), v)};
    for (const auto& m : models) {
        const auto& loss = m.loss_history();
        ASSERT_EQ(loss.size(), 100u) << kind_name(m.kind());
        for (std::size_t e = 1; e < loss.size(); ++e) EXPECT_LE(loss[e], loss[e - 1] + 1e-15) << e;
    }
}

TEST(Standardizer, MatchesTrainingStatistics) {
    const auto f = random_fixture(50, 3, 4);
    for (auto kind : {ModelKind::LogisticC, ModelKind::SgdR, ModelKind::KnnC}) {
        const auto m = fit_any({kind, {}, 0}, f);
        ASSERT_NE(m.standardizer(), nullptr);
        const auto z = m.standardizer()->apply(f.x.view());
        for (std::size_t j = 0; j < 3; ++j) {
            double mean = 0.0;
            double ss = 0.0;
            for (std::size_t i = 0; i < 50; ++i) mean += z(i, j) / 50.0;
            for (std::size_t i = 0; i < 50; ++i) ss += (z(i, j) - mean) * (z(i, j) - mean) / 50.0;
            EXPECT_NEAR(mean, 0.0, 1e-12);
            EXPECT_NEAR(ss, 1.0, 1e-12);
        }
    }
}

TEST(Determinism, IdenticalSpecsGiveIdenticalPredictions) {
    const auto f = random_fixture(40, 3, 9);
    const auto probe = random_fixture(20, 3, 10);
    for (auto kind : all_kinds()) {
        const auto a = fit_any({kind, {}, 123}, f);
        const auto b = fit_any({kind, {}, 123}, f);
        for (std::size_t i = 0; i < 20; ++i) {
            EXPECT_TRUE(same_bits(evaluate(a, probe.x.row(i)), evaluate(b, probe.x.row(i)))) << kind_name(kind);
        }
    }
}

TEST(Forest, OneMemberEqualsBaseTree) {
    const auto f = random_fixture(50, 4, 12);
    const Params single{{"n_members", std::int64_t{1}}, {"bootstrap", std::string("false")}};
    const auto tree_r = fit({ModelKind::DecisionTreeR, {}, 77}, f.x.view(), f.values);
    const auto tree_c = fit({ModelKind::DecisionTreeC, {}, 77}, f.x.view(), f.classes);
    const auto rf_r = fit({ModelKind::RandomForestR, single, 77}, f.x.view(), f.values);
    const auto bag_r = fit({ModelKind::BaggingR, single, 77}, f.x.view(), f.values);
    const auto rf_c = fit({ModelKind::RandomForestC, single, 77}, f.x.view(), f.classes);
    const auto bag_c = fit({ModelKind::BaggingC, single, 77}, f.x.view(), f.classes);
    const auto probe = random_fixture(50, 4, 13);
    for (const auto* fx : {&f, &probe}) {
        for (std::size_t i = 0; i < 50; ++i) {
            const auto row = fx->x.row(i);
            EXPECT_TRUE(same_bits(predict_value(rf_r, row), predict_value(tree_r, row)));
            EXPECT_TRUE(same_bits(predict_value(bag_r, row), predict_value(tree_r, row)));
            EXPECT_EQ(predict_class(rf_c, row).direction, predict_class(tree_c, row).direction);
            EXPECT_EQ(predict_class(bag_c, row).direction, predict_class(tree_c, row).direction);
        }
    }
}

TEST(Cart, HandEnumeratedSplit) {
    RowMatrix x(4, 1);
    for (int i = 0; i < 4; ++i) x(i, 0) = i + 1.0;
    const std::vector<double> y{1, 1, -1, -1};
    const auto s = cart_best_split(x.view(), y, SplitCriterion::Gini);
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(s->feature, 0u);
    EXPECT_DOUBLE_EQ(s->threshold, 2.5);
    EXPECT_DOUBLE_EQ(s->decrease, 0.5);
}

TEST(Cart, NoSplitCases) {
    RowMatrix x(3, 1);
    x(0, 0) = 1;
    x(1, 0) = 2;
    x(2, 0) = 3;
    const std::vector<double> pure{1, 1, 1};
    EXPECT_FALSE(cart_best_split(x.view(), pure, SplitCriterion::Gini).has_value());
    RowMatrix twin(2, 1, 4.0);
    const std::vector<double> mixed{1, -1};
    EXPECT_FALSE(cart_best_split(twin.view(), mixed, SplitCriterion::Gini).has_value());
    const std::vector<double> constant{0.3, 0.3, 0.3};
    EXPECT_FALSE(cart_best_split(x.view(), constant, SplitCriterion::Variance).has_value());
}

TEST(Cart, TiesGoToLowestFeatureThenThreshold) {
    RowMatrix x(4, 2);
    for (int i = 0; i < 4; ++i) {
        x(i, 0) = i;
        x(i, 1) = i;
    }
    const std::vector<double> y{1, -1, 1, -1};
    const auto s = cart_best_split(x.view(), y, SplitCriterion::Gini);
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(s->feature, 0u);
    EXPECT_DOUBLE_EQ(s->threshold, 0.5);
}

TEST(Cart, RandomThresholdsStayInRange) {
    const auto f = random_fixture(30, 3, 5);
    std::vector<double> y;
    for (auto c : f.classes) y.push_back(c == Direction::Up ? 1.0 : -1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = cart_best_split(f.x.view(), y, SplitCriterion::Gini, {true, seed, 1});
        if (!s) continue;
        double lo = f.x(0, s->feature);
        double hi = lo;
        for (std::size_t i = 0; i < 30; ++i) {
            lo = std::min(lo, f.x(i, s->feature));
            hi = std::max(hi, f.x(i, s->feature));
        }
        EXPECT_GE(s->threshold, lo);
        EXPECT_LE(s->threshold, hi);
        EXPECT_GT(s->decrease, 0.0);
    }
}

TEST(Impurity, PureNodesAreZero) {
    const std::vector<double> pure{1, 1, 1, 1};
    const std::vector<double> constant{0.2, 0.2, 0.2};
    EXPECT_EQ(gini_impurity(pure), 0.0);
    EXPECT_EQ(variance_impurity(constant), 0.0);
    const std::vector<double> half{1, -1};
    EXPECT_DOUBLE_EQ(gini_impurity(half), 0.5);
}

TEST(Ensemble, AggregationRules) {
    const std::vector<Direction> three{Direction::Up, Direction::Up, Direction::Down};
    const std::vector<Direction> tie{Direction::Up, Direction::Down};
    EXPECT_EQ(ensemble_aggregate(std::span<const Direction>(three)).direction, Direction::Up);
    EXPECT_EQ(ensemble_aggregate(std::span<const Direction>(tie)).direction, Direction::Down);
    const std::vector<double> means{0.01, 0.02, 0.06};
    EXPECT_NEAR(ensemble_aggregate(std::span<const double>(means)), 0.03, 1e-15);
    EXPECT_EQ(code_of([] { ensemble_aggregate(std::span<const Direction>()); }), ErrorCode::EmptyEnsemble);
    EXPECT_EQ(code_of([] { ensemble_aggregate(std::span<const double>()); }), ErrorCode::EmptyEnsemble);
}

TEST(Errors, FitAndPredictContracts) {
    const auto f = random_fixture(10, 2, 1);
    EXPECT_EQ(code_of([&] { fit({ModelKind::OlsR, {}, 0}, f.x.view(), f.classes); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { fit({ModelKind::KnnC, {}, 0}, RowMatrix().view(), std::span<const Direction>()); }),
              ErrorCode::EmptyTraining);
    EXPECT_EQ(code_of([&] { fit({ModelKind::KnnC, {}, 0}, f.x.view(), std::span(f.classes).first(5)); }),
              ErrorCode::LengthMismatch);
    auto bad = f;
    bad.x(3, 1) = std::numeric_limits<double>::infinity();
    EXPECT_EQ(code_of([&] { fit({ModelKind::KnnC, {}, 0}, bad.x.view(), bad.classes); }), ErrorCode::NonFiniteInput);

    const auto m = fit({ModelKind::LogisticC, {}, 0}, f.x.view(), f.classes);
    EXPECT_EQ(code_of([&] { predict_value(m, f.x.row(0)); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { predict_class(m, std::vector<double>{1.0}); }), ErrorCode::WidthMismatch);
    EXPECT_EQ(code_of([&] { predict_class(m, std::vector<double>{1.0, std::nan("")}); }),
              ErrorCode::NonFiniteInput);
}

TEST(Scores, SignMatchesDirection) {
    const auto f = random_fixture(40, 3, 21);
    const auto probe = random_fixture(30, 3, 22);
    for (auto kind : all_kinds()) {
        if (task_of(kind) != Task::Classifier) continue;
        const auto m = fit({kind, {}, 5}, f.x.view(), f.classes);
        for (std::size_t i = 0; i < 30; ++i) {
            const auto p = predict_class(m, probe.x.row(i));
            EXPECT_EQ(p.direction == Direction::Up, p.score > 0.0) << kind_name(kind);
        }
    }
}

TEST(Learners, BeatChanceOnLinearSignal) {
    const auto train = random_fixture(200, 3, 31);
    const auto test = random_fixture(200, 3, 32);
    for (auto kind : all_kinds()) {
        const auto m = fit_any({kind, {}, 5}, train);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < 200; ++i) {
            const double s = evaluate(m, test.x.row(i));
            hits += (s > 0.0) == (test.classes[i] == Direction::Up) ? 1 : 0;
        }
        EXPECT_GT(hits, 120u) << kind_name(kind);
    }
}
