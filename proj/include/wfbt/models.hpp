#pragma once

#include "wfbt/dataset.hpp"
#include "wfbt/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wfbt {

enum class ModelKind {
    LogisticC,
    RidgeC,
    PerceptronC,
    SgdC,
    KnnC,
    BernoulliNbC,
    DecisionTreeC,
    ExtraTreeC,
    RandomForestC,
    BaggingC,
    OlsR,
    RidgeR,
    SgdR,
    KnnR,
    DecisionTreeR,
    ExtraTreeR,
    RandomForestR,
    BaggingR,
};

enum class Task { Classifier, Regressor };

Task task_of(ModelKind kind) noexcept;
std::string_view kind_name(ModelKind kind) noexcept;  // e.g. "random_forest_c"
ModelKind parse_kind(std::string_view name);          // throws InvalidParam
const std::vector<ModelKind>& all_kinds();
std::string_view task_name(Task task) noexcept;

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Params = std::map<std::string, ParamValue, std::less<>>;

std::string to_string(const ParamValue& value);

struct Distribution {
    enum class Type { Uniform, LogUniform, Int, Categorical };

    Type type = Type::Uniform;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::string> choices;

    static Distribution uniform(double lo, double hi);
    static Distribution log_uniform(double lo, double hi);
    static Distribution integer(std::int64_t lo, std::int64_t hi);
    static Distribution categorical(std::vector<std::string> choices);

    bool contains(const ParamValue& value) const;
};

struct HyperParamSpace {
    struct Dimension {
        std::string name;
        Distribution distribution;
    };
    std::vector<Dimension> dimensions;

    bool empty() const noexcept { return dimensions.empty(); }
    const Dimension* find(std::string_view name) const;
};

/// Searchable dimensions of a kind. Ranges are this library's choice.
HyperParamSpace default_space(ModelKind kind);

/// Every parameter a kind accepts, set to its default value.
Params default_params(ModelKind kind);

/// Defaults overlaid with `overrides`, coerced to declared types and checked
/// against declared bounds. Throws InvalidParam.
Params resolve_params(ModelKind kind, const Params& overrides);

struct ModelSpec {
    ModelKind kind = ModelKind::LogisticC;
    Params params;  // missing entries take defaults
    std::uint64_t seed = 0;
};

struct ClassPrediction {
    Direction direction = Direction::Down;
    double score = 0.0;  // > 0 iff Up
};

/// Per-feature (x - mean) / std with training-set statistics; zero-variance
/// features use std = 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(MatrixView x);
    void apply(std::span<const double> x, std::span<double> out) const;
    RowMatrix apply(MatrixView x) const;
};

namespace detail {
class Predictor;
}

/// Fitted, immutable model state; cheap to copy and safe to share.
class TrainedModel {
public:
    TrainedModel(ModelKind kind, std::size_t width, std::shared_ptr<const detail::Predictor> impl);

    ModelKind kind() const noexcept { return kind_; }
    Task task() const noexcept { return task_of(kind_); }
    std::size_t feature_width() const noexcept { return width_; }

    /// True for the constant fallback fitted on degenerate windows.
    bool is_constant() const;

    /// Training objective after each epoch; empty for non-iterative kinds.
    const std::vector<double>& loss_history() const;

    /// Set for kinds that standardize their inputs.
    const Standardizer* standardizer() const;

    const detail::Predictor& impl() const { return *impl_; }

private:
    ModelKind kind_;
    std::size_t width_;
    std::shared_ptr<const detail::Predictor> impl_;
};

TrainedModel fit(const ModelSpec& spec, MatrixView x, std::span<const Direction> y);
TrainedModel fit(const ModelSpec& spec, MatrixView x, std::span<const double> y);

ClassPrediction predict_class(const TrainedModel& model, std::span<const double> x);
double predict_value(const TrainedModel& model, std::span<const double> x);

// --- tree primitives ---------------------------------------------------------

enum class SplitCriterion { Gini, Variance };

struct SplitOptions {
    bool random_thresholds = false;  // one uniform draw per feature (extra trees)
    std::uint64_t seed = 0;
    std::size_t min_samples_leaf = 1;
};

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;  // rows with x <= threshold go left
    double decrease = 0.0;   // parent impurity - weighted child impurity
};

/// For Gini, y holds class labels (+1 up, -1 down). Exhaustive mode scans the
/// midpoints between consecutive distinct sorted values; ties resolve to the
/// lowest feature, then the lowest threshold. Empty when nothing reduces
/// impurity.
std::optional<SplitCandidate> cart_best_split(MatrixView x, std::span<const double> y, SplitCriterion criterion,
                                              const SplitOptions& options = {});

double gini_impurity(std::span<const double> labels);
double variance_impurity(std::span<const double> values);

/// Majority vote, ties to Down; score is the Up vote share minus 0.5.
ClassPrediction ensemble_aggregate(std::span<const Direction> votes);
/// Arithmetic mean.
double ensemble_aggregate(std::span<const double> values);

}  // namespace wfbt
