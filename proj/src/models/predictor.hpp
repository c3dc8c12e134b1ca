#pragma once

#include "wfbt/models.hpp"
#include "wfbt/rng.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wfbt::detail {

/// Classifier predictors return a decision score (> 0 means Up); regressor
/// predictors return the predicted value.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual double evaluate(std::span<const double> x) const = 0;
    virtual bool is_constant() const { return false; }

    std::optional<Standardizer> standardizer;
    std::vector<double> loss_history;
};

class ConstantPredictor final : public Predictor {
public:
    explicit ConstantPredictor(double value) : value_(value) {}
    double evaluate(std::span<const double>) const override { return value_; }
    bool is_constant() const override { return true; }

private:
    double value_;
};

// --- trees ----------------------------------------------------------------------

struct TreeParams {
    SplitCriterion criterion = SplitCriterion::Variance;
    bool random_thresholds = false;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_leaf = 1;
    double max_features = 1.0;  // fraction of features tried per node
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean (regression) or Up fraction (classification)
};

class Tree {
public:
    /// `rows` selects (possibly repeated) training rows in order.
    static Tree build(MatrixView x, std::span<const double> y, std::vector<std::size_t> rows,
                      const TreeParams& params, std::uint64_t seed);

    double leaf_value(std::span<const double> x) const;
    std::size_t node_count() const noexcept { return nodes_.size(); }

private:
    std::vector<TreeNode> nodes_;
};

std::optional<SplitCandidate> best_split(MatrixView x, std::span<const double> y, std::span<const std::size_t> rows,
                                         std::span<const std::size_t> features, SplitCriterion criterion,
                                         bool random_thresholds, Rng* rng, std::size_t min_samples_leaf);

// --- family factories ---------------------------------------------------------------

using Labels = std::span<const double>;  // +1 / -1 for classifiers

std::shared_ptr<const Predictor> fit_linear(ModelKind kind, const Params& params, MatrixView x, Labels y,
                                            std::uint64_t seed);
std::shared_ptr<const Predictor> fit_neighbors(ModelKind kind, const Params& params, MatrixView x, Labels y);
std::shared_ptr<const Predictor> fit_bernoulli_nb(const Params& params, MatrixView x, Labels y);
std::shared_ptr<const Predictor> fit_tree_family(ModelKind kind, const Params& params, MatrixView x, Labels y,
                                                 std::uint64_t seed);

double param_real(const Params& params, std::string_view name);
std::int64_t param_int(const Params& params, std::string_view name);
const std::string& param_str(const Params& params, std::string_view name);

}  // namespace wfbt::detail
