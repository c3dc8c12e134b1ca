#include "predictor.hpp"

#include "wfbt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wfbt::detail {

namespace {

double node_impurity(std::span<const double> y, std::span<const std::size_t> rows, SplitCriterion criterion) {
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        values[i] = y[rows[i]];
    }
    return criterion == SplitCriterion::Gini ? gini_impurity(values) : variance_impurity(values);
}

/// Running class counts or moments for one side of a split.
struct SideStats {
    double count = 0.0;
    double ups = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        count += 1.0;
        ups += v > 0.0 ? 1.0 : 0.0;
        sum += v;
        sum_sq += v * v;
    }
    void remove(double v) {
        count -= 1.0;
        ups -= v > 0.0 ? 1.0 : 0.0;
        sum -= v;
        sum_sq -= v * v;
    }
    double impurity(SplitCriterion criterion) const {
        if (count <= 0.0) {
            return 0.0;
        }
        if (criterion == SplitCriterion::Gini) {
            const double p = ups / count;
            const double q = 1.0 - p;
            return 1.0 - p * p - q * q;
        }
        const double mean = sum / count;
        return std::max(0.0, sum_sq / count - mean * mean);
    }
};

}  // namespace

std::optional<SplitCandidate> best_split(MatrixView x, std::span<const double> y, std::span<const std::size_t> rows,
                                         std::span<const std::size_t> features, SplitCriterion criterion,
                                         bool random_thresholds, Rng* rng, std::size_t min_samples_leaf) {
    const auto n = rows.size();
    const auto min_leaf = std::max<std::size_t>(1, min_samples_leaf);
    if (n < 2 * min_leaf) {
        return std::nullopt;
    }
    const double parent = node_impurity(y, rows, criterion);
    if (parent <= 0.0) {
        return std::nullopt;
    }
    const double total = static_cast<double>(n);
    std::optional<SplitCandidate> best;
    double best_decrease = 0.0;
    std::vector<std::pair<double, double>> column(n);

    for (const auto f : features) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = {x(rows[i], f), y[rows[i]]};
        }
        if (random_thresholds) {
            double lo = column[0].first;
            double hi = column[0].first;
            for (const auto& [v, _] : column) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(lo < hi)) {
                continue;
            }
            const double threshold = rng->uniform(lo, hi);
            SideStats left;
            SideStats right;
            for (const auto& [v, target] : column) {
                (v <= threshold ? left : right).add(target);
            }
            if (left.count < static_cast<double>(min_leaf) || right.count < static_cast<double>(min_leaf)) {
                continue;
            }
            const double decrease = parent - (left.count / total) * left.impurity(criterion) -
                                    (right.count / total) * right.impurity(criterion);
            if (decrease > best_decrease) {
                best_decrease = decrease;
                best = SplitCandidate{f, threshold, decrease};
            }
            continue;
        }

        std::stable_sort(column.begin(), column.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        SideStats left;
        SideStats right;
        for (const auto& [_, target] : column) {
            right.add(target);
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left.add(column[i].second);
            right.remove(column[i].second);
            if (column[i].first == column[i + 1].first) {
                continue;
            }
            if (i + 1 < min_leaf || n - i - 1 < min_leaf) {
                continue;
            }
            const double decrease = parent - (left.count / total) * left.impurity(criterion) -
                                    (right.count / total) * right.impurity(criterion);
            if (decrease > best_decrease) {
                double threshold = 0.5 * (column[i].first + column[i + 1].first);
                if (!(threshold < column[i + 1].first)) {
                    threshold = column[i].first;
                }
                best_decrease = decrease;
                best = SplitCandidate{f, threshold, decrease};
            }
        }
    }
    return best;
}

Tree Tree::build(MatrixView x, std::span<const double> y, std::vector<std::size_t> rows, const TreeParams& params,
                 std::uint64_t seed) {
    Tree tree;
    Rng rng(seed);
    const auto width = x.cols;
    std::size_t tried = width;
    if (params.max_features < 1.0) {
        tried = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(params.max_features * static_cast<double>(width))), 1, width);
    }
    std::vector<std::size_t> all_features(width);
    std::iota(all_features.begin(), all_features.end(), std::size_t{0});

    auto leaf_value = [&](std::span<const std::size_t> node_rows) {
        double acc = 0.0;
        for (auto r : node_rows) {
            acc += params.criterion == SplitCriterion::Gini ? (y[r] > 0.0 ? 1.0 : 0.0) : y[r];
        }
        return acc / static_cast<double>(node_rows.size());
    };

    // Depth-first; left subtree before right so RNG consumption is fixed.
    auto grow = [&](auto&& self, std::vector<std::size_t> node_rows, std::size_t depth) -> int {
        const int id = static_cast<int>(tree.nodes_.size());
        tree.nodes_.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(node_rows)});
        if (params.max_depth != 0 && depth >= params.max_depth) {
            return id;
        }
        std::vector<std::size_t> features = all_features;
        if (tried < width) {
            for (std::size_t i = 0; i < tried; ++i) {
                std::swap(features[i], features[i + rng.index(width - i)]);
            }
            features.resize(tried);
            std::sort(features.begin(), features.end());
        }
        const auto split = best_split(x, y, node_rows, features, params.criterion, params.random_thresholds, &rng,
                                      params.min_samples_leaf);
        if (!split) {
            return id;
        }
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : node_rows) {
            (x(r, split->feature) <= split->threshold ? left : right).push_back(r);
        }
        node_rows.clear();
        node_rows.shrink_to_fit();
        const int l = self(self, std::move(left), depth + 1);
        const int r = self(self, std::move(right), depth + 1);
        auto& node = tree.nodes_[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(split->feature);
        node.threshold = split->threshold;
        node.left = l;
        node.right = r;
        return id;
    };
    grow(grow, std::move(rows), 0);
    return tree;
}

double Tree::leaf_value(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                 : node.right);
    }
    return nodes_[i].value;
}

namespace {

class TreePredictor final : public Predictor {
public:
    TreePredictor(Tree tree, bool classify) : tree_(std::move(tree)), classify_(classify) {}

    double evaluate(std::span<const double> x) const override {
        const double v = tree_.leaf_value(x);
        return classify_ ? v - 0.5 : v;
    }

private:
    Tree tree_;
    bool classify_;
};

class ForestPredictor final : public Predictor {
public:
    ForestPredictor(std::vector<Tree> members, bool classify) : members_(std::move(members)), classify_(classify) {}

    double evaluate(std::span<const double> x) const override {
        if (classify_) {
            std::vector<Direction> votes;
            votes.reserve(members_.size());
            for (const auto& t : members_) {
                votes.push_back(t.leaf_value(x) > 0.5 ? Direction::Up : Direction::Down);
            }
            return ensemble_aggregate(votes).score;
        }
        std::vector<double> values;
        values.reserve(members_.size());
        for (const auto& t : members_) {
            values.push_back(t.leaf_value(x));
        }
        return ensemble_aggregate(values);
    }

private:
    std::vector<Tree> members_;
    bool classify_;
};

}  // namespace

std::shared_ptr<const Predictor> fit_tree_family(ModelKind kind, const Params& params, MatrixView x, Labels y,
                                                 std::uint64_t seed) {
    const bool classify = task_of(kind) == Task::Classifier;
    TreeParams tp;
    tp.criterion = classify ? SplitCriterion::Gini : SplitCriterion::Variance;
    tp.max_depth = static_cast<std::size_t>(param_int(params, "max_depth"));
    tp.min_samples_leaf = static_cast<std::size_t>(param_int(params, "min_samples_leaf"));
    tp.random_thresholds = kind == ModelKind::ExtraTreeC || kind == ModelKind::ExtraTreeR;

    const auto n = x.rows();
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    switch (kind) {
        case ModelKind::DecisionTreeC:
        case ModelKind::DecisionTreeR:
        case ModelKind::ExtraTreeC:
        case ModelKind::ExtraTreeR:
            return std::make_shared<TreePredictor>(Tree::build(x, y, std::move(all_rows), tp, seed), classify);
        default:
            break;
    }

    const bool forest = kind == ModelKind::RandomForestC || kind == ModelKind::RandomForestR;
    if (forest) {
        tp.max_features = param_real(params, "max_features");
    }
    const bool bootstrap = param_str(params, "bootstrap") == "true";
    const auto n_members = static_cast<std::size_t>(param_int(params, "n_members"));
    std::vector<Tree> members;
    members.reserve(n_members);
    for (std::size_t m = 0; m < n_members; ++m) {
        const std::uint64_t member_seed = seed + m;
        std::vector<std::size_t> rows = all_rows;
        if (bootstrap) {
            // separate stream from the tree's own draws
            Rng sampler(hash_combine(member_seed, 0x626f6f74ULL));
            for (auto& r : rows) {
                r = sampler.index(n);
            }
        }
        members.push_back(Tree::build(x, y, std::move(rows), tp, member_seed));
    }
    return std::make_shared<ForestPredictor>(std::move(members), classify);
}

}  // namespace wfbt::detail

namespace wfbt {

std::optional<SplitCandidate> cart_best_split(MatrixView x, std::span<const double> y, SplitCriterion criterion,
                                              const SplitOptions& options) {
    if (y.size() != x.rows()) {
        throw Error(ErrorCode::LengthMismatch, "targets and rows differ in length");
    }
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<std::size_t> features(x.cols);
    std::iota(features.begin(), features.end(), std::size_t{0});
    Rng rng(options.seed);
    return detail::best_split(x, y, rows, features, criterion, options.random_thresholds, &rng,
                              options.min_samples_leaf);
}

}  // namespace wfbt
