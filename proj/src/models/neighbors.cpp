#include "predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wfbt::detail {

namespace {

class KnnPredictor final : public Predictor {
public:
    KnnPredictor(RowMatrix rows, std::vector<double> targets, std::size_t k, bool classify)
        : rows_(std::move(rows)), targets_(std::move(targets)), k_(std::min(k, targets_.size())),
          classify_(classify) {}

    double evaluate(std::span<const double> x) const override {
        std::vector<double> q(x.size());
        standardizer->apply(x, q);
        const auto n = rows_.rows();
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = rows_.row(i);
            double d2 = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) {
                const double d = row[j] - q[j];
                d2 += d * d;
            }
            dist[i] = {d2, i};
        }
        // equal distances resolve to the earlier training row
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
        if (classify_) {
            std::vector<Direction> votes;
            votes.reserve(k_);
            for (std::size_t m = 0; m < k_; ++m) {
                votes.push_back(targets_[dist[m].second] > 0.0 ? Direction::Up : Direction::Down);
            }
            return ensemble_aggregate(votes).score;
        }
        std::vector<double> values;
        values.reserve(k_);
        for (std::size_t m = 0; m < k_; ++m) {
            values.push_back(targets_[dist[m].second]);
        }
        return ensemble_aggregate(values);
    }

private:
    RowMatrix rows_;
    std::vector<double> targets_;
    std::size_t k_;
    bool classify_;
};

double median(std::vector<double> values) {
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (n % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

/// Features binarized as x > training median; Laplace-smoothed Bernoulli
/// likelihoods per class.
class BernoulliNbPredictor final : public Predictor {
public:
    BernoulliNbPredictor(std::vector<double> thresholds, double log_prior_ratio, std::vector<double> log_on_ratio,
                         std::vector<double> log_off_ratio)
        : thresholds_(std::move(thresholds)), log_prior_ratio_(log_prior_ratio),
          log_on_ratio_(std::move(log_on_ratio)), log_off_ratio_(std::move(log_off_ratio)) {}

    double evaluate(std::span<const double> x) const override {
        // log P(up|x) - log P(down|x)
        double logit = log_prior_ratio_;
        for (std::size_t j = 0; j < x.size(); ++j) {
            logit += x[j] > thresholds_[j] ? log_on_ratio_[j] : log_off_ratio_[j];
        }
        const double p_up = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit)) : std::exp(logit) / (1.0 + std::exp(logit));
        return p_up - 0.5;
    }

private:
    std::vector<double> thresholds_;
    double log_prior_ratio_;
    std::vector<double> log_on_ratio_;
    std::vector<double> log_off_ratio_;
};

}  // namespace

std::shared_ptr<const Predictor> fit_neighbors(ModelKind kind, const Params& params, MatrixView x, Labels y) {
    auto standardizer = Standardizer::fit(x);
    auto rows = standardizer.apply(x);
    const auto k = static_cast<std::size_t>(param_int(params, "k"));
    auto model = std::make_shared<KnnPredictor>(std::move(rows), std::vector<double>(y.begin(), y.end()), k,
                                                kind == ModelKind::KnnC);
    model->standardizer = std::move(standardizer);
    return model;
}

std::shared_ptr<const Predictor> fit_bernoulli_nb(const Params& params, MatrixView x, Labels y) {
    const double alpha = param_real(params, "smoothing");
    const auto n = x.rows();
    const auto d = x.cols;
    std::vector<double> thresholds(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = x(i, j);
        }
        thresholds[j] = median(std::move(column));
    }
    double n_up = 0.0;
    double n_down = 0.0;
    std::vector<double> on_up(d, 0.0);
    std::vector<double> on_down(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool up = y[i] > 0.0;
        (up ? n_up : n_down) += 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (x(i, j) > thresholds[j]) {
                (up ? on_up : on_down)[j] += 1.0;
            }
        }
    }
    std::vector<double> log_on(d);
    std::vector<double> log_off(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double p_up = (on_up[j] + alpha) / (n_up + 2.0 * alpha);
        const double p_down = (on_down[j] + alpha) / (n_down + 2.0 * alpha);
        log_on[j] = std::log(p_up) - std::log(p_down);
        log_off[j] = std::log1p(-p_up) - std::log1p(-p_down);
    }
    const double log_prior = std::log(n_up) - std::log(n_down);
    return std::make_shared<BernoulliNbPredictor>(std::move(thresholds), log_prior, std::move(log_on),
                                                  std::move(log_off));
}

}  // namespace wfbt::detail
