#include "predictor.hpp"

#include "wfbt/error.hpp"

#include <algorithm>
#include <cmath>

namespace wfbt {

using detail::ConstantPredictor;
using detail::Predictor;

Standardizer Standardizer::fit(MatrixView x) {
    const auto n = x.rows();
    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.scale.assign(x.cols, 1.0);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += x(i, j);
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x(i, j) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        s.mean[j] = mean;
        s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

void Standardizer::apply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = (x[j] - mean[j]) / scale[j];
    }
}

RowMatrix Standardizer::apply(MatrixView x) const {
    RowMatrix out(x.rows(), x.cols);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        apply(x.row(i), out.row(i));
    }
    return out;
}

TrainedModel::TrainedModel(ModelKind kind, std::size_t width, std::shared_ptr<const detail::Predictor> impl)
    : kind_(kind), width_(width), impl_(std::move(impl)) {}

bool TrainedModel::is_constant() const { return impl_->is_constant(); }

const std::vector<double>& TrainedModel::loss_history() const { return impl_->loss_history; }

const Standardizer* TrainedModel::standardizer() const {
    return impl_->standardizer ? &*impl_->standardizer : nullptr;
}

namespace {

void check_training(MatrixView x, std::size_t y_size) {
    if (x.rows() == 0) {
        throw Error(ErrorCode::EmptyTraining, "no training rows");
    }
    if (x.cols == 0) {
        throw Error(ErrorCode::WidthMismatch, "training rows have zero width");
    }
    if (y_size != x.rows()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(x.rows()) + " rows but " + std::to_string(y_size) + " targets");
    }
    for (double v : x.values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteInput, "non-finite feature value in training rows");
        }
    }
}

std::shared_ptr<const Predictor> dispatch(ModelKind kind, const Params& params, MatrixView x,
                                          std::span<const double> y, std::uint64_t seed) {
    switch (kind) {
        case ModelKind::LogisticC:
        case ModelKind::RidgeC:
        case ModelKind::PerceptronC:
        case ModelKind::SgdC:
        case ModelKind::OlsR:
        case ModelKind::RidgeR:
        case ModelKind::SgdR:
            return detail::fit_linear(kind, params, x, y, seed);
        case ModelKind::KnnC:
        case ModelKind::KnnR:
            return detail::fit_neighbors(kind, params, x, y);
        case ModelKind::BernoulliNbC:
            return detail::fit_bernoulli_nb(params, x, y);
        default:
            return detail::fit_tree_family(kind, params, x, y, seed);
    }
}

void check_query(const TrainedModel& model, std::span<const double> x, Task expected) {
    if (model.task() != expected) {
        throw Error(ErrorCode::KindMismatch, std::string(kind_name(model.kind())) + " is a " +
                                                 std::string(task_name(model.task())));
    }
    if (x.size() != model.feature_width()) {
        throw Error(ErrorCode::WidthMismatch, "expected " + std::to_string(model.feature_width()) +
                                                  " features, got " + std::to_string(x.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteInput, "non-finite feature value");
        }
    }
}

}  // namespace

TrainedModel fit(const ModelSpec& spec, MatrixView x, std::span<const Direction> y) {
    if (task_of(spec.kind) != Task::Classifier) {
        throw Error(ErrorCode::KindMismatch, std::string(kind_name(spec.kind)) + " needs real-valued targets");
    }
    check_training(x, y.size());
    const auto params = resolve_params(spec.kind, spec.params);

    std::vector<double> labels(y.size());
    std::size_t ups = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        labels[i] = y[i] == Direction::Up ? 1.0 : -1.0;
        ups += y[i] == Direction::Up ? 1 : 0;
    }
    if (x.rows() < 2 || ups == 0 || ups == y.size()) {
        const double score = ups > 0 ? 0.5 : -0.5;
        return {spec.kind, x.cols, std::make_shared<ConstantPredictor>(score)};
    }
    return {spec.kind, x.cols, dispatch(spec.kind, params, x, labels, spec.seed)};
}

TrainedModel fit(const ModelSpec& spec, MatrixView x, std::span<const double> y) {
    if (task_of(spec.kind) != Task::Regressor) {
        throw Error(ErrorCode::KindMismatch, std::string(kind_name(spec.kind)) + " needs class targets");
    }
    check_training(x, y.size());
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteInput, "non-finite regression target");
        }
    }
    const auto params = resolve_params(spec.kind, spec.params);
    if (x.rows() < 2) {
        return {spec.kind, x.cols, std::make_shared<ConstantPredictor>(y[0])};
    }
    return {spec.kind, x.cols, dispatch(spec.kind, params, x, y, spec.seed)};
}

ClassPrediction predict_class(const TrainedModel& model, std::span<const double> x) {
    check_query(model, x, Task::Classifier);
    const double score = model.impl().evaluate(x);
    return {score > 0.0 ? Direction::Up : Direction::Down, score};
}

double predict_value(const TrainedModel& model, std::span<const double> x) {
    check_query(model, x, Task::Regressor);
    return model.impl().evaluate(x);
}

ClassPrediction ensemble_aggregate(std::span<const Direction> votes) {
    if (votes.empty()) {
        throw Error(ErrorCode::EmptyEnsemble, "no member votes");
    }
    std::size_t ups = 0;
    for (auto v : votes) {
        ups += v == Direction::Up ? 1 : 0;
    }
    const double score = static_cast<double>(ups) / static_cast<double>(votes.size()) - 0.5;
    return {score > 0.0 ? Direction::Up : Direction::Down, score};
}

double ensemble_aggregate(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyEnsemble, "no member outputs");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double gini_impurity(std::span<const double> labels) {
    if (labels.empty()) {
        return 0.0;
    }
    std::size_t ups = 0;
    for (double v : labels) {
        ups += v > 0.0 ? 1 : 0;
    }
    const double p = static_cast<double>(ups) / static_cast<double>(labels.size());
    const double q = 1.0 - p;
    return 1.0 - p * p - q * q;
}

double variance_impurity(std::span<const double> values) {
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
        return 0.0;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return ss / static_cast<double>(values.size());
}

}  // namespace wfbt
