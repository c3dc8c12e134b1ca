#include "predictor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>

namespace wfbt::detail {

namespace {

/// w . x + b, optionally on standardized inputs.
class LinearPredictor final : public Predictor {
public:
    enum class Output { Margin, ProbabilityMinusHalf };

    LinearPredictor(std::vector<double> weights, double bias, Output output)
        : weights_(std::move(weights)), bias_(bias), output_(output) {}

    double evaluate(std::span<const double> x) const override {
        double m = bias_;
        if (standardizer) {
            for (std::size_t j = 0; j < x.size(); ++j) {
                m += weights_[j] * ((x[j] - standardizer->mean[j]) / standardizer->scale[j]);
            }
        } else {
            for (std::size_t j = 0; j < x.size(); ++j) {
                m += weights_[j] * x[j];
            }
        }
        if (output_ == Output::ProbabilityMinusHalf) {
            return sigmoid(m) - 0.5;
        }
        return m;
    }

    static double sigmoid(double m) {
        if (m >= 0.0) {
            return 1.0 / (1.0 + std::exp(-m));
        }
        const double e = std::exp(m);
        return e / (1.0 + e);
    }

private:
    std::vector<double> weights_;
    double bias_;
    Output output_;
};

/// Solves (A'A + lambda D) beta = A'y on the intercept-augmented design,
/// D = diag(0, 1, ..., 1), so the intercept is not shrunk. Rank-deficient
/// systems get the minimum-norm solution.
std::shared_ptr<Predictor> fit_ridge(MatrixView x, std::span<const double> y, double lambda) {
    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto d = static_cast<Eigen::Index>(x.cols);
    Eigen::MatrixXd a(n, d + 1);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            a(i, j + 1) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
        b(i) = y[static_cast<std::size_t>(i)];
    }
    Eigen::MatrixXd gram = a.transpose() * a;
    for (Eigen::Index j = 1; j <= d; ++j) {
        gram(j, j) += lambda;
    }
    const Eigen::VectorXd rhs = a.transpose() * b;
    const Eigen::VectorXd beta = gram.completeOrthogonalDecomposition().solve(rhs);
    std::vector<double> w(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
        w[static_cast<std::size_t>(j)] = beta(j + 1);
    }
    return std::make_shared<LinearPredictor>(std::move(w), beta(0), LinearPredictor::Output::Margin);
}

enum class Loss { Log, Hinge, Squared };

double loss_value(Loss loss, double margin, double target) {
    switch (loss) {
        case Loss::Log: {
            const double z = -target * margin;
            return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        }
        case Loss::Hinge:
            return std::max(0.0, 1.0 - target * margin);
        case Loss::Squared:
            return 0.5 * (margin - target) * (margin - target);
    }
    return 0.0;
}

double loss_slope(Loss loss, double margin, double target) {
    switch (loss) {
        case Loss::Log:
            return -target * LinearPredictor::sigmoid(-target * margin);
        case Loss::Hinge:
            return target * margin < 1.0 ? -target : 0.0;
        case Loss::Squared:
            return margin - target;
    }
    return 0.0;
}

struct GradientSettings {
    Loss loss = Loss::Log;
    double learning_rate = 0.05;
    double alpha = 1e-4;
    std::int64_t epochs = 50;
    std::int64_t batch_size = 8;
    std::uint64_t seed = 0;
};

/// Mini-batch gradient descent on mean loss + alpha/2 |w|^2 over
/// standardized rows; batches follow a seeded per-epoch shuffle.
std::shared_ptr<Predictor> fit_gradient(MatrixView x, std::span<const double> y, const GradientSettings& cfg,
                                        LinearPredictor::Output output) {
    auto standardizer = Standardizer::fit(x);
    const RowMatrix z = standardizer.apply(x);
    const auto n = z.rows();
    const auto d = z.cols;
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> grad(d);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed);
    const auto batch = static_cast<std::size_t>(cfg.batch_size);

    auto margin = [&](std::size_t i) {
        double m = b;
        const auto row = z.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            m += w[j] * row[j];
        }
        return m;
    };
    auto objective = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += loss_value(cfg.loss, margin(i), y[i]);
        }
        double norm = 0.0;
        for (double v : w) {
            norm += v * v;
        }
        return total / static_cast<double>(n) + 0.5 * cfg.alpha * norm;
    };

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[rng.index(i)]);
        }
        for (std::size_t start = 0; start < n; start += batch) {
            const auto stop = std::min(n, start + batch);
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                const auto i = order[k];
                const double slope = loss_slope(cfg.loss, margin(i), y[i]);
                const auto row = z.row(i);
                for (std::size_t j = 0; j < d; ++j) {
                    grad[j] += slope * row[j];
                }
                grad_b += slope;
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (std::size_t j = 0; j < d; ++j) {
                w[j] -= cfg.learning_rate * (grad[j] * inv + cfg.alpha * w[j]);
            }
            b -= cfg.learning_rate * grad_b * inv;
        }
        history.push_back(objective());
    }

    auto model = std::make_shared<LinearPredictor>(std::move(w), b, output);
    model->standardizer = std::move(standardizer);
    model->loss_history = std::move(history);
    return model;
}

/// Rosenblatt's rule on standardized rows in training order; stops after
/// the first epoch without mistakes.
std::shared_ptr<Predictor> fit_perceptron(MatrixView x, std::span<const double> y, double rate,
                                          std::int64_t epochs) {
    auto standardizer = Standardizer::fit(x);
    const RowMatrix z = standardizer.apply(x);
    const auto d = z.cols;
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> history;
    for (std::int64_t epoch = 0; epoch < epochs; ++epoch) {
        std::size_t mistakes = 0;
        for (std::size_t i = 0; i < z.rows(); ++i) {
            const auto row = z.row(i);
            double m = b;
            for (std::size_t j = 0; j < d; ++j) {
                m += w[j] * row[j];
            }
            if (y[i] * m <= 0.0) {
                for (std::size_t j = 0; j < d; ++j) {
                    w[j] += rate * y[i] * row[j];
                }
                b += rate * y[i];
                ++mistakes;
            }
        }
        history.push_back(static_cast<double>(mistakes));
        if (mistakes == 0) {
            break;
        }
    }
    auto model = std::make_shared<LinearPredictor>(std::move(w), b, LinearPredictor::Output::Margin);
    model->standardizer = std::move(standardizer);
    model->loss_history = std::move(history);
    return model;
}

GradientSettings gradient_settings(const Params& params, Loss loss, std::uint64_t seed) {
    GradientSettings cfg;
    cfg.loss = loss;
    cfg.learning_rate = param_real(params, "learning_rate");
    cfg.alpha = param_real(params, "alpha");
    cfg.epochs = param_int(params, "epochs");
    cfg.batch_size = param_int(params, "batch_size");
    cfg.seed = seed;
    return cfg;
}

}  // namespace

std::shared_ptr<const Predictor> fit_linear(ModelKind kind, const Params& params, MatrixView x, Labels y,
                                            std::uint64_t seed) {
    using Output = LinearPredictor::Output;
    switch (kind) {
        case ModelKind::OlsR:
            return fit_ridge(x, y, 0.0);
        case ModelKind::RidgeR:
        case ModelKind::RidgeC:
            return fit_ridge(x, y, param_real(params, "lambda"));
        case ModelKind::LogisticC:
            return fit_gradient(x, y, gradient_settings(params, Loss::Log, seed), Output::ProbabilityMinusHalf);
        case ModelKind::SgdC: {
            const bool hinge = param_str(params, "loss") == "hinge";
            return fit_gradient(x, y, gradient_settings(params, hinge ? Loss::Hinge : Loss::Log, seed),
                                hinge ? Output::Margin : Output::ProbabilityMinusHalf);
        }
        case ModelKind::SgdR:
            return fit_gradient(x, y, gradient_settings(params, Loss::Squared, seed), Output::Margin);
        case ModelKind::PerceptronC:
            return fit_perceptron(x, y, param_real(params, "learning_rate"), param_int(params, "epochs"));
        default:
            break;
    }
    return nullptr;
}

}  // namespace wfbt::detail
