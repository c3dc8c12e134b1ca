#pragma once

#include "wfbt/dataset.hpp"

#include "oracles.hpp"

#include <memory>
#include <vector>

namespace fixture {

/// Hand-built dataset: row t carries `features[t]` and targets `returns[t]`.
/// One extra trailing row without a target is appended so that every given
/// row is usable.
inline std::shared_ptr<const wfbt::LabeledDataset> dataset(const std::vector<std::vector<double>>& features,
                                                           const std::vector<double>& returns,
                                                           std::int64_t t0 = oracle::kT0) {
    const std::size_t n = features.size() + 1;
    const std::size_t width = features.empty() ? 1 : features.front().size();
    wfbt::LabeledDataset ds;
    ds.frame.feature_names.assign(width, "f");
    for (std::size_t j = 0; j < width; ++j) ds.frame.feature_names[j] += std::to_string(j);
    ds.frame.rows = wfbt::RowMatrix(n, width, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        ds.frame.timestamps.push_back(t0 + static_cast<std::int64_t>(t) * oracle::kDay);
        if (t < features.size()) {
            for (std::size_t j = 0; j < width; ++j) ds.frame.rows(t, j) = features[t][j];
        }
    }
    ds.frame.valid_from = 0;
    ds.class_target.assign(n, wfbt::Direction::Down);
    ds.reg_target.assign(n, wfbt::kUndefined);
    for (std::size_t t = 0; t < returns.size(); ++t) {
        ds.reg_target[t] = returns[t];
        ds.class_target[t] = returns[t] > 0.0 ? wfbt::Direction::Up : wfbt::Direction::Down;
    }
    ds.usable_begin = 0;
    ds.usable_end = n - 1;
    return std::make_shared<const wfbt::LabeledDataset>(std::move(ds));
}

inline wfbt::DatasetView whole(const std::shared_ptr<const wfbt::LabeledDataset>& ds) {
    return wfbt::DatasetView(ds, ds->usable_begin, ds->usable_end);
}

/// Random features with returns driven by a noisy linear signal.
inline std::shared_ptr<const wfbt::LabeledDataset> random_dataset(std::size_t rows, std::size_t width,
                                                                  std::uint64_t seed) {
    oracle::TestRng rng(seed);
    std::vector<std::vector<double>> x(rows, std::vector<double>(width));
    std::vector<double> r(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        double signal = 0.0;
        for (std::size_t j = 0; j < width; ++j) {
            x[t][j] = rng.normal();
            signal += (j % 2 == 0 ? 1.0 : -0.5) * x[t][j];
        }
        r[t] = 0.01 * signal + 0.01 * rng.normal();
    }
    return dataset(x, r);
}

/// Single-step momentum: labels come in runs of random length 2..7 and the
/// only feature is the row index, so the nearest neighbours of a row are the
/// rows just before it and k = 1 tracks the current run.
inline std::shared_ptr<const wfbt::LabeledDataset> momentum_dataset(std::size_t rows = 200) {
    oracle::TestRng rng(17);
    std::vector<std::vector<double>> x;
    std::vector<double> r;
    double sign = 1.0;
    std::size_t left = 0;
    for (std::size_t t = 0; t < rows; ++t) {
        if (left == 0) {
            sign = -sign;
            left = 2 + rng.index(6);
        }
        --left;
        x.push_back({static_cast<double>(t)});
        r.push_back(sign * (0.005 + 0.01 * rng.uniform()));
    }
    return dataset(x, r);
}

}  // namespace fixture
