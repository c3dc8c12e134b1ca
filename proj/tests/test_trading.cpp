#include "wfbt/error.hpp"
#include "wfbt/trading.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <functional>

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

PositionSeries positions(const std::vector<int>& p) {
    PositionSeries s;
    for (std::size_t i = 0; i < p.size(); ++i) s.timestamps.push_back(oracle::kT0 + static_cast<std::int64_t>(i) * oracle::kDay);
    s.positions = p;
    return s;
}

std::vector<int> random_positions(oracle::TestRng& rng, std::size_t n) {
    std::vector<int> p(n);
    for (auto& x : p) x = static_cast<int>(rng.index(3)) - 1;
    return p;
}

std::vector<double> random_returns(oracle::TestRng& rng, std::size_t n) {
    std::vector<double> r(n);
    for (auto& x : r) x = 0.03 * rng.normal();
    return r;
}

}  // namespace

TEST(Simulate, LongThroughUpAndDown) {
    const std::vector<double> r{0.10, -0.05};
    const auto sim = simulate(positions({1, 1}), r, {0.0});
    EXPECT_NEAR(sim.curve.equity.back(), 0.05, 1e-15);
    EXPECT_EQ(count_trades(sim.ledger), 1u);
    EXPECT_NEAR(pnl_percent(sim.curve), 5.0, 1e-12);
}

TEST(Simulate, FeesOnEveryChange) {
    const std::vector<double> r{0.0, 0.0, 0.0};
    const auto sim = simulate(positions({1, -1, 1}), r, {10.0});
    EXPECT_NEAR(sim.curve.equity.back(), -0.003, 1e-15);
    EXPECT_EQ(count_trades(sim.ledger), 3u);
}

TEST(Simulate, FlatEarnsNothing) {
    const std::vector<double> r{0.2, -0.3, 0.1};
    const auto sim = simulate(positions({0, 0, 0}), r, {25.0});
    for (double e : sim.curve.equity) EXPECT_EQ(e, 0.0);
    EXPECT_EQ(count_trades(sim.ledger), 0u);
}

TEST(Simulate, TradeCountFromFlatStart) {
    const std::vector<double> r(5, 0.0);
    const auto sim = simulate(positions({1, 1, -1, -1, 1}), r, {0.0});
    EXPECT_EQ(count_trades(sim.ledger), 3u);
    EXPECT_EQ(sim.ledger.trades[1].old_position, 1);
    EXPECT_EQ(sim.ledger.trades[1].new_position, -1);
}

TEST(Simulate, Errors) {
    const std::vector<double> two{0.0, 0.0};
    EXPECT_EQ(code_of([&] { simulate(positions({1}), two, {0.0}); }), ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([&] { simulate(positions({1, 2}), two, {0.0}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { simulate(positions({1, 1}), two, {-1.0}); }), ErrorCode::InvalidConfig);
    const std::vector<double> bad{0.0, std::nan("")};
    EXPECT_EQ(code_of([&] { simulate(positions({1, 1}), bad, {0.0}); }), ErrorCode::NonFiniteInput);
    EXPECT_EQ(code_of([] { pnl_percent(EquityCurve{}); }), ErrorCode::TooFewObservations);
}

TEST(Simulate, SimpleReturn) {
    EXPECT_EQ(simple_return(0.0), 0.0);
    EXPECT_NEAR(simple_return(std::log(1.1)), 0.1, 1e-15);
}

TEST(SimulateProperty, AdditiveOverConcatenation) {
    oracle::TestRng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 2 + rng.index(40);
        const auto cut = 1 + rng.index(n - 1);
        const auto p = random_positions(rng, n);
        const auto r = random_returns(rng, n);
        const CostModel cost{rng.uniform(0.0, 30.0)};
        const auto whole = simulate(positions(p), r, cost);
        const auto head = simulate(positions({p.begin(), p.begin() + static_cast<std::ptrdiff_t>(cut)}),
                                   std::span(r).first(cut), cost);
        // The tail starts from the head's final position: prepend it as a free step.
        std::vector<int> tail_p{p[cut - 1]};
        tail_p.insert(tail_p.end(), p.begin() + static_cast<std::ptrdiff_t>(cut), p.end());
        std::vector<double> tail_r{0.0};
        tail_r.insert(tail_r.end(), r.begin() + static_cast<std::ptrdiff_t>(cut), r.end());
        const auto tail = simulate(positions(tail_p), tail_r, cost);
        const double opening_fee = p[cut - 1] != 0 ? cost.fee_bps / 1e4 : 0.0;
        EXPECT_NEAR(whole.curve.equity.back(), head.curve.equity.back() + tail.curve.equity.back() + opening_fee,
                    1e-12);
    }
}

TEST(SimulateProperty, FeesNeverHelp) {
    oracle::TestRng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + rng.index(40);
        const auto p = random_positions(rng, n);
        const auto r = random_returns(rng, n);
        const double lo = rng.uniform(0.0, 20.0);
        const double hi = lo + rng.uniform(0.0, 20.0);
        const auto a = simulate(positions(p), r, {lo});
        const auto b = simulate(positions(p), r, {hi});
        EXPECT_LE(b.curve.equity.back(), a.curve.equity.back() + 1e-15);
        const double expected_gap = (hi - lo) / 1e4 * static_cast<double>(a.ledger.count());
        EXPECT_NEAR(a.curve.equity.back() - b.curve.equity.back(), expected_gap, 1e-12);
    }
}

TEST(SimulateProperty, BoundedByPerfectForesight) {
    oracle::TestRng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + rng.index(40);
        const auto p = random_positions(rng, n);
        const auto r = random_returns(rng, n);
        double bound = 0.0;
        for (double x : r) bound += std::fabs(x);
        EXPECT_LE(simulate(positions(p), r, {rng.uniform(0.0, 20.0)}).curve.equity.back(), bound + 1e-15);
    }
}

TEST(SimulateProperty, SignSymmetryWithoutFees) {
    oracle::TestRng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + rng.index(40);
        auto p = random_positions(rng, n);
        const auto r = random_returns(rng, n);
        const auto a = simulate(positions(p), r, {0.0});
        for (auto& x : p) x = -x;
        const auto b = simulate(positions(p), r, {0.0});
        EXPECT_NEAR(a.curve.equity.back(), -b.curve.equity.back(), 1e-15);
        EXPECT_EQ(a.ledger.count(), b.ledger.count());
    }
}

TEST(EquityCsv, Header) {
    const std::vector<double> r{0.01};
    const auto csv = equity_csv(simulate(positions({1}), r, {0.0}).curve);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "timestamp,equity_fraction");
}
