#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "smartbeta/errors.hpp"
#include "smartbeta/metrics.hpp"
#include "smartbeta/random.hpp"
#include "test_support.hpp"

namespace smartbeta::metrics {
namespace {

EquityCurve curve_of(const std::vector<double>& values) {
    return {test::weekdays("2021-01-04", values.size()), values};
}

TEST(Sharpe, ConstantReturnsAreUndefined) {
    const std::vector<double> r(30, 0.001);
    EXPECT_THROW(sharpe(r), DomainError);
    EXPECT_THROW(sharpe(std::span(r).first(1)), InsufficientHistoryError);
}

TEST(Sharpe, MeanOverStdTimesRootDays) {
    // Returns with mean exactly 0.0004 and sample std exactly 0.01.
    std::vector<double> r;
    const double half = 0.01 * std::sqrt(99.0 / 100.0);
    for (int i = 0; i < 100; ++i) r.push_back(0.0004 + (i % 2 == 0 ? half : -half));
    EXPECT_NEAR(sample_stddev(r), 0.01, 1e-15);
    EXPECT_NEAR(sharpe(r), 0.6349803146555018, 1e-12);
}

TEST(Sharpe, NegationAndRiskFree) {
    Rng rng(1);
    std::vector<double> r;
    for (int i = 0; i < 252; ++i) r.push_back(0.0005 + 0.01 * rng.normal());
    std::vector<double> neg;
    for (double x : r) neg.push_back(-x);
    EXPECT_EQ(sharpe(neg), -sharpe(r));
    std::vector<double> excess;
    for (double x : r) excess.push_back(x - 0.02 / 252.0);
    EXPECT_NEAR(sharpe(r, 0.02), sharpe(excess), 1e-12);
}

TEST(PortfolioBeta, Examples) {
    Rng rng(5);
    std::vector<double> m;
    for (int i = 0; i < 500; ++i) m.push_back(0.01 * rng.normal());
    EXPECT_EQ(portfolio_beta(m, m), 1.0);
    std::vector<double> neg;
    for (double x : m) neg.push_back(-x);
    EXPECT_NEAR(portfolio_beta(neg, m), -1.0, 1e-12);

    std::vector<double> big_m, noise;
    for (int i = 0; i < 10000; ++i) {
        big_m.push_back(0.01 * rng.normal());
        noise.push_back(0.01 * rng.normal());
    }
    EXPECT_LT(std::abs(portfolio_beta(noise, big_m)), 0.05);
}

TEST(MaxDrawdown, Examples) {
    EXPECT_EQ(max_drawdown(std::vector<double>{100, 50, 75}), 0.5);
    EXPECT_EQ(max_drawdown(std::vector<double>{1, 2, 3, 4}), 0.0);
    EXPECT_EQ(max_drawdown(std::vector<double>{100, 120, 60, 130}), 0.5);
    EXPECT_THROW(max_drawdown(std::vector<double>{100, 0}), DomainError);
    EXPECT_THROW(max_drawdown(std::vector<double>{}), InvalidArgument);
}

TEST(MaxDrawdown, ScaleInvariantAndBounded) {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v{100.0};
        for (int i = 0; i < 200; ++i) v.push_back(v.back() * std::exp(0.03 * rng.normal()));
        std::vector<double> scaled;
        for (double x : v) scaled.push_back(x * 8.0);
        const double dd = max_drawdown(v);
        EXPECT_EQ(max_drawdown(scaled), dd);
        EXPECT_GE(dd, 0.0);
        EXPECT_LT(dd, 1.0);
    }
}

TEST(Volatility, Examples) {
    EXPECT_EQ(annualized_volatility(std::vector<double>(20, 0.003)), 0.0);
    std::vector<double> alt;
    for (int i = 0; i < 252; ++i) alt.push_back(i % 2 == 0 ? 0.01 : -0.01);
    EXPECT_NEAR(annualized_volatility(alt), 0.1590609895806464, 1e-12);
    std::vector<double> r, twice;
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        r.push_back(0.01 * rng.normal());
        twice.push_back(2.0 * r.back());
    }
    EXPECT_EQ(annualized_volatility(twice), 2.0 * annualized_volatility(r));
    EXPECT_THROW(annualized_volatility(std::vector<double>{0.1}), InsufficientHistoryError);
}

TEST(BuildReport, SelfReport) {
    std::vector<double> v{100.0};
    Rng rng(12);
    for (int i = 0; i < 300; ++i) v.push_back(v.back() * (1.0 + 0.01 * rng.normal()));
    const auto c = curve_of(v);
    const auto r = build_report(c, c);
    EXPECT_EQ(r.beta, 1.0);
    EXPECT_EQ(r.n_days, 301u);
    EXPECT_NEAR(r.total_return, v.back() / v.front() - 1.0, 1e-15);
    EXPECT_EQ(*r.sharpe, sharpe(c.daily_returns()));
    EXPECT_EQ(r.annual_volatility, annualized_volatility(c.daily_returns()));
}

TEST(BuildReport, FlatCurveHasNullSharpe) {
    std::vector<double> bench{100.0};
    for (int i = 0; i < 20; ++i) bench.push_back(bench.back() * (i % 2 == 0 ? 1.01 : 0.995));
    const auto r = build_report(curve_of(std::vector<double>(21, 5.0)), curve_of(bench));
    EXPECT_EQ(r.total_return, 0.0);
    EXPECT_EQ(r.max_drawdown, 0.0);
    EXPECT_FALSE(r.sharpe.has_value());
    EXPECT_FALSE(r.sharpe_null_reason.empty());
    EXPECT_EQ(r.beta, 0.0);
}

TEST(BuildReport, UsesDateIntersection) {
    auto a = curve_of({100, 101, 102, 103, 104});
    auto b = curve_of({10, 11, 12, 13, 14});
    b.dates.erase(b.dates.begin() + 2);
    b.values.erase(b.values.begin() + 2);
    EXPECT_EQ(build_report(a, b).n_days, 4u);
    EquityCurve disjoint{{parse_date("2030-01-02")}, {1.0}};
    EXPECT_THROW(build_report(a, disjoint), InvalidArgument);
}

TEST(Spearman, Basics) {
    EXPECT_EQ(spearman(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
    EXPECT_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 300}), 1.0);
    EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 2, 2}),
                0.8944271909999159, 1e-12);
    EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{3, 3}), DomainError);
}

}  // namespace
}  // namespace smartbeta::metrics
