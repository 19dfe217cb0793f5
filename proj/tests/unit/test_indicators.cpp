#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "smartbeta/errors.hpp"
#include "smartbeta/indicators.hpp"
#include "smartbeta/random.hpp"
#include "goldens.hpp"
#include "test_support.hpp"

namespace smartbeta::indicators {
namespace {

std::vector<Bar> flat_bars(const std::vector<double>& highs, const std::vector<double>& lows,
                           const std::vector<double>& closes) {
    const auto dates = test::weekdays("2021-01-04", closes.size());
    std::vector<Bar> bars;
    for (std::size_t i = 0; i < closes.size(); ++i) {
        bars.push_back({dates[i], closes[i], highs[i], lows[i], closes[i], 100});
    }
    return bars;
}

using test::rsi_fixture;

TEST(Rsi, StrictlyIncreasingIs100) {
    std::vector<double> c;
    for (int i = 0; i < 15; ++i) c.push_back(10.0 + i);
    EXPECT_EQ(rsi(c), 100.0);
}

TEST(Rsi, AlternatingEqualMovesIs50) {
    std::vector<double> c{10.0};
    for (int i = 0; i < 14; ++i) c.push_back(c.back() + (i % 2 == 0 ? 1.0 : -1.0));
    EXPECT_NEAR(rsi(c), 50.0, 1e-9);
}

TEST(Rsi, MeanGainThreeTimesMeanLossIs75) {
    EXPECT_NEAR(rsi(rsi_fixture()), 75.0, 1e-9);
    EXPECT_NEAR(rsi(rsi_fixture()), test::kRsiFixture, 1e-12);
}

TEST(Rsi, StrictlyDecreasingIs0AndShortInputThrows) {
    std::vector<double> c;
    for (int i = 0; i < 15; ++i) c.push_back(50.0 - i);
    EXPECT_EQ(rsi(c), 0.0);
    c.pop_back();
    EXPECT_THROW(rsi(c), InsufficientHistoryError);
}

TEST(Rsi, FlatSeriesFollowsZeroLossRule) { EXPECT_EQ(rsi(std::vector<double>(15, 3.0)), 100.0); }

TEST(Rsi, UsesOnlyTrailingWindow) {
    auto c = rsi_fixture();
    c.insert(c.begin(), {500.0, 1.0, 900.0});
    EXPECT_NEAR(rsi(c), 75.0, 1e-9);
}

TEST(Stochastic, CloseAtHighIs100AtLowIs0) {
    std::vector<double> highs(23, 10.0), lows(23, 1.0), closes(23, 10.0);
    auto s = stochastic(flat_bars(highs, lows, closes));
    EXPECT_EQ(s.k, 100.0);
    EXPECT_EQ(s.d, 100.0);
    closes.assign(23, 1.0);
    s = stochastic(flat_bars(highs, lows, closes));
    EXPECT_EQ(s.k, 0.0);
    EXPECT_EQ(s.d, 0.0);
}

TEST(Stochastic, CloseThreeQuartersUpIs75) {
    std::vector<double> highs(23, 10.0), lows(23, 0.0), closes(23, 7.5);
    const auto s = stochastic(flat_bars(highs, lows, closes));
    EXPECT_NEAR(s.k, 75.0, 1e-9);
    EXPECT_NEAR(s.d, 75.0, 1e-9);
}

TEST(Stochastic, DegenerateRangeThrows) {
    std::vector<double> same(23, 5.0);
    EXPECT_THROW(stochastic(flat_bars(same, same, same)), DegenerateRangeError);
    std::vector<double> few(22, 5.0);
    EXPECT_THROW(stochastic(flat_bars(few, few, few)), InsufficientHistoryError);
}

TEST(Stochastic, DLiesBetweenItsKValues) {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> highs, lows, closes;
        double p = 50.0;
        for (int i = 0; i < 23; ++i) {
            p *= 1.0 + 0.02 * rng.normal();
            closes.push_back(p);
            highs.push_back(p * (1.0 + 0.01 * rng.uniform()));
            lows.push_back(p * (1.0 - 0.01 * rng.uniform()));
        }
        const auto bars = flat_bars(highs, lows, closes);
        const std::span<const Bar> all(bars);
        std::vector<double> ks;
        for (std::size_t end = 21; end <= 23; ++end) ks.push_back(stochastic(all.first(end), 21, 1).k);
        const auto s = stochastic(bars);
        EXPECT_GE(s.d, *std::min_element(ks.begin(), ks.end()) - 1e-12);
        EXPECT_LE(s.d, *std::max_element(ks.begin(), ks.end()) + 1e-12);
        EXPECT_NEAR(s.k, ks.back(), 1e-12);
    }
}

TEST(MaCrossover, Examples) {
    EXPECT_EQ(ma_crossover(std::vector<double>(42, 9.0)), 1.0);
    std::vector<double> c(21, 1.0);
    c.insert(c.end(), 21, 2.0);
    EXPECT_NEAR(ma_crossover(c), 4.0 / 3.0, 1e-12);
    std::vector<double> up;
    for (int i = 0; i < 60; ++i) up.push_back(1.0 + i);
    EXPECT_GT(ma_crossover(up), 1.0);
    EXPECT_THROW(ma_crossover(std::vector<double>(41, 1.0)), InsufficientHistoryError);
}

TEST(AvgDollarVolume, Examples) {
    auto bars = test::bars_from_closes(test::weekdays("2021-01-04", 21), std::vector<double>(21, 4.0), 250);
    EXPECT_EQ(avg_dollar_volume(bars), 1000.0);
    for (auto& b : bars) b.volume = 0;
    EXPECT_EQ(avg_dollar_volume(bars), 0.0);

    auto three = test::bars_from_closes(test::weekdays("2021-01-04", 3), {8.0, 9.0, 10.0});
    three[0].volume = 100;
    three[1].volume = 200;
    three[2].volume = 300;
    EXPECT_EQ(avg_dollar_volume(three, 3), 2000.0);
    EXPECT_THROW(avg_dollar_volume(three, 4), InsufficientHistoryError);
}

TEST(CrossSectionalRank, Examples) {
    EXPECT_EQ(cross_sectional_rank({{"A", 3}, {"B", 1}, {"C", 2}}), (RankMap{{"A", 1}, {"B", 3}, {"C", 2}}));
    EXPECT_EQ(cross_sectional_rank({{"Z", -4}}), (RankMap{{"Z", 1}}));
    EXPECT_EQ(cross_sectional_rank({{"A", 5}, {"B", 5}}), (RankMap{{"A", 1}, {"B", 2}}));
    EXPECT_THROW(cross_sectional_rank({}), InvalidArgument);
    try {
        cross_sectional_rank({{"A", 1.0}, {"BAD", std::nan("")}});
        FAIL() << "expected InvalidArgument";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("BAD"), std::string::npos);
    }
}

TEST(CrossSectionalRank, PermutationAndTransformProperties) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::map<std::string, double> values;
        for (std::size_t i = 0; i < n; ++i) {
            values["S" + std::to_string(i)] = trial % 2 == 0 ? rng.normal()
                                                             : static_cast<double>(rng.below(4));
        }
        const auto ranks = cross_sectional_rank(values);

        std::set<int> seen;
        for (const auto& [_, r] : ranks) seen.insert(r);
        ASSERT_EQ(seen.size(), n);
        EXPECT_EQ(*seen.begin(), 1);
        EXPECT_EQ(*seen.rbegin(), static_cast<int>(n));

        // Strictly increasing transform leaves ranks unchanged.
        std::map<std::string, double> transformed;
        for (const auto& [s, v] : values) transformed[s] = std::exp(0.3 * v) + 5.0;
        EXPECT_EQ(cross_sectional_rank(transformed), ranks);

        // Rank 1 marks the highest value, so ranking the negated ranks
        // reproduces them, and ranking the ranks reverses them.
        std::map<std::string, double> neg;
        std::map<std::string, double> pos;
        for (const auto& [s, r] : ranks) {
            neg[s] = -r;
            pos[s] = r;
        }
        EXPECT_EQ(cross_sectional_rank(neg), ranks);
        const auto reranked = cross_sectional_rank(pos);
        for (const auto& [s, r] : ranks) EXPECT_EQ(reranked.at(s), static_cast<int>(n) + 1 - r);
    }
}

TEST(ScaleInvariance, RsiAndStochastic) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> highs, lows, closes;
        double p = 20.0 + 80.0 * rng.uniform();
        for (int i = 0; i < 30; ++i) {
            p *= 1.0 + 0.02 * rng.normal();
            closes.push_back(p);
            highs.push_back(p * (1.0 + 0.01 * rng.uniform()));
            lows.push_back(p * (1.0 - 0.01 * rng.uniform()));
        }
        const double k = 0.01 + 100.0 * rng.uniform();
        auto scale = [k](std::vector<double> v) {
            for (auto& x : v) x *= k;
            return v;
        };
        EXPECT_NEAR(rsi(closes), rsi(scale(closes)), 1e-9);
        const auto a = stochastic(flat_bars(highs, lows, closes));
        const auto b = stochastic(flat_bars(scale(highs), scale(lows), scale(closes)));
        EXPECT_NEAR(a.k, b.k, 1e-9);
        EXPECT_NEAR(a.d, b.d, 1e-9);
        const double r = rsi(closes);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 100.0);
    }
}

TEST(ComputeFeatures, ExcludesShortHistoryAndDegenerateSymbols) {
    const auto dates = test::weekdays("2021-01-04", 60);
    std::map<std::string, std::vector<double>> closes;
    for (const char* s : {"AAA", "BBB", "CCC"}) {
        std::vector<double> path;
        for (int i = 0; i < 60; ++i) path.push_back(50.0 + std::sin(i + s[0]) * 3.0 + 0.1 * i);
        closes[s] = path;
    }
    closes["IDX"] = std::vector<double>(60, 1000.0);
    SeriesMap series;
    for (const auto& [s, path] : closes) series[s] = PriceSeries{s, test::bars_from_closes(dates, path), {}};
    // FLAT has no high/low range; SHORT starts late.
    std::vector<Bar> flat = test::bars_from_closes(dates, std::vector<double>(60, 5.0));
    for (auto& b : flat) b.high = b.low = b.close;
    series["FLAT"] = PriceSeries{"FLAT", flat, {}};
    auto late = test::bars_from_closes(dates, std::vector<double>(60, 8.0));
    late.erase(late.begin(), late.begin() + 30);
    series["SHORT"] = PriceSeries{"SHORT", late, {}};
    const MarketData data(TradingCalendar(dates), series, "IDX");

    const auto m = compute_features(data, 59);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m.rows[0].symbol, "AAA");
    EXPECT_EQ(m.rows[2].symbol, "CCC");
    for (const auto& ranks : m.ranks) EXPECT_EQ(ranks.size(), 3u);
    EXPECT_EQ(m.rank_vector("BBB").size(), kFeatureCount);
    EXPECT_THROW(m.rank_vector("FLAT"), InvalidArgument);
    EXPECT_TRUE(compute_features(data, 40).rows.empty());

    std::ostringstream csv;
    write_features_csv(csv, m);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
              "symbol,rsi,stoch_d,ma_crossover,adv,rank_rsi,rank_stoch_d,rank_mac,rank_adv");
}

}  // namespace
}  // namespace smartbeta::indicators
