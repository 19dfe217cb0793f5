#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "smartbeta/date.hpp"
#include "smartbeta/market_data.hpp"

namespace smartbeta::indicators {

/// Relative Strength Index over the trailing `period` close-to-close changes,
/// using simple means of gains and losses. Needs `period + 1` closes.
double rsi(std::span<const double> closes, std::size_t period = 14);

struct Stochastic {
    double k = 0.0;  // latest %k, 0..100
    double d = 0.0;  // mean of the last d_period %k values, 0..100
};

/// %k uses bar highs and lows over `k_period` days. Needs
/// `k_period + d_period - 1` bars. Throws DegenerateRangeError when any
/// window has highest == lowest.
Stochastic stochastic(std::span<const Bar> bars, std::size_t k_period = 21,
                      std::size_t d_period = 3);

/// SMA(short) / SMA(long) of the trailing closes.
double ma_crossover(std::span<const double> closes, std::size_t short_window = 21,
                    std::size_t long_window = 42);

/// mean(volume over window) * latest close.
double avg_dollar_volume(std::span<const Bar> bars, std::size_t window = 21);

using RankMap = std::map<std::string, int>;

/// Rank 1 = highest value. Ties go to the lexicographically smaller symbol.
RankMap cross_sectional_rank(const std::map<std::string, double>& values);

enum class Feature : std::size_t { rsi = 0, stoch_d = 1, ma_crossover = 2, avg_dollar_volume = 3 };
inline constexpr std::size_t kFeatureCount = 4;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames{"rsi", "stoch_d",
                                                                      "ma_crossover", "adv"};

struct FeatureVector {
    std::string symbol;
    double rsi = 0.0;
    double stoch_d = 0.0;
    double ma_crossover = 0.0;
    double avg_dollar_volume = 0.0;

    double value(Feature f) const;
};

struct FeatureParams {
    std::size_t rsi_period = 14;
    std::size_t k_period = 21;
    std::size_t d_period = 3;
    std::size_t ma_short = 21;
    std::size_t ma_long = 42;
    std::size_t adv_window = 21;

    /// Bars needed on the as-of date for every feature to be defined.
    std::size_t lookback() const;
};

/// Cross-section of raw features and their per-feature ranks on one date.
struct FeatureMatrix {
    Date as_of;
    std::vector<FeatureVector> rows;                // sorted by symbol
    std::array<RankMap, kFeatureCount> ranks;       // per feature, over `rows`

    std::size_t size() const noexcept { return rows.size(); }
    /// Rank vector for one symbol, in Feature order. Throws InvalidArgument when absent.
    std::vector<double> rank_vector(const std::string& symbol) const;
};

/// Assembles a FeatureMatrix from raw rows (ranks are computed here).
FeatureMatrix make_feature_matrix(const Date& as_of, std::vector<FeatureVector> rows);

/// Features for every universe symbol on calendar day `t`. Symbols lacking a
/// complete lookback window or with a degenerate stochastic range are left out.
FeatureMatrix compute_features(const MarketData& data, std::size_t t,
                               const FeatureParams& params = {});

/// CSV: symbol,rsi,stoch_d,ma_crossover,adv,rank_rsi,rank_stoch_d,rank_mac,rank_adv
void write_features_csv(std::ostream& out, const FeatureMatrix& matrix);

}  // namespace smartbeta::indicators
