#include "smartbeta/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "smartbeta/errors.hpp"

namespace smartbeta::indicators {

namespace {

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double percent_k(std::span<const Bar> window) {
    double hi = window.front().high;
    double lo = window.front().low;
    for (const auto& b : window) {
        hi = std::max(hi, b.high);
        lo = std::min(lo, b.low);
    }
    if (!(hi > lo)) {
        throw DegenerateRangeError(fmt::format("highest == lowest ({}) over stochastic window", hi));
    }
    return 100.0 * (window.back().close - lo) / (hi - lo);
}

}  // namespace

double rsi(std::span<const double> closes, std::size_t period) {
    if (period == 0) throw InvalidArgument("rsi period must be positive");
    if (closes.size() < period + 1) {
        throw InsufficientHistoryError(
            fmt::format("rsi needs {} closes, got {}", period + 1, closes.size()));
    }
    const auto tail = closes.last(period + 1);
    double gains = 0.0;
    double losses = 0.0;
    for (std::size_t i = 1; i < tail.size(); ++i) {
        const double change = tail[i] - tail[i - 1];
        if (change > 0.0) {
            gains += change;
        } else {
            losses -= change;
        }
    }
    if (losses == 0.0) return 100.0;
    if (gains == 0.0) return 0.0;
    // Both sums share the same divisor, so RS is their plain ratio.
    const double rs = gains / losses;
    return 100.0 - 100.0 / (1.0 + rs);
}

Stochastic stochastic(std::span<const Bar> bars, std::size_t k_period, std::size_t d_period) {
    if (k_period == 0 || d_period == 0) throw InvalidArgument("stochastic periods must be positive");
    const std::size_t need = k_period + d_period - 1;
    if (bars.size() < need) {
        throw InsufficientHistoryError(
            fmt::format("stochastic needs {} bars, got {}", need, bars.size()));
    }
    const auto tail = bars.last(need);
    Stochastic out;
    double sum = 0.0;
    for (std::size_t j = 0; j < d_period; ++j) {
        const double k = percent_k(tail.subspan(j, k_period));
        sum += k;
        out.k = k;
    }
    out.d = sum / static_cast<double>(d_period);
    return out;
}

double ma_crossover(std::span<const double> closes, std::size_t short_window,
                    std::size_t long_window) {
    if (short_window == 0 || long_window == 0) throw InvalidArgument("MA windows must be positive");
    if (closes.size() < std::max(short_window, long_window)) {
        throw InsufficientHistoryError(
            fmt::format("ma_crossover needs {} closes, got {}", long_window, closes.size()));
    }
    const double long_sma = mean_of(closes.last(long_window));
    if (long_sma == 0.0) throw DomainError("long SMA is zero");
    return mean_of(closes.last(short_window)) / long_sma;
}

double avg_dollar_volume(std::span<const Bar> bars, std::size_t window) {
    if (window == 0) throw InvalidArgument("volume window must be positive");
    if (bars.size() < window) {
        throw InsufficientHistoryError(
            fmt::format("avg_dollar_volume needs {} bars, got {}", window, bars.size()));
    }
    double volume = 0.0;
    for (const auto& b : bars.last(window)) volume += static_cast<double>(b.volume);
    return volume / static_cast<double>(window) * bars.back().close;
}

RankMap cross_sectional_rank(const std::map<std::string, double>& values) {
    if (values.empty()) throw InvalidArgument("cannot rank an empty cross-section");
    std::vector<std::pair<const std::string*, double>> order;
    order.reserve(values.size());
    for (const auto& [symbol, v] : values) {
        if (!std::isfinite(v)) throw InvalidArgument(fmt::format("non-finite value for {}", symbol));
        order.emplace_back(&symbol, v);
    }
    // Map iteration is already symbol-ascending, so a stable sort keeps that
    // order among equal values.
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    RankMap ranks;
    for (std::size_t i = 0; i < order.size(); ++i) {
        ranks.emplace(*order[i].first, static_cast<int>(i + 1));
    }
    return ranks;
}

double FeatureVector::value(Feature f) const {
    switch (f) {
        case Feature::rsi: return rsi;
        case Feature::stoch_d: return stoch_d;
        case Feature::ma_crossover: return ma_crossover;
        case Feature::avg_dollar_volume: return avg_dollar_volume;
    }
    return 0.0;
}

std::size_t FeatureParams::lookback() const {
    return std::max({rsi_period + 1, k_period + d_period - 1, ma_long, ma_short, adv_window});
}

std::vector<double> FeatureMatrix::rank_vector(const std::string& symbol) const {
    std::vector<double> out(kFeatureCount);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        auto it = ranks[f].find(symbol);
        if (it == ranks[f].end()) {
            throw InvalidArgument(fmt::format("{} not in feature matrix", symbol));
        }
        out[f] = static_cast<double>(it->second);
    }
    return out;
}

FeatureMatrix make_feature_matrix(const Date& as_of, std::vector<FeatureVector> rows) {
    FeatureMatrix m;
    m.as_of = as_of;
    std::sort(rows.begin(), rows.end(),
              [](const FeatureVector& a, const FeatureVector& b) { return a.symbol < b.symbol; });
    m.rows = std::move(rows);
    if (m.rows.empty()) return m;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        std::map<std::string, double> values;
        for (const auto& row : m.rows) values.emplace(row.symbol, row.value(static_cast<Feature>(f)));
        m.ranks[f] = cross_sectional_rank(values);
    }
    return m;
}

FeatureMatrix compute_features(const MarketData& data, std::size_t t, const FeatureParams& params) {
    const std::size_t lookback = params.lookback();
    std::vector<FeatureVector> rows;
    std::vector<double> closes;
    for (const auto& symbol : data.universe().symbols) {
        const auto bars = data.window(symbol, t, lookback);
        if (bars.empty()) continue;
        closes.clear();
        for (const auto& b : bars) closes.push_back(b.close);
        FeatureVector fv;
        fv.symbol = symbol;
        try {
            fv.stoch_d = stochastic(bars, params.k_period, params.d_period).d;
        } catch (const DegenerateRangeError&) {
            continue;
        }
        fv.rsi = rsi(closes, params.rsi_period);
        fv.ma_crossover = ma_crossover(closes, params.ma_short, params.ma_long);
        fv.avg_dollar_volume = avg_dollar_volume(bars, params.adv_window);
        rows.push_back(std::move(fv));
    }
    return make_feature_matrix(data.calendar()[t], std::move(rows));
}

void write_features_csv(std::ostream& out, const FeatureMatrix& matrix) {
    out << "symbol,rsi,stoch_d,ma_crossover,adv,rank_rsi,rank_stoch_d,rank_mac,rank_adv\n";
    for (const auto& row : matrix.rows) {
        out << fmt::format("{},{},{},{},{}", row.symbol, row.rsi, row.stoch_d, row.ma_crossover,
                           row.avg_dollar_volume);
        for (const auto& ranks : matrix.ranks) out << ',' << ranks.at(row.symbol);
        out << '\n';
    }
}

}  // namespace smartbeta::indicators
