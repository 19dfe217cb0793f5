#pragma once

#include <numeric>
#include <vector>

#include "smartbeta/classifier.hpp"
#include "smartbeta/market_data.hpp"
#include "smartbeta/random.hpp"
#include "smartbeta/synth.hpp"

namespace smartbeta::test {

/// The 8-example, 2-feature XOR-like set traced by the AdaBoost oracle.
inline std::vector<classifier::TrainingExample> xor_fixture() {
    const double x[8][2] = {{1, 2}, {2, 7}, {3, 4}, {4, 5}, {5, 1}, {6, 8}, {7, 3}, {8, 6}};
    const int y[8] = {-1, +1, -1, +1, +1, -1, +1, -1};
    std::vector<classifier::TrainingExample> out;
    for (int i = 0; i < 8; ++i) out.push_back({{x[i][0], x[i][1]}, y[i], 1.0 / 8.0});
    return out;
}

/// Monthly cross-sections of four rank features. The label is +1 when the
/// first feature's rank lies in the top half, flipped with probability
/// 1 - fidelity; the other three ranks are independent noise.
inline std::vector<classifier::TrainingExample> rank_signal_fixture(std::size_t months,
                                                                    std::size_t stocks,
                                                                    double fidelity,
                                                                    std::uint64_t seed) {
    Rng rng(seed);
    std::vector<classifier::TrainingExample> out;
    std::vector<std::vector<double>> perms(4, std::vector<double>(stocks));
    for (std::size_t m = 0; m < months; ++m) {
        for (auto& p : perms) {
            std::iota(p.begin(), p.end(), 1.0);
            rng.shuffle(std::span<double>(p));
        }
        for (std::size_t i = 0; i < stocks; ++i) {
            int label = perms[0][i] <= static_cast<double>(stocks) / 2.0 ? 1 : -1;
            if (rng.uniform() >= fidelity) label = -label;
            out.push_back({{perms[0][i], perms[1][i], perms[2][i], perms[3][i]}, label, 0.0});
        }
    }
    const double w = 1.0 / static_cast<double>(out.size());
    for (auto& e : out) e.weight = w;
    return out;
}

/// Market data built in memory from the synthetic generator.
inline MarketData synthetic_market(const synth::SynthParams& params) {
    auto series = synth::generate(params);
    auto calendar = TradingCalendar::from_series(series.at(params.benchmark));
    return MarketData(std::move(calendar), std::move(series), params.benchmark);
}

/// 100 stocks, three years, a small persistent drift share: momentum in the
/// features carries over into next-month returns.
inline synth::SynthParams momentum_params() {
    synth::SynthParams p;
    p.n_symbols = 100;
    p.n_days = 756;
    p.persistence = 0.03;
    p.seed = 20240501;
    return p;
}

/// Five years with persistent drift and a rising market: the momentum sleeve
/// earns from persistence, the low-beta sleeve from the market drift.
inline synth::SynthParams diversification_params() {
    synth::SynthParams p;
    p.n_symbols = 100;
    p.n_days = 1260;
    p.persistence = 0.03;
    p.market_drift = 0.0008;
    p.seed = 2;
    return p;
}

/// Factor-structured data without persistent drift or market trend.
inline synth::SynthParams factor_params() {
    synth::SynthParams p;
    p.n_symbols = 100;
    p.n_days = 756;
    p.persistence = 0.0;
    p.market_drift = 0.0;
    p.seed = 777;
    return p;
}

}  // namespace smartbeta::test
