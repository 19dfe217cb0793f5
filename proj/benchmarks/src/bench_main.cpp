#include <benchmark/benchmark.h>

#include <map>
#include <string>
#include <vector>

#include "smartbeta/backtester.hpp"
#include "smartbeta/classifier.hpp"
#include "smartbeta/indicators.hpp"
#include "smartbeta/log.hpp"
#include "smartbeta/portfolio.hpp"
#include "smartbeta/random.hpp"
#include "smartbeta/synth.hpp"

namespace sb = smartbeta;

namespace {

sb::MarketData market(std::size_t symbols, std::size_t days) {
    sb::synth::SynthParams p;
    p.n_symbols = symbols;
    p.n_days = days;
    p.persistence = 0.03;
    auto series = sb::synth::generate(p);
    auto calendar = sb::TradingCalendar::from_series(series.at(p.benchmark));
    return sb::MarketData(std::move(calendar), std::move(series), p.benchmark);
}

void silence() {
    sb::log::set_sink([](sb::log::Level, std::string_view) {});
}

void BM_ComputeFeatures(benchmark::State& state) {
    const auto data = market(static_cast<std::size_t>(state.range(0)), 120);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sb::indicators::compute_features(data, 119));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeFeatures)->Arg(100)->Arg(500);

void BM_Rsi(benchmark::State& state) {
    sb::Rng rng(1);
    std::vector<double> closes{100.0};
    for (int i = 0; i < 252; ++i) closes.push_back(closes.back() * (1.0 + 0.01 * rng.normal()));
    for (auto _ : state) benchmark::DoNotOptimize(sb::indicators::rsi(closes));
}
BENCHMARK(BM_Rsi);

void BM_TrainAdaBoost(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    sb::Rng rng(7);
    std::vector<sb::classifier::TrainingExample> xs;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> f;
        for (int k = 0; k < 4; ++k) f.push_back(static_cast<double>(1 + rng.below(n / 2)));
        xs.push_back({f, f[0] <= static_cast<double>(n) / 4.0 ? 1 : -1, 1.0 / static_cast<double>(n)});
        if (rng.uniform() < 0.4) xs.back().label = -xs.back().label;
    }
    for (auto _ : state) benchmark::DoNotOptimize(sb::classifier::train_adaboost(xs, 50));
}
BENCHMARK(BM_TrainAdaBoost)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MvpWeights(benchmark::State& state) {
    const auto n = state.range(0);
    sb::Rng rng(3);
    sb::portfolio::ReturnsWindow w;
    w.returns.resize(63, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        w.symbols.push_back("S" + std::to_string(j));
        for (Eigen::Index t = 0; t < 63; ++t) w.returns(t, j) = 0.01 * rng.normal();
    }
    for (auto _ : state) benchmark::DoNotOptimize(sb::portfolio::mvp_weights(w));
}
BENCHMARK(BM_MvpWeights)->Arg(25)->Arg(50);

void BM_Backtest(benchmark::State& state) {
    silence();
    const auto data = market(100, 756);
    sb::backtest::BacktestConfig config;
    config.strategy = static_cast<sb::backtest::StrategyKind>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sb::backtest::run_backtest(config, data));
    state.SetLabel(sb::backtest::to_string(config.strategy));
}
BENCHMARK(BM_Backtest)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
