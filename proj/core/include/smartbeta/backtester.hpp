#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smartbeta/classifier.hpp"
#include "smartbeta/date.hpp"
#include "smartbeta/indicators.hpp"
#include "smartbeta/market_data.hpp"
#include "smartbeta/metrics.hpp"
#include "smartbeta/portfolio.hpp"

namespace smartbeta::backtest {

struct CostModel {
    double commission_per_share = 0.005;
    double slippage_fraction = 0.0005;  // of traded value, always adverse
};

enum class StrategyKind { momentum, mvp, combo };

std::string to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& name);

struct BacktestConfig {
    std::string data = "data.csv";
    std::string benchmark = "SPX";
    std::vector<std::string> symbols;  // empty: every non-benchmark symbol in the data
    std::string start;                 // ISO date; empty: first date the warm-up allows
    std::string end;                   // ISO date; empty: last date in the data
    StrategyKind strategy = StrategyKind::combo;
    double long_fraction = 0.5;
    double combo_split = 0.5;
    double leverage = 1.0;
    CostModel costs;
    double financing_rate = 0.0;   // annual, charged on gross exposure above 1
    double borrow_fee_rate = 0.0;  // annual, charged on short market value
    double range_threshold = 0.17;
    std::uint64_t seed = 42;
    std::size_t n_rounds = 50;
    std::size_t beta_lookback = 66;
    std::size_t mvp_window = 63;
    std::size_t low_beta_count = 25;
    double initial_capital = 1'000'000.0;
    bool fractional_shares = false;
    bool diagonal_loading = false;
    double risk_free_rate = 0.0;
    bool dump_models = false;

    /// Throws ConfigError on any violated field constraint.
    void validate() const;
};

struct TradeRecord {
    Date date;
    std::string symbol;
    double shares = 0.0;  // signed; negative = sell
    double price = 0.0;
    double commission = 0.0;
    double slippage = 0.0;
};

struct PositionRecord {
    Date date;
    std::string symbol;
    double shares = 0.0;
    double price = 0.0;
    double weight = 0.0;  // market value / equity after trading
};

using Positions = std::map<std::string, double>;  // symbol -> signed shares

struct RebalanceResult {
    Positions positions;
    double cash_delta = 0.0;
    std::vector<TradeRecord> trades;
    std::vector<std::string> skipped;  // nonzero targets without a price
};

/// Trades `current` toward `target` at `prices`.
///
/// Target shares are exposure * equity / price, truncated toward zero unless
/// `fractional`. Commission is per share traded; slippage is a fraction of
/// traded value. A nonzero target without a price is skipped and the
/// remaining targets on the same side are scaled up to keep that side's
/// total exposure. Positions without a price are left untouched.
RebalanceResult rebalance_to_targets(const Positions& current,
                                     const portfolio::TargetPortfolio& target,
                                     const std::map<std::string, double>& prices,
                                     const CostModel& costs, double equity, const Date& date,
                                     bool fractional = false);

/// Produces a target portfolio on rebalance days.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    /// True when the calendar holds enough history to rebalance on day `t`.
    virtual bool can_rebalance(const MarketData& data, std::size_t t) const = 0;
    virtual portfolio::TargetPortfolio targets(const MarketData& data, std::size_t t) = 0;
};

struct MomentumParams {
    indicators::FeatureParams features;
    double range_threshold = 0.17;
    std::size_t n_rounds = 50;
};

/// Trains a classifier on the two months before each rebalance month and
/// scores the current cross-section. Results are cached per day so several
/// strategies can share one model sequence.
class MomentumSignal {
public:
    explicit MomentumSignal(MomentumParams params = {}) : params_(params) {}

    bool can_score(const MarketData& data, std::size_t t) const;
    /// Scores on day `t`, or nullopt when no usable model exists (the sleeve
    /// then holds cash). Reuses the previous model when training fails.
    const std::optional<std::map<std::string, double>>& scores(const MarketData& data,
                                                               std::size_t t);

    /// Models in the order they were trained.
    const std::vector<classifier::AdaBoostModel>& models() const noexcept { return models_; }

private:
    const indicators::FeatureMatrix& features_at(const MarketData& data, std::size_t t);
    std::optional<classifier::AdaBoostModel> train(const MarketData& data, std::size_t t);

    MomentumParams params_;
    std::map<std::size_t, indicators::FeatureMatrix> feature_cache_;
    std::map<std::size_t, std::optional<std::map<std::string, double>>> score_cache_;
    std::vector<classifier::AdaBoostModel> models_;
    std::optional<classifier::AdaBoostModel> last_model_;
};

/// Long Q1 / short Q5 of the momentum scores.
class MomentumStrategy : public Strategy {
public:
    MomentumStrategy(std::shared_ptr<MomentumSignal> signal, double long_fraction);
    std::string name() const override { return "momentum"; }
    bool can_rebalance(const MarketData& data, std::size_t t) const override;
    portfolio::TargetPortfolio targets(const MarketData& data, std::size_t t) override;

private:
    std::shared_ptr<MomentumSignal> signal_;
    double long_fraction_;
};

/// Evenly weighted long-only book on one quintile of the momentum scores.
class QuintileStrategy : public Strategy {
public:
    QuintileStrategy(std::shared_ptr<MomentumSignal> signal, int quintile);
    std::string name() const override;
    bool can_rebalance(const MarketData& data, std::size_t t) const override;
    portfolio::TargetPortfolio targets(const MarketData& data, std::size_t t) override;

private:
    std::shared_ptr<MomentumSignal> signal_;
    int quintile_;
};

struct MvpParams {
    std::size_t beta_lookback = 66;
    std::size_t window = 63;
    std::size_t count = 25;
    portfolio::MvpOptions options;
};

/// Minimum-variance allocation over the lowest-beta stocks.
class MvpStrategy : public Strategy {
public:
    explicit MvpStrategy(MvpParams params = {}) : params_(params) {}
    std::string name() const override { return "mvp"; }
    bool can_rebalance(const MarketData& data, std::size_t t) const override;
    portfolio::TargetPortfolio targets(const MarketData& data, std::size_t t) override;

private:
    MvpParams params_;
};

class ComboStrategy : public Strategy {
public:
    ComboStrategy(std::unique_ptr<Strategy> momentum, std::unique_ptr<Strategy> mvp, double split);
    std::string name() const override { return "combo"; }
    bool can_rebalance(const MarketData& data, std::size_t t) const override;
    portfolio::TargetPortfolio targets(const MarketData& data, std::size_t t) override;

private:
    std::unique_ptr<Strategy> momentum_;
    std::unique_ptr<Strategy> mvp_;
    double split_;
};

/// Fixed weights from a schedule: the latest entry dated on or before the
/// rebalance day applies.
class ScheduledStrategy : public Strategy {
public:
    explicit ScheduledStrategy(std::map<Date, std::map<std::string, double>> schedule)
        : schedule_(std::move(schedule)) {}
    std::string name() const override { return "scheduled"; }
    bool can_rebalance(const MarketData&, std::size_t) const override { return true; }
    portfolio::TargetPortfolio targets(const MarketData& data, std::size_t t) override;

private:
    std::map<Date, std::map<std::string, double>> schedule_;
};

/// Builds the strategy selected by `config`.
std::unique_ptr<Strategy> make_strategy(const BacktestConfig& config,
                                        std::shared_ptr<MomentumSignal> signal = nullptr);

struct BacktestResult {
    std::string strategy;
    metrics::EquityCurve curve;
    std::vector<TradeRecord> trades;
    std::vector<PositionRecord> positions;
    std::vector<portfolio::TargetPortfolio> targets;  // levered, one per rebalance
    std::vector<std::string> warnings;
    double total_commission = 0.0;
    double total_slippage = 0.0;
    double total_financing = 0.0;
    bool wiped_out = false;
};

/// Monthly rebalance loop: trade to targets at the close of the first trading
/// day of each month (and of the first day of the run), let positions drift
/// in between. Throws WarmupError when `config.start` leaves too little history.
BacktestResult run_backtest(const BacktestConfig& config, const MarketData& data,
                            Strategy& strategy);

/// As above with the strategy chosen by `config.strategy`.
BacktestResult run_backtest(const BacktestConfig& config, const MarketData& data);

/// Benchmark closes over the curve's dates, as an equity curve.
metrics::EquityCurve benchmark_curve(const MarketData& data, const metrics::EquityCurve& curve);

}  // namespace smartbeta::backtest
