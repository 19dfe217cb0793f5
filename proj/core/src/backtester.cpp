#include "smartbeta/backtester.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "smartbeta/errors.hpp"
#include "smartbeta/log.hpp"

namespace smartbeta::backtest {

namespace {

/// Trades smaller than this many currency units are dropped in fractional mode.
constexpr double kMinFractionalTradeValue = 1e-6;

/// Collects every warning logged while alive, forwarding each to the
/// previous sink.
class WarningCapture {
public:
    explicit WarningCapture(std::vector<std::string>& into) {
        previous_ = log::set_sink([this, &into](log::Level level, std::string_view msg) {
            if (level == log::Level::warning) into.emplace_back(msg);
            if (previous_) previous_(level, msg);
        });
    }
    ~WarningCapture() { log::set_sink(std::move(previous_)); }
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

private:
    log::Sink previous_;
};

YearMonth shift_month(const YearMonth& ym, int months) {
    return ym + std::chrono::months{months};
}

}  // namespace

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::momentum: return "momentum";
        case StrategyKind::mvp: return "mvp";
        case StrategyKind::combo: return "combo";
    }
    return "combo";
}

StrategyKind strategy_from_string(const std::string& name) {
    if (name == "momentum") return StrategyKind::momentum;
    if (name == "mvp") return StrategyKind::mvp;
    if (name == "combo") return StrategyKind::combo;
    throw ConfigError(fmt::format("unknown strategy '{}' (expected momentum, mvp or combo)", name));
}

void BacktestConfig::validate() const {
    auto fail = [](std::string msg) { throw ConfigError(std::move(msg)); };
    if (data.empty()) fail("data path is empty");
    if (benchmark.empty()) fail("benchmark is empty");
    if (std::find(symbols.begin(), symbols.end(), benchmark) != symbols.end()) {
        fail("benchmark must not be listed in symbols");
    }
    std::optional<Date> start_date;
    std::optional<Date> end_date;
    try {
        if (!start.empty()) start_date = parse_date(start);
        if (!end.empty()) end_date = parse_date(end);
    } catch (const InvalidArgument& e) {
        fail(e.what());
    }
    if (start_date && end_date && !(*start_date < *end_date)) fail("start must precede end");
    if (!(long_fraction > 0.0 && long_fraction < 1.0)) {
        fail(fmt::format("long_fraction {} outside (0, 1)", long_fraction));
    }
    if (!(combo_split >= 0.0 && combo_split <= 1.0)) {
        fail(fmt::format("combo_split {} outside [0, 1]", combo_split));
    }
    if (!(leverage >= 1.0) || !std::isfinite(leverage)) fail(fmt::format("leverage {} < 1", leverage));
    if (!(costs.commission_per_share >= 0.0)) fail("commission_per_share must be >= 0");
    if (!(costs.slippage_fraction >= 0.0)) fail("slippage_fraction must be >= 0");
    if (!(financing_rate >= 0.0)) fail("financing_rate must be >= 0");
    if (!(borrow_fee_rate >= 0.0)) fail("borrow_fee_rate must be >= 0");
    if (!(range_threshold > 0.0)) fail("range_threshold must be > 0");
    if (n_rounds == 0) fail("n_rounds must be positive");
    if (beta_lookback < 2) fail("beta_lookback must be >= 2");
    if (mvp_window < 2) fail("mvp_window must be >= 2");
    if (low_beta_count < 2) fail("low_beta_count must be >= 2");
    if (!(initial_capital > 0.0)) fail("initial_capital must be > 0");
}

RebalanceResult rebalance_to_targets(const Positions& current,
                                     const portfolio::TargetPortfolio& target,
                                     const std::map<std::string, double>& prices,
                                     const CostModel& costs, double equity, const Date& date,
                                     bool fractional) {
    RebalanceResult out;
    auto exposures = target.exposures();

    double long_total = 0.0;
    double short_total = 0.0;
    double long_priced = 0.0;
    double short_priced = 0.0;
    for (const auto& [symbol, w] : exposures) {
        const bool priced = prices.contains(symbol);
        if (w > 0.0) {
            long_total += w;
            if (priced) long_priced += w;
        } else if (w < 0.0) {
            short_total += w;
            if (priced) short_priced += w;
        }
        if (w != 0.0 && !priced) out.skipped.push_back(symbol);
    }
    if (!out.skipped.empty()) {
        const double long_scale = long_priced != 0.0 ? long_total / long_priced : 0.0;
        const double short_scale = short_priced != 0.0 ? short_total / short_priced : 0.0;
        for (auto& [symbol, w] : exposures) {
            if (!prices.contains(symbol)) continue;
            w *= w > 0.0 ? long_scale : short_scale;
        }
    }

    std::set<std::string> symbols;
    for (const auto& [s, _] : current) symbols.insert(s);
    for (const auto& [s, _] : exposures) symbols.insert(s);

    for (const auto& symbol : symbols) {
        const auto held_it = current.find(symbol);
        const double held = held_it == current.end() ? 0.0 : held_it->second;
        const auto price_it = prices.find(symbol);
        if (price_it == prices.end()) {
            if (held != 0.0) out.positions[symbol] = held;
            continue;
        }
        const double price = price_it->second;
        const auto w_it = exposures.find(symbol);
        const double w = w_it == exposures.end() ? 0.0 : w_it->second;
        double desired = w * equity / price;
        if (!fractional) desired = std::trunc(desired);
        double delta = desired - held;
        if (fractional && std::abs(delta * price) < kMinFractionalTradeValue) {
            delta = 0.0;
            desired = held;
        }
        if (desired != 0.0) out.positions[symbol] = desired;
        if (delta == 0.0) continue;

        TradeRecord trade;
        trade.date = date;
        trade.symbol = symbol;
        trade.shares = delta;
        trade.price = price;
        trade.commission = std::abs(delta) * costs.commission_per_share;
        trade.slippage = std::abs(delta) * price * costs.slippage_fraction;
        out.cash_delta -= delta * price + trade.commission + trade.slippage;
        out.trades.push_back(std::move(trade));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Momentum signal

bool MomentumSignal::can_score(const MarketData& data, std::size_t t) const {
    const auto& cal = data.calendar();
    if (t >= cal.size()) return false;
    const YearMonth month = year_month_of(cal[t]);
    const auto first = cal.month_start_of(shift_month(month, -2));
    const auto second = cal.month_start_of(shift_month(month, -1));
    if (!first || !second) return false;
    return *first + 1 >= params_.features.lookback();
}

const indicators::FeatureMatrix& MomentumSignal::features_at(const MarketData& data, std::size_t t) {
    auto it = feature_cache_.find(t);
    if (it == feature_cache_.end()) {
        it = feature_cache_.emplace(t, indicators::compute_features(data, t, params_.features)).first;
    }
    return it->second;
}

std::optional<classifier::AdaBoostModel> MomentumSignal::train(const MarketData& data,
                                                                std::size_t t) {
    const auto& cal = data.calendar();
    const YearMonth month = year_month_of(cal[t]);
    std::vector<classifier::TrainingMonth> months;
    std::vector<std::string> used;
    for (int back = 2; back >= 1; --back) {
        const YearMonth ym = shift_month(month, -back);
        const std::size_t begin = *cal.month_start_of(ym);
        const std::size_t end = *cal.month_start_of(shift_month(ym, 1));
        classifier::TrainingMonth tm;
        tm.month = ym;
        tm.features = features_at(data, begin);
        for (const auto& row : tm.features.rows) {
            const auto p0 = data.close(row.symbol, begin);
            const auto p1 = data.close(row.symbol, end);
            if (p0 && p1) tm.next_returns.emplace(row.symbol, *p1 / *p0 - 1.0);
        }
        if (monthly_range(data.benchmark(), ym) <= params_.range_threshold) {
            used.push_back(format_year_month(ym));
        }
        months.push_back(std::move(tm));
    }
    try {
        const auto examples =
            classifier::build_training_set(months, data.benchmark(), params_.range_threshold);
        auto model = classifier::train_adaboost(examples, params_.n_rounds);
        model.window.as_of = format_date(cal[t]);
        model.window.months = std::move(used);
        model.window.n_examples = examples.size();
        return model;
    } catch (const EmptyTrainingSetError& e) {
        log::warning(fmt::format("{}: {}", format_date(cal[t]), e.what()));
    } catch (const DegenerateModelError& e) {
        log::warning(fmt::format("{}: {}", format_date(cal[t]), e.what()));
    }
    return std::nullopt;
}

const std::optional<std::map<std::string, double>>& MomentumSignal::scores(const MarketData& data,
                                                                            std::size_t t) {
    if (auto it = score_cache_.find(t); it != score_cache_.end()) return it->second;
    std::optional<std::map<std::string, double>> result;
    const auto date = format_date(data.calendar()[t]);
    if (auto model = train(data, t)) {
        last_model_ = *model;
        models_.push_back(std::move(*model));
    } else if (last_model_) {
        log::warning(fmt::format("{}: reusing the previous rebalance's model", date));
    } else {
        log::warning(fmt::format("{}: no model available, momentum sleeve holds cash", date));
    }
    if (last_model_) {
        const auto& features = features_at(data, t);
        if (features.size() >= 5) {
            result = classifier::predict_scores(*last_model_, features);
        } else {
            log::warning(fmt::format("{}: only {} symbols have features, momentum sleeve holds cash",
                                     date, features.size()));
        }
    }
    return score_cache_.emplace(t, std::move(result)).first->second;
}

// ---------------------------------------------------------------------------
// Strategies

MomentumStrategy::MomentumStrategy(std::shared_ptr<MomentumSignal> signal, double long_fraction)
    : signal_(std::move(signal)), long_fraction_(long_fraction) {}

bool MomentumStrategy::can_rebalance(const MarketData& data, std::size_t t) const {
    return signal_->can_score(data, t);
}

portfolio::TargetPortfolio MomentumStrategy::targets(const MarketData& data, std::size_t t) {
    const auto& scores = signal_->scores(data, t);
    if (!scores) return {data.calendar()[t], {}, 1.0};
    return portfolio::long_short_weights(portfolio::assign_quintiles(*scores), long_fraction_,
                                         data.calendar()[t]);
}

QuintileStrategy::QuintileStrategy(std::shared_ptr<MomentumSignal> signal, int quintile)
    : signal_(std::move(signal)), quintile_(quintile) {
    if (quintile < 1 || quintile > 5) throw InvalidArgument("quintile must be in 1..5");
}

std::string QuintileStrategy::name() const { return fmt::format("quintile_{}", quintile_); }

bool QuintileStrategy::can_rebalance(const MarketData& data, std::size_t t) const {
    return signal_->can_score(data, t);
}

portfolio::TargetPortfolio QuintileStrategy::targets(const MarketData& data, std::size_t t) {
    const auto& scores = signal_->scores(data, t);
    if (!scores) return {data.calendar()[t], {}, 1.0};
    return portfolio::quintile_long_only(portfolio::assign_quintiles(*scores), quintile_,
                                         data.calendar()[t]);
}

bool MvpStrategy::can_rebalance(const MarketData& data, std::size_t t) const {
    return t < data.calendar().size() && t >= std::max(params_.beta_lookback, params_.window);
}

portfolio::TargetPortfolio MvpStrategy::targets(const MarketData& data, std::size_t t) {
    const Date date = data.calendar()[t];
    portfolio::TargetPortfolio cash{date, {}, 1.0};
    const std::size_t span_len = std::max(params_.beta_lookback, params_.window) + 1;

    const auto bench_bars = data.window(data.universe().benchmark, t, params_.beta_lookback + 1);
    if (bench_bars.empty()) {
        log::warning(fmt::format("{}: benchmark lacks a beta window, MVP sleeve holds cash",
                                 format_date(date)));
        return cash;
    }
    std::vector<double> closes;
    for (const auto& b : bench_bars) closes.push_back(b.close);
    const auto bench_returns = simple_returns(closes);

    std::vector<portfolio::BetaEstimate> betas;
    std::map<std::string, std::vector<double>> returns;
    for (const auto& symbol : data.universe().symbols) {
        const auto bars = data.window(symbol, t, span_len);
        if (bars.empty()) continue;
        closes.clear();
        for (const auto& b : bars) closes.push_back(b.close);
        auto r = simple_returns(closes);
        const std::span<const double> all(r);
        betas.push_back({symbol,
                         portfolio::estimate_beta(all.last(params_.beta_lookback), bench_returns),
                         params_.beta_lookback});
        returns.emplace(symbol, std::move(r));
    }
    if (betas.size() < params_.count) {
        log::warning(fmt::format("{}: {} symbols have a beta window, need {}; MVP sleeve holds cash",
                                 format_date(date), betas.size(), params_.count));
        return cash;
    }
    const auto selected = portfolio::select_low_beta(betas, params_.count);
    portfolio::ReturnsWindow window;
    window.symbols = selected;
    window.returns.resize(static_cast<Eigen::Index>(params_.window),
                          static_cast<Eigen::Index>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) {
        const std::span<const double> r(returns.at(selected[j]));
        const auto tail = r.last(params_.window);
        for (std::size_t i = 0; i < tail.size(); ++i) {
            window.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = tail[i];
        }
    }
    try {
        return portfolio::mvp_weights(window, date, params_.options);
    } catch (const SingularMatrixError& e) {
        log::warning(fmt::format("{}: {}; MVP sleeve holds cash", format_date(date), e.what()));
    } catch (const DomainError& e) {
        log::warning(fmt::format("{}: {}; MVP sleeve holds cash", format_date(date), e.what()));
    }
    return cash;
}

ComboStrategy::ComboStrategy(std::unique_ptr<Strategy> momentum, std::unique_ptr<Strategy> mvp,
                             double split)
    : momentum_(std::move(momentum)), mvp_(std::move(mvp)), split_(split) {}

bool ComboStrategy::can_rebalance(const MarketData& data, std::size_t t) const {
    return momentum_->can_rebalance(data, t) && mvp_->can_rebalance(data, t);
}

portfolio::TargetPortfolio ComboStrategy::targets(const MarketData& data, std::size_t t) {
    return portfolio::combine(momentum_->targets(data, t), mvp_->targets(data, t), split_);
}

portfolio::TargetPortfolio ScheduledStrategy::targets(const MarketData& data, std::size_t t) {
    const Date date = data.calendar()[t];
    portfolio::TargetPortfolio p{date, {}, 1.0};
    auto it = schedule_.upper_bound(date);
    if (it != schedule_.begin()) p.weights = std::prev(it)->second;
    return p;
}

std::unique_ptr<Strategy> make_strategy(const BacktestConfig& config,
                                        std::shared_ptr<MomentumSignal> signal) {
    if (!signal) {
        MomentumParams mp;
        mp.range_threshold = config.range_threshold;
        mp.n_rounds = config.n_rounds;
        signal = std::make_shared<MomentumSignal>(mp);
    }
    MvpParams vp;
    vp.beta_lookback = config.beta_lookback;
    vp.window = config.mvp_window;
    vp.count = config.low_beta_count;
    vp.options.diagonal_loading = config.diagonal_loading;
    switch (config.strategy) {
        case StrategyKind::momentum:
            return std::make_unique<MomentumStrategy>(signal, config.long_fraction);
        case StrategyKind::mvp:
            return std::make_unique<MvpStrategy>(vp);
        case StrategyKind::combo:
            return std::make_unique<ComboStrategy>(
                std::make_unique<MomentumStrategy>(signal, config.long_fraction),
                std::make_unique<MvpStrategy>(vp), config.combo_split);
    }
    throw ConfigError("unknown strategy");
}

// ---------------------------------------------------------------------------
// Engine

BacktestResult run_backtest(const BacktestConfig& config, const MarketData& data,
                            Strategy& strategy) {
    config.validate();
    const auto& cal = data.calendar();
    if (cal.size() < 2) throw WarmupError("calendar has fewer than 2 trading days");

    std::size_t t_end = cal.size() - 1;
    if (!config.end.empty()) {
        const Date end = parse_date(config.end);
        const std::size_t first_on_or_after = cal.lower_bound(end);
        if (first_on_or_after < cal.size() && cal[first_on_or_after] == end) {
            t_end = first_on_or_after;
        } else if (first_on_or_after == 0) {
            throw ConfigError("end precedes the first trading day");
        } else {
            t_end = first_on_or_after - 1;
        }
    }

    std::size_t t0 = cal.size();
    if (config.start.empty()) {
        for (std::size_t m : cal.month_starts()) {
            if (m < t_end && strategy.can_rebalance(data, m)) {
                t0 = m;
                break;
            }
        }
        if (t0 == cal.size()) {
            throw WarmupError("no rebalance date in the data satisfies the warm-up lookback");
        }
    } else {
        t0 = cal.lower_bound(parse_date(config.start));
        if (t0 >= t_end) throw ConfigError("start leaves no trading days before end");
        if (!strategy.can_rebalance(data, t0)) {
            throw WarmupError(fmt::format(
                "data before {} does not cover the warm-up lookback of strategy {}",
                format_date(cal[t0]), strategy.name()));
        }
    }

    BacktestResult result;
    result.strategy = strategy.name();
    const WarningCapture capture(result.warnings);
    double cash = config.initial_capital;
    Positions positions;
    std::map<std::string, double> last_price;

    auto market_value = [&](const std::string& symbol, double shares) {
        return shares * last_price.at(symbol);
    };

    for (std::size_t t = t0; t <= t_end; ++t) {
        const Date date = cal[t];
        for (const auto& [symbol, _] : positions) {
            if (const auto px = data.close(symbol, t)) last_price[symbol] = *px;
        }
        double gross_value = 0.0;
        double short_value = 0.0;
        double equity = cash;
        for (const auto& [symbol, shares] : positions) {
            const double mv = market_value(symbol, shares);
            equity += mv;
            gross_value += std::abs(mv);
            if (mv < 0.0) short_value -= mv;
        }

        if (t > t0) {
            const double financing =
                config.financing_rate / metrics::kTradingDaysPerYear *
                    std::max(0.0, gross_value - equity) +
                config.borrow_fee_rate / metrics::kTradingDaysPerYear * short_value;
            cash -= financing;
            equity -= financing;
            result.total_financing += financing;
        }

        if (t == t0 || cal.is_month_start(t)) {
            auto target = portfolio::apply_leverage(strategy.targets(data, t), config.leverage);
            target.as_of = date;
            std::map<std::string, double> prices;
            for (const auto& [symbol, _] : target.weights) {
                if (const auto px = data.close(symbol, t)) prices.emplace(symbol, *px);
            }
            for (const auto& [symbol, _] : positions) {
                if (const auto px = data.close(symbol, t)) prices.emplace(symbol, *px);
            }
            auto rebalanced = rebalance_to_targets(positions, target, prices, config.costs, equity,
                                                   date, config.fractional_shares);
            for (const auto& s : rebalanced.skipped) {
                log::warning(fmt::format("{}: no price for {}, weight redistributed",
                                          format_date(date), s));
            }
            for (const auto& [symbol, px] : prices) last_price[symbol] = px;
            positions = std::move(rebalanced.positions);
            cash += rebalanced.cash_delta;
            for (auto& trade : rebalanced.trades) {
                result.total_commission += trade.commission;
                result.total_slippage += trade.slippage;
                result.trades.push_back(std::move(trade));
            }
            equity = cash;
            for (const auto& [symbol, shares] : positions) equity += market_value(symbol, shares);
            for (const auto& [symbol, shares] : positions) {
                const double px = last_price.at(symbol);
                result.positions.push_back({date, symbol, shares, px, shares * px / equity});
            }
            result.targets.push_back(std::move(target));
        }

        result.curve.dates.push_back(date);
        result.curve.values.push_back(equity);
        if (!(equity > 0.0)) {
            result.wiped_out = true;
            log::warning(fmt::format("{}: equity {} is not positive, run terminated",
                                      format_date(date), equity));
            break;
        }
    }
    return result;
}

BacktestResult run_backtest(const BacktestConfig& config, const MarketData& data) {
    auto strategy = make_strategy(config);
    return run_backtest(config, data, *strategy);
}

metrics::EquityCurve benchmark_curve(const MarketData& data, const metrics::EquityCurve& curve) {
    metrics::EquityCurve out;
    const auto& cal = data.calendar();
    for (const auto& d : curve.dates) {
        const auto t = cal.index_of(d);
        if (!t) continue;
        if (const auto px = data.close(data.universe().benchmark, *t)) {
            out.dates.push_back(d);
            out.values.push_back(*px);
        }
    }
    return out;
}

}  // namespace smartbeta::backtest
