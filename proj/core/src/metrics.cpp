#include "smartbeta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "smartbeta/errors.hpp"
#include "smartbeta/portfolio.hpp"

namespace smartbeta::metrics {

namespace {

constexpr double kZeroStd = 1e-14;

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::vector<double> EquityCurve::daily_returns() const {
    std::vector<double> out;
    if (values.size() < 2) return out;
    out.reserve(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) out.push_back(values[t] / values[t - 1] - 1.0);
    return out;
}

double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) throw InsufficientHistoryError("standard deviation needs at least 2 values");
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double sharpe(std::span<const double> daily_returns, double risk_free_annual) {
    if (daily_returns.size() < 2) throw InsufficientHistoryError("Sharpe needs at least 2 returns");
    const double rf_daily = risk_free_annual / kTradingDaysPerYear;
    std::vector<double> excess(daily_returns.begin(), daily_returns.end());
    for (double& x : excess) x -= rf_daily;
    const double sd = sample_stddev(excess);
    if (sd < kZeroStd) throw DomainError("Sharpe ratio undefined: zero return standard deviation");
    return mean_of(excess) / sd * std::sqrt(kTradingDaysPerYear);
}

double portfolio_beta(std::span<const double> portfolio_returns,
                      std::span<const double> benchmark_returns) {
    return portfolio::estimate_beta(portfolio_returns, benchmark_returns);
}

double max_drawdown(std::span<const double> equity) {
    if (equity.empty()) throw InvalidArgument("max_drawdown of an empty curve");
    double peak = equity.front();
    double worst = 0.0;
    for (double v : equity) {
        if (!(v > 0.0)) throw DomainError(fmt::format("non-positive equity value {}", v));
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return worst;
}

double annualized_volatility(std::span<const double> daily_returns) {
    return sample_stddev(daily_returns) * std::sqrt(kTradingDaysPerYear);
}

MetricsReport build_report(const EquityCurve& curve, const EquityCurve& benchmark,
                           double risk_free_annual) {
    std::vector<double> values;
    std::vector<double> bench;
    std::vector<Date> dates;
    std::size_t j = 0;
    for (std::size_t i = 0; i < curve.dates.size(); ++i) {
        while (j < benchmark.dates.size() && benchmark.dates[j] < curve.dates[i]) ++j;
        if (j < benchmark.dates.size() && benchmark.dates[j] == curve.dates[i]) {
            dates.push_back(curve.dates[i]);
            values.push_back(curve.values[i]);
            bench.push_back(benchmark.values[j]);
        }
    }
    if (dates.size() < 2) {
        throw InvalidArgument("equity curve and benchmark share fewer than 2 dates");
    }
    const EquityCurve aligned{dates, values};
    const EquityCurve aligned_bench{dates, bench};
    const auto rets = aligned.daily_returns();
    const auto bench_rets = aligned_bench.daily_returns();

    MetricsReport r;
    r.first_date = dates.front();
    r.last_date = dates.back();
    r.n_days = dates.size();
    r.risk_free_rate = risk_free_annual;
    r.total_return = values.back() / values.front() - 1.0;
    r.annualized_return =
        std::pow(values.back() / values.front(),
                 kTradingDaysPerYear / static_cast<double>(rets.size())) - 1.0;
    try {
        r.sharpe = sharpe(rets, risk_free_annual);
    } catch (const DomainError& e) {
        r.sharpe.reset();
        r.sharpe_null_reason = e.what();
    }
    r.beta = portfolio_beta(rets, bench_rets);
    r.max_drawdown = max_drawdown(values);
    r.annual_volatility = annualized_volatility(rets);
    return r;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("spearman needs two equal-length sequences of at least 2 values");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DomainError("spearman undefined for a constant sequence");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace smartbeta::metrics
