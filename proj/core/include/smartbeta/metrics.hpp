#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smartbeta/date.hpp"

namespace smartbeta::metrics {

inline constexpr double kTradingDaysPerYear = 252.0;

/// Daily portfolio values on trading dates.
struct EquityCurve {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    /// values[t] / values[t-1] - 1, one shorter than `values`.
    std::vector<double> daily_returns() const;
};

/// Sample (N - 1) standard deviation; exactly 0 when all values are equal.
double sample_stddev(std::span<const double> xs);

/// mean(excess) / std(excess) * sqrt(252), with the annual risk-free rate
/// spread evenly over 252 days. Throws DomainError when the excess returns
/// have zero standard deviation.
double sharpe(std::span<const double> daily_returns, double risk_free_annual = 0.0);

/// Covariance(portfolio, benchmark) / Variance(benchmark) on daily returns.
double portfolio_beta(std::span<const double> portfolio_returns,
                      std::span<const double> benchmark_returns);

/// Largest (running peak - value) / running peak. Values must be positive.
double max_drawdown(std::span<const double> equity);

double annualized_volatility(std::span<const double> daily_returns);

struct MetricsReport {
    double total_return = 0.0;       // cumulative, final / initial - 1
    double annualized_return = 0.0;  // compounded over 252-day years
    std::optional<double> sharpe;
    std::string sharpe_null_reason;  // set when `sharpe` is empty
    double beta = 0.0;
    double max_drawdown = 0.0;
    double annual_volatility = 0.0;
    double risk_free_rate = 0.0;
    Date first_date;
    Date last_date;
    std::size_t n_days = 0;
};

/// All statistics over the dates both curves share.
MetricsReport build_report(const EquityCurve& curve, const EquityCurve& benchmark,
                           double risk_free_annual = 0.0);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace smartbeta::metrics
