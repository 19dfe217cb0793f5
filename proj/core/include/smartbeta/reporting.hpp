#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "smartbeta/backtester.hpp"
#include "smartbeta/metrics.hpp"

namespace smartbeta::report {

inline constexpr int kReportFormatVersion = 1;

/// `date,value,return`; the first row's return is 0.
void write_equity_curve_csv(std::ostream& out, const metrics::EquityCurve& curve);
/// `date,symbol,shares,price,commission,slippage`
void write_trades_csv(std::ostream& out, const std::vector<backtest::TradeRecord>& trades);
/// `date,symbol,shares,price,weight`, one block per rebalance.
void write_positions_csv(std::ostream& out, const std::vector<backtest::PositionRecord>& positions);
/// `date,symbol,weight` with levered weights, one block per rebalance.
void write_targets_csv(std::ostream& out,
                       const std::vector<portfolio::TargetPortfolio>& targets);

/// One labeled row of a comparison table.
struct ReportRow {
    std::string name;
    metrics::MetricsReport metrics;
};

/// The report.json document for a finished run.
std::string report_json(const backtest::BacktestConfig& config,
                        const backtest::BacktestResult& result,
                        const metrics::MetricsReport& strategy,
                        const metrics::MetricsReport& benchmark);

/// Reads back the strategy and benchmark rows of a report.json document.
std::vector<ReportRow> rows_from_report_json(std::string_view text);

/// Fixed-width grid: one row per strategy, columns Returns(%), Ann.(%),
/// Sharpe, Beta, MaxDraw(%), Vol(%).
std::string render_table(const std::vector<ReportRow>& rows);

/// Writes equity_curve.csv, trades.csv, positions.csv, targets.csv and
/// report.json into `dir`, creating it if needed.
void write_run_outputs(const std::filesystem::path& dir, const backtest::BacktestConfig& config,
                       const backtest::BacktestResult& result,
                       const metrics::MetricsReport& strategy,
                       const metrics::MetricsReport& benchmark);

}  // namespace smartbeta::report
