#include "smartbeta/reporting.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smartbeta/config_io.hpp"
#include "smartbeta/errors.hpp"

namespace smartbeta::report {

namespace {

using Json = nlohmann::ordered_json;

Json metrics_json(const metrics::MetricsReport& m) {
    Json j;
    j["total_return"] = m.total_return;
    j["annualized_return"] = m.annualized_return;
    if (m.sharpe) {
        j["sharpe"] = *m.sharpe;
    } else {
        j["sharpe"] = nullptr;
        j["sharpe_null_reason"] = m.sharpe_null_reason;
    }
    j["beta"] = m.beta;
    j["max_drawdown"] = m.max_drawdown;
    j["annual_volatility"] = m.annual_volatility;
    j["risk_free_rate"] = m.risk_free_rate;
    j["first_date"] = format_date(m.first_date);
    j["last_date"] = format_date(m.last_date);
    j["n_days"] = m.n_days;
    return j;
}

metrics::MetricsReport metrics_from_json(const Json& j) {
    metrics::MetricsReport m;
    m.total_return = j.at("total_return").get<double>();
    m.annualized_return = j.at("annualized_return").get<double>();
    if (j.at("sharpe").is_null()) {
        m.sharpe_null_reason = j.value("sharpe_null_reason", "");
    } else {
        m.sharpe = j.at("sharpe").get<double>();
    }
    m.beta = j.at("beta").get<double>();
    m.max_drawdown = j.at("max_drawdown").get<double>();
    m.annual_volatility = j.at("annual_volatility").get<double>();
    m.risk_free_rate = j.at("risk_free_rate").get<double>();
    m.first_date = parse_date(j.at("first_date").get<std::string>());
    m.last_date = parse_date(j.at("last_date").get<std::string>());
    m.n_days = j.at("n_days").get<std::size_t>();
    return m;
}

void write_file(const std::filesystem::path& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    writer(out);
    if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

void write_equity_curve_csv(std::ostream& out, const metrics::EquityCurve& curve) {
    out << "date,value,return\n";
    for (std::size_t t = 0; t < curve.size(); ++t) {
        const double r = t == 0 ? 0.0 : curve.values[t] / curve.values[t - 1] - 1.0;
        out << fmt::format("{},{},{}\n", format_date(curve.dates[t]), curve.values[t], r);
    }
}

void write_trades_csv(std::ostream& out, const std::vector<backtest::TradeRecord>& trades) {
    out << "date,symbol,shares,price,commission,slippage\n";
    for (const auto& tr : trades) {
        out << fmt::format("{},{},{},{},{},{}\n", format_date(tr.date), tr.symbol, tr.shares,
                           tr.price, tr.commission, tr.slippage);
    }
}

void write_positions_csv(std::ostream& out,
                         const std::vector<backtest::PositionRecord>& positions) {
    out << "date,symbol,shares,price,weight\n";
    for (const auto& p : positions) {
        out << fmt::format("{},{},{},{},{}\n", format_date(p.date), p.symbol, p.shares, p.price,
                           p.weight);
    }
}

void write_targets_csv(std::ostream& out,
                       const std::vector<portfolio::TargetPortfolio>& targets) {
    out << "date,symbol,weight\n";
    for (const auto& t : targets) portfolio::write_targets_csv(out, t, false);
}

std::string report_json(const backtest::BacktestConfig& config,
                        const backtest::BacktestResult& result,
                        const metrics::MetricsReport& strategy,
                        const metrics::MetricsReport& benchmark) {
    Json j;
    j["format_version"] = kReportFormatVersion;
    j["strategy"] = result.strategy;
    j["metrics"] = metrics_json(strategy);
    j["benchmark"] = {{"symbol", config.benchmark}, {"metrics", metrics_json(benchmark)}};
    j["window"] = {{"first_date", format_date(strategy.first_date)},
                   {"last_date", format_date(strategy.last_date)},
                   {"n_days", strategy.n_days},
                   {"n_rebalances", result.targets.size()}};
    j["costs"] = {{"commission", result.total_commission},
                  {"slippage", result.total_slippage},
                  {"financing", result.total_financing}};
    j["n_trades"] = result.trades.size();
    j["wiped_out"] = result.wiped_out;
    j["warnings"] = result.warnings.size();
    j["config"] = Json::parse(backtest::config_to_json(config));
    return j.dump(2) + "\n";
}

std::vector<ReportRow> rows_from_report_json(std::string_view text) {
    try {
        const Json j = Json::parse(text);
        const int version = j.at("format_version").get<int>();
        if (version != kReportFormatVersion) {
            throw ValidationError(fmt::format("unsupported report format version {}", version));
        }
        std::vector<ReportRow> rows;
        rows.push_back({j.at("strategy").get<std::string>(), metrics_from_json(j.at("metrics"))});
        const auto& bench = j.at("benchmark");
        rows.push_back({bench.at("symbol").get<std::string>(), metrics_from_json(bench.at("metrics"))});
        return rows;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(fmt::format("malformed report: {}", e.what()));
    }
}

std::string render_table(const std::vector<ReportRow>& rows) {
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    std::string out = fmt::format("{:<{}}  {:>11}  {:>8}  {:>7}  {:>6}  {:>11}  {:>7}\n", "Strategy",
                                  width, "Returns(%)", "Ann.(%)", "Sharpe", "Beta", "MaxDraw(%)",
                                  "Vol(%)");
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        const std::string sharpe = m.sharpe ? fmt::format("{:.2f}", *m.sharpe) : "n/a";
        out += fmt::format("{:<{}}  {:>11.2f}  {:>8.2f}  {:>7}  {:>6.2f}  {:>11.2f}  {:>7.2f}\n",
                           r.name, width, 100.0 * m.total_return, 100.0 * m.annualized_return,
                           sharpe, m.beta, 100.0 * m.max_drawdown, 100.0 * m.annual_volatility);
    }
    return out;
}

void write_run_outputs(const std::filesystem::path& dir, const backtest::BacktestConfig& config,
                       const backtest::BacktestResult& result,
                       const metrics::MetricsReport& strategy,
                       const metrics::MetricsReport& benchmark) {
    std::filesystem::create_directories(dir);
    write_file(dir / "equity_curve.csv",
               [&](std::ostream& o) { write_equity_curve_csv(o, result.curve); });
    write_file(dir / "trades.csv", [&](std::ostream& o) { write_trades_csv(o, result.trades); });
    write_file(dir / "positions.csv",
               [&](std::ostream& o) { write_positions_csv(o, result.positions); });
    write_file(dir / "targets.csv", [&](std::ostream& o) { write_targets_csv(o, result.targets); });
    write_file(dir / "report.json",
               [&](std::ostream& o) { o << report_json(config, result, strategy, benchmark); });
}

}  // namespace smartbeta::report
