#include "smartbeta/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smartbeta/backtester.hpp"
#include "smartbeta/classifier.hpp"
#include "smartbeta/config_io.hpp"
#include "smartbeta/errors.hpp"
#include "smartbeta/indicators.hpp"
#include "smartbeta/metrics.hpp"
#include "smartbeta/reporting.hpp"
#include "smartbeta/synth.hpp"

namespace smartbeta::cli {

namespace fs = std::filesystem;

namespace {

/// |rho| at or above this is the one-sided 5% critical value of Spearman's
/// rank correlation for five points.
constexpr double kQuintileSignificance = 0.9;

struct RunOptions {
    std::string config;
    std::string out = ".";
    std::vector<std::string> overrides;
    bool table = false;
};

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

/// Config file values, then overrides. A relative `data` path read from the
/// file is taken relative to the file's directory.
backtest::BacktestConfig resolve_config(const RunOptions& opts) {
    backtest::BacktestConfig config;
    if (!opts.config.empty()) {
        config = backtest::load_config(opts.config);
        const fs::path data(config.data);
        if (data.is_relative()) config.data = (fs::path(opts.config).parent_path() / data).string();
    }
    backtest::apply_overrides(config, opts.overrides);
    config.validate();
    return config;
}

MarketData load_data(const backtest::BacktestConfig& config) {
    auto data = MarketData::load(config.data, config.benchmark);
    if (!config.symbols.empty()) data.restrict_universe(config.symbols);
    return data;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << text;
}

std::shared_ptr<backtest::MomentumSignal> make_signal(const backtest::BacktestConfig& config) {
    backtest::MomentumParams mp;
    mp.range_threshold = config.range_threshold;
    mp.n_rounds = config.n_rounds;
    return std::make_shared<backtest::MomentumSignal>(mp);
}

void dump_models(const fs::path& dir, const backtest::MomentumSignal& signal) {
    for (const auto& model : signal.models()) {
        write_text(dir / "models" / fmt::format("model_{}.json", model.window.as_of),
                   classifier::model_to_json(model) + "\n");
    }
}

int cmd_backtest(const RunOptions& opts, std::ostream& out) {
    const auto config = resolve_config(opts);
    const auto data = load_data(config);
    auto signal = make_signal(config);
    auto strategy = backtest::make_strategy(config, signal);
    const auto result = backtest::run_backtest(config, data, *strategy);
    const fs::path dir(opts.out);
    if (config.dump_models) dump_models(dir, *signal);
    if (result.wiped_out) {
        fs::create_directories(dir);
        std::ofstream curve(dir / "equity_curve.csv", std::ios::binary);
        report::write_equity_curve_csv(curve, result.curve);
        std::ofstream trades(dir / "trades.csv", std::ios::binary);
        report::write_trades_csv(trades, result.trades);
        throw Error(fmt::format("equity wiped out on {}", format_date(result.curve.dates.back())));
    }
    const auto bench = backtest::benchmark_curve(data, result.curve);
    const auto strat_metrics = metrics::build_report(result.curve, bench, config.risk_free_rate);
    const auto bench_metrics = metrics::build_report(bench, bench, config.risk_free_rate);
    report::write_run_outputs(dir, config, result, strat_metrics, bench_metrics);
    if (opts.table) {
        out << report::render_table({{result.strategy, strat_metrics}, {config.benchmark, bench_metrics}});
    }
    return kExitOk;
}

int cmd_quintiles(const RunOptions& opts, std::ostream& out) {
    const auto config = resolve_config(opts);
    const auto data = load_data(config);
    auto signal = make_signal(config);
    const fs::path dir(opts.out);
    fs::create_directories(dir);

    std::vector<double> quintile_numbers;
    std::vector<double> final_returns;
    nlohmann::ordered_json summary;
    summary["quintiles"] = nlohmann::ordered_json::array();
    std::vector<report::ReportRow> rows;
    for (int k = 1; k <= 5; ++k) {
        backtest::QuintileStrategy strategy(signal, k);
        const auto result = backtest::run_backtest(config, data, strategy);
        std::ostringstream csv;
        report::write_equity_curve_csv(csv, result.curve);
        write_text(dir / fmt::format("quintile_{}.csv", k), csv.str());
        const double total = result.curve.values.back() / result.curve.values.front() - 1.0;
        quintile_numbers.push_back(k);
        final_returns.push_back(total);
        summary["quintiles"].push_back({{"quintile", k}, {"final_return", total}});
        if (opts.table && !result.wiped_out) {
            const auto bench = backtest::benchmark_curve(data, result.curve);
            rows.push_back({strategy.name(),
                            metrics::build_report(result.curve, bench, config.risk_free_rate)});
        }
    }
    if (config.dump_models) dump_models(dir, *signal);

    std::optional<double> rho;
    try {
        rho = metrics::spearman(quintile_numbers, final_returns);
    } catch (const DomainError&) {
    }
    summary["spearman"] = rho ? nlohmann::ordered_json(*rho) : nlohmann::ordered_json(nullptr);
    summary["significance_threshold"] = kQuintileSignificance;
    summary["significant"] = rho && std::abs(*rho) >= kQuintileSignificance;
    summary["q1_beats_q5"] = final_returns.front() > final_returns.back();
    write_text(dir / "quintiles.json", summary.dump(2) + "\n");
    if (opts.table) out << report::render_table(rows);
    return kExitOk;
}

int cmd_features(const RunOptions& opts, const std::string& date, std::ostream& out) {
    const auto config = resolve_config(opts);
    const auto data = load_data(config);
    const auto& cal = data.calendar();
    const Date wanted = parse_date(date);
    std::size_t t = cal.lower_bound(wanted);
    if (t == cal.size() || cal[t] != wanted) {
        if (t == 0) throw InvalidArgument(fmt::format("{} precedes the first trading day", date));
        --t;
    }
    const auto matrix = indicators::compute_features(data, t);
    std::ostringstream csv;
    indicators::write_features_csv(csv, matrix);
    if (opts.out == "-") {
        out << csv.str();
    } else {
        write_text(opts.out, csv.str());
    }
    return kExitOk;
}

int cmd_synth(const synth::SynthParams& params, const std::string& path, std::ostream& out) {
    const auto series = synth::generate(params);
    if (path == "-") {
        write_ohlcv_csv(out, series);
    } else {
        if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
        write_ohlcv_csv(fs::path(path), series);
    }
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& files, bool table, std::ostream& out) {
    std::vector<report::ReportRow> rows;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw Error(fmt::format("cannot open report '{}'", file));
        std::stringstream buffer;
        buffer << in.rdbuf();
        auto file_rows = report::rows_from_report_json(buffer.str());
        // The benchmark row repeats across reports of the same data; keep the first.
        for (auto& row : file_rows) {
            const bool seen = std::any_of(rows.begin(), rows.end(),
                                          [&](const auto& r) { return r.name == row.name; });
            if (!seen) rows.push_back(std::move(row));
        }
    }
    if (table) {
        out << report::render_table(rows);
        return kExitOk;
    }
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        j.push_back({{"name", r.name},
                     {"total_return", m.total_return},
                     {"annualized_return", m.annualized_return},
                     {"sharpe", m.sharpe ? nlohmann::ordered_json(*m.sharpe)
                                         : nlohmann::ordered_json(nullptr)},
                     {"beta", m.beta},
                     {"max_drawdown", m.max_drawdown},
                     {"annual_volatility", m.annual_volatility}});
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

void add_run_options(CLI::App* cmd, RunOptions& opts, const std::string& out_help) {
    cmd->add_option("-c,--config", opts.config, "JSON run config (every field has a default)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", opts.out, out_help);
    cmd->add_option("-s,--set", opts.overrides,
                    "Override a config field, e.g. --set leverage=2 or "
                    "--set costs.slippage_fraction=0 (repeatable, last wins)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Smart-beta backtesting engine: momentum and minimum-variance sleeves"};
    app.name("smartbeta");
    app.require_subcommand(1);

    RunOptions bt;
    auto* backtest_cmd = app.add_subcommand("backtest", "Run a backtest and write its outputs");
    add_run_options(backtest_cmd, bt, "Output directory (default: .)");
    backtest_cmd->add_flag("--table", bt.table, "Also print a metrics table");

    RunOptions qt;
    auto* quintile_cmd =
        app.add_subcommand("quintiles", "Backtest each score quintile as a long-only book");
    add_run_options(quintile_cmd, qt, "Output directory (default: .)");
    quintile_cmd->add_flag("--table", qt.table, "Also print a metrics table");

    RunOptions ft;
    ft.out = "-";
    std::string feature_date;
    auto* features_cmd = app.add_subcommand("features", "Write the feature matrix for one date");
    add_run_options(features_cmd, ft, "Output CSV file, '-' for stdout (default)");
    features_cmd->add_option("-d,--date", feature_date, "Trading date (YYYY-MM-DD)")->required();

    synth::SynthParams sp;
    std::string synth_out = "-";
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic OHLCV fixture");
    synth_cmd->add_option("-o,--out", synth_out, "Output CSV file, '-' for stdout (default)");
    synth_cmd->add_option("--n-symbols", sp.n_symbols, "Number of stocks")->capture_default_str();
    synth_cmd->add_option("--n-days", sp.n_days, "Number of trading days")->capture_default_str();
    synth_cmd->add_option("--start", sp.start, "First trading day")->capture_default_str();
    synth_cmd->add_option("--persistence", sp.persistence,
                          "Share of idiosyncratic variance that persists, in [0, 1)")
        ->capture_default_str();
    synth_cmd->add_option("--halflife", sp.persistence_halflife,
                          "Half-life of the persistent drift, in days")
        ->capture_default_str();
    synth_cmd->add_option("--market-vol", sp.market_vol, "Daily market volatility")
        ->capture_default_str();
    synth_cmd->add_option("--market-drift", sp.market_drift, "Daily market drift")
        ->capture_default_str();
    synth_cmd->add_option("--idio-vol", sp.idio_vol, "Daily idiosyncratic volatility")
        ->capture_default_str();
    synth_cmd->add_option("--beta-min", sp.beta_min, "Lowest factor loading")->capture_default_str();
    synth_cmd->add_option("--beta-max", sp.beta_max, "Highest factor loading")->capture_default_str();
    synth_cmd->add_option("--benchmark", sp.benchmark, "Benchmark ticker")->capture_default_str();
    synth_cmd->add_option("--seed", sp.seed, "Random seed")->capture_default_str();

    std::vector<std::string> report_files;
    bool report_table = false;
    auto* report_cmd = app.add_subcommand("report", "Summarize one or more report.json files");
    report_cmd->add_option("reports", report_files, "report.json files")
        ->required()
        ->check(CLI::ExistingFile);
    report_cmd->add_flag("--table", report_table, "Print a fixed-width comparison table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return kExitConfig;
    }

    try {
        if (*backtest_cmd) return cmd_backtest(bt, out);
        if (*quintile_cmd) return cmd_quintiles(qt, out);
        if (*features_cmd) return cmd_features(ft, feature_date, out);
        if (*synth_cmd) return cmd_synth(sp, synth_out, out);
        if (*report_cmd) return cmd_report(report_files, report_table, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: runtime_error: " << one_line(e.what()) << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}

}  // namespace smartbeta::cli
