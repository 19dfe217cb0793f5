#include "smartbeta/config_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smartbeta/errors.hpp"

namespace smartbeta::backtest {

namespace {

using nlohmann::json;

json to_document(const BacktestConfig& c) {
    return json{
        {"data", c.data},
        {"benchmark", c.benchmark},
        {"symbols", c.symbols},
        {"start", c.start},
        {"end", c.end},
        {"strategy", to_string(c.strategy)},
        {"long_fraction", c.long_fraction},
        {"combo_split", c.combo_split},
        {"leverage", c.leverage},
        {"costs",
         {{"commission_per_share", c.costs.commission_per_share},
          {"slippage_fraction", c.costs.slippage_fraction}}},
        {"financing_rate", c.financing_rate},
        {"borrow_fee_rate", c.borrow_fee_rate},
        {"range_threshold", c.range_threshold},
        {"seed", c.seed},
        {"n_rounds", c.n_rounds},
        {"beta_lookback", c.beta_lookback},
        {"mvp_window", c.mvp_window},
        {"low_beta_count", c.low_beta_count},
        {"initial_capital", c.initial_capital},
        {"fractional_shares", c.fractional_shares},
        {"diagonal_loading", c.diagonal_loading},
        {"risk_free_rate", c.risk_free_rate},
        {"dump_models", c.dump_models},
    };
}

bool same_kind(const json& expected, const json& given) {
    if (expected.is_number()) {
        if (!given.is_number()) return false;
        if (expected.is_number_unsigned()) return given.is_number_unsigned();
        return true;
    }
    if (expected.is_array()) {
        if (!given.is_array()) return false;
        for (const auto& v : given) {
            if (!v.is_string()) return false;
        }
        return true;
    }
    return expected.type() == given.type();
}

/// Copies `given` into `doc`, rejecting keys and types `doc` does not have.
void merge_checked(json& doc, const json& given, const std::string& prefix) {
    if (!given.is_object()) throw ConfigError("config document must be a JSON object");
    for (const auto& [key, value] : given.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!doc.contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", path));
        json& slot = doc[key];
        if (slot.is_object()) {
            merge_checked(slot, value, path);
            continue;
        }
        if (!same_kind(slot, value)) {
            throw ConfigError(fmt::format("config key '{}' has the wrong type ({})", path,
                                          value.type_name()));
        }
        slot = value;
    }
}

BacktestConfig from_document(const json& doc) {
    BacktestConfig c;
    c.data = doc["data"].get<std::string>();
    c.benchmark = doc["benchmark"].get<std::string>();
    c.symbols = doc["symbols"].get<std::vector<std::string>>();
    c.start = doc["start"].get<std::string>();
    c.end = doc["end"].get<std::string>();
    c.strategy = strategy_from_string(doc["strategy"].get<std::string>());
    c.long_fraction = doc["long_fraction"].get<double>();
    c.combo_split = doc["combo_split"].get<double>();
    c.leverage = doc["leverage"].get<double>();
    c.costs.commission_per_share = doc["costs"]["commission_per_share"].get<double>();
    c.costs.slippage_fraction = doc["costs"]["slippage_fraction"].get<double>();
    c.financing_rate = doc["financing_rate"].get<double>();
    c.borrow_fee_rate = doc["borrow_fee_rate"].get<double>();
    c.range_threshold = doc["range_threshold"].get<double>();
    c.seed = doc["seed"].get<std::uint64_t>();
    c.n_rounds = doc["n_rounds"].get<std::size_t>();
    c.beta_lookback = doc["beta_lookback"].get<std::size_t>();
    c.mvp_window = doc["mvp_window"].get<std::size_t>();
    c.low_beta_count = doc["low_beta_count"].get<std::size_t>();
    c.initial_capital = doc["initial_capital"].get<double>();
    c.fractional_shares = doc["fractional_shares"].get<bool>();
    c.diagonal_loading = doc["diagonal_loading"].get<bool>();
    c.risk_free_rate = doc["risk_free_rate"].get<double>();
    c.dump_models = doc["dump_models"].get<bool>();
    return c;
}

}  // namespace

BacktestConfig config_from_json(std::string_view text) {
    json given;
    try {
        given = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    json doc = to_document(BacktestConfig{});
    merge_checked(doc, given, "");
    return from_document(doc);
}

BacktestConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json(buffer.str());
}

void apply_overrides(BacktestConfig& config, std::span<const std::string> overrides) {
    json doc = to_document(config);
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError(fmt::format("override '{}' is not of the form key=value", item));
        }
        const std::string key = item.substr(0, eq);
        const std::string raw = item.substr(eq + 1);
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;

        // Build {"a": {"b": value}} from "a.b" and merge it with type checks.
        json patch = value;
        std::string_view rest = key;
        std::vector<std::string> parts;
        while (true) {
            const auto dot = rest.find('.');
            parts.emplace_back(rest.substr(0, dot));
            if (dot == std::string_view::npos) break;
            rest.remove_prefix(dot + 1);
        }
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
        merge_checked(doc, patch, "");
    }
    config = from_document(doc);
}

std::string config_to_json(const BacktestConfig& config) { return to_document(config).dump(2); }

}  // namespace smartbeta::backtest
