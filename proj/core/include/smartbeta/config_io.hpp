#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "smartbeta/backtester.hpp"

namespace smartbeta::backtest {

/// Parses a JSON run config. Missing fields keep their defaults; unknown keys
/// and wrongly typed values raise ConfigError.
BacktestConfig config_from_json(std::string_view text);
BacktestConfig load_config(const std::filesystem::path& path);

/// Applies `key=value` overrides in order (last wins). Keys are dotted paths
/// into the config document, e.g. `leverage=2` or `costs.slippage_fraction=0`.
/// Values are read as JSON when they parse, otherwise as strings.
void apply_overrides(BacktestConfig& config, std::span<const std::string> overrides);

/// Every field, in the same shape `config_from_json` accepts.
std::string config_to_json(const BacktestConfig& config);

}  // namespace smartbeta::backtest
