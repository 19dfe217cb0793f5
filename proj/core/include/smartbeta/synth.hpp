#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "smartbeta/market_data.hpp"

namespace smartbeta::synth {

/// One-factor daily return model:
///
///     r[i,t] = beta_i * m_t + d[i,t] + e[i,t]
///
/// m_t is the market return, e is white noise and d is a slowly decaying
/// per-stock drift (AR(1) with the given half-life) carrying a `persistence`
/// share of the idiosyncratic variance. With persistence 0 returns are
/// serially independent; above 0, recent winners keep winning, which gives
/// momentum features something to find.
struct SynthParams {
    std::size_t n_symbols = 100;
    std::size_t n_days = 756;
    std::string start = "2010-01-04";  // first trading day; weekends are skipped
    double persistence = 0.0;          // in [0, 1)
    double persistence_halflife = 63.0;
    double market_vol = 0.01;
    double market_drift = 0.0003;
    double idio_vol = 0.015;
    double beta_min = 0.2;
    double beta_max = 1.8;
    std::string benchmark = "SPX";
    std::uint64_t seed = 42;

    /// Throws ConfigError on out-of-range parameters.
    void validate() const;
};

/// Stock symbols are S000, S001, ...; the benchmark is an index starting at
/// 1000 that compounds the market return. Factor loadings are evenly spaced
/// over [beta_min, beta_max] and assigned to symbols in shuffled order.
SeriesMap generate(const SynthParams& params);

}  // namespace smartbeta::synth
