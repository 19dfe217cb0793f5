#include "smartbeta/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "smartbeta/errors.hpp"
#include "smartbeta/random.hpp"

namespace smartbeta::synth {

namespace {

double round4(double x) { return std::round(x * 1e4) / 1e4; }

std::vector<Date> weekdays_from(Date start, std::size_t n) {
    std::vector<Date> out;
    out.reserve(n);
    auto day = std::chrono::sys_days{start};
    while (out.size() < n) {
        const Date d{day};
        if (is_weekday(d)) out.push_back(d);
        day += std::chrono::days{1};
    }
    return out;
}

/// Builds a bar around a close path step with an intraday envelope.
Bar make_bar(const Date& date, double prev_close, double close, double vol, Rng& rng) {
    Bar b;
    b.date = date;
    b.close = round4(close);
    b.open = round4(prev_close * (1.0 + 0.25 * vol * rng.normal()));
    const double up = std::abs(rng.normal()) * 0.5 * vol;
    const double down = std::abs(rng.normal()) * 0.5 * vol;
    b.high = round4(std::max(b.open, b.close) * (1.0 + up));
    b.low = round4(std::min(b.open, b.close) * (1.0 - down));
    b.high = std::max({b.high, b.open, b.close});
    b.low = std::min({b.low, b.open, b.close});
    b.volume = static_cast<std::int64_t>(std::floor(std::exp(13.8 + 0.3 * rng.normal())));
    return b;
}

}  // namespace

void SynthParams::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("synth: " + msg); };
    if (n_symbols < 1) fail("n_symbols must be at least 1");
    if (n_days < 2) fail("n_days must be at least 2");
    if (!(persistence >= 0.0 && persistence < 1.0)) fail("persistence must be in [0, 1)");
    if (!(persistence_halflife > 0.0)) fail("persistence_halflife must be positive");
    if (!(market_vol >= 0.0 && market_vol < 0.2)) fail("market_vol must be in [0, 0.2)");
    if (!(idio_vol >= 0.0 && idio_vol < 0.2)) fail("idio_vol must be in [0, 0.2)");
    if (!(std::abs(market_drift) < 0.05)) fail("market_drift must be below 0.05 in magnitude");
    if (!(beta_min <= beta_max)) fail("beta_min must not exceed beta_max");
    if (benchmark.empty()) fail("benchmark must be non-empty");
    try {
        parse_date(start);
    } catch (const InvalidArgument& e) {
        fail(e.what());
    }
}

SeriesMap generate(const SynthParams& p) {
    p.validate();
    Rng rng(p.seed);
    const auto dates = weekdays_from(parse_date(p.start), p.n_days);
    const std::size_t n = p.n_symbols;

    std::vector<double> betas(n);
    for (std::size_t i = 0; i < n; ++i) {
        betas[i] = n == 1 ? p.beta_min
                          : p.beta_min + (p.beta_max - p.beta_min) * static_cast<double>(i) /
                                             static_cast<double>(n - 1);
    }
    rng.shuffle(std::span<double>(betas));

    const double a = std::pow(0.5, 1.0 / p.persistence_halflife);
    const double drift_sd = std::sqrt(p.persistence) * p.idio_vol;
    const double noise_sd = std::sqrt(1.0 - p.persistence) * p.idio_vol;
    const double innovation_sd = std::sqrt(1.0 - a * a) * drift_sd;

    const int digits = std::max(3, static_cast<int>(std::to_string(n - 1).size()));
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) names[i] = fmt::format("S{:0{}}", i, digits);

    SeriesMap out;
    PriceSeries bench{p.benchmark, {}, {}};
    std::vector<PriceSeries> stocks(n);
    for (std::size_t i = 0; i < n; ++i) stocks[i].symbol = names[i];

    double index = 1000.0;
    std::vector<double> price(n, 50.0);
    std::vector<double> drift(n);
    for (auto& d : drift) d = drift_sd * rng.normal();

    for (std::size_t t = 0; t < dates.size(); ++t) {
        const double m = t == 0 ? 0.0 : p.market_drift + p.market_vol * rng.normal();
        const double prev_index = index;
        index *= 1.0 + m;
        bench.bars.push_back(make_bar(dates[t], prev_index, index, p.market_vol, rng));
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            if (t > 0) {
                drift[i] = a * drift[i] + innovation_sd * rng.normal();
                r = std::max(betas[i] * m + drift[i] + noise_sd * rng.normal(), -0.5);
            }
            const double prev = price[i];
            price[i] *= 1.0 + r;
            stocks[i].bars.push_back(make_bar(dates[t], prev, price[i], p.idio_vol, rng));
        }
    }

    out.emplace(p.benchmark, std::move(bench));
    for (auto& s : stocks) {
        std::string name = s.symbol;
        out.emplace(std::move(name), std::move(s));
    }
    return out;
}

}  // namespace smartbeta::synth
