#include "smartbeta/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "smartbeta/errors.hpp"

namespace smartbeta::portfolio {

double TargetPortfolio::exposure(const std::string& symbol) const {
    auto it = weights.find(symbol);
    return it == weights.end() ? 0.0 : it->second * leverage;
}

std::map<std::string, double> TargetPortfolio::exposures() const {
    std::map<std::string, double> out;
    for (const auto& [symbol, w] : weights) out.emplace(symbol, w * leverage);
    return out;
}

double TargetPortfolio::gross() const {
    double g = 0.0;
    for (const auto& [_, w] : weights) g += std::abs(w * leverage);
    return g;
}

double TargetPortfolio::net() const {
    double n = 0.0;
    for (const auto& [_, w] : weights) n += w * leverage;
    return n;
}

double TargetPortfolio::long_exposure() const {
    double s = 0.0;
    for (const auto& [_, w] : weights) s += std::max(w * leverage, 0.0);
    return s;
}

double TargetPortfolio::short_exposure() const {
    double s = 0.0;
    for (const auto& [_, w] : weights) s += std::max(-w * leverage, 0.0);
    return s;
}

QuintileMap assign_quintiles(const std::map<std::string, double>& scores) {
    const std::size_t n = scores.size();
    if (n < 5) throw InvalidArgument(fmt::format("need at least 5 symbols for quintiles, got {}", n));
    std::vector<std::pair<const std::string*, double>> order;
    order.reserve(n);
    for (const auto& [symbol, s] : scores) order.emplace_back(&symbol, s);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    const std::size_t base = n / 5;
    const std::size_t extra = n % 5;
    QuintileMap out;
    std::size_t pos = 0;
    for (int q = 1; q <= 5; ++q) {
        const std::size_t size = base + (static_cast<std::size_t>(q) <= extra ? 1 : 0);
        for (std::size_t k = 0; k < size; ++k, ++pos) out.emplace(*order[pos].first, q);
    }
    return out;
}

TargetPortfolio long_short_weights(const QuintileMap& quintiles, double long_fraction,
                                   const Date& as_of) {
    if (!(long_fraction > 0.0 && long_fraction < 1.0)) {
        throw InvalidArgument(fmt::format("long_fraction {} outside (0, 1)", long_fraction));
    }
    std::size_t n_long = 0;
    std::size_t n_short = 0;
    for (const auto& [_, q] : quintiles) {
        n_long += q == 1;
        n_short += q == 5;
    }
    if (n_long == 0 || n_short == 0) throw InvalidArgument("extreme quintile is empty");
    const double w_long = long_fraction / static_cast<double>(n_long);
    const double w_short = -(1.0 - long_fraction) / static_cast<double>(n_short);
    TargetPortfolio p;
    p.as_of = as_of;
    for (const auto& [symbol, q] : quintiles) {
        p.weights[symbol] = q == 1 ? w_long : (q == 5 ? w_short : 0.0);
    }
    return p;
}

TargetPortfolio quintile_long_only(const QuintileMap& quintiles, int quintile, const Date& as_of) {
    if (quintile < 1 || quintile > 5) throw InvalidArgument("quintile must be in 1..5");
    const auto members = std::count_if(quintiles.begin(), quintiles.end(),
                                       [&](const auto& kv) { return kv.second == quintile; });
    if (members == 0) throw InvalidArgument(fmt::format("quintile {} is empty", quintile));
    TargetPortfolio p;
    p.as_of = as_of;
    for (const auto& [symbol, q] : quintiles) {
        p.weights[symbol] = q == quintile ? 1.0 / static_cast<double>(members) : 0.0;
    }
    return p;
}

double estimate_beta(std::span<const double> asset_returns,
                     std::span<const double> benchmark_returns) {
    const std::size_t n = asset_returns.size();
    if (n != benchmark_returns.size()) throw InvalidArgument("beta inputs differ in length");
    if (n < 2) throw InsufficientHistoryError("beta needs at least 2 observations");
    double mean_a = 0.0;
    double mean_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += asset_returns[i];
        mean_m += benchmark_returns[i];
    }
    mean_a /= static_cast<double>(n);
    mean_m /= static_cast<double>(n);
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dm = benchmark_returns[i] - mean_m;
        cov += (asset_returns[i] - mean_a) * dm;
        var += dm * dm;
    }
    if (!(var > 0.0)) throw DomainError("benchmark return variance is zero");
    // The (n - 1) factors cancel.
    return cov / var;
}

std::vector<std::string> select_low_beta(std::span<const BetaEstimate> betas, std::size_t count) {
    if (betas.size() < count) {
        throw InvalidArgument(
            fmt::format("need {} beta estimates, got {}", count, betas.size()));
    }
    std::vector<const BetaEstimate*> order;
    order.reserve(betas.size());
    for (const auto& b : betas) {
        if (!std::isfinite(b.beta)) throw InvalidArgument(fmt::format("non-finite beta for {}", b.symbol));
        order.push_back(&b);
    }
    std::sort(order.begin(), order.end(), [](const BetaEstimate* a, const BetaEstimate* b) {
        return a->beta != b->beta ? a->beta < b->beta : a->symbol < b->symbol;
    });
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(order[i]->symbol);
    std::sort(out.begin(), out.end());
    return out;
}

CovarianceMatrix sample_covariance(const ReturnsWindow& window) {
    const auto& r = window.returns;
    if (r.rows() < 2) throw InsufficientHistoryError("covariance needs at least 2 observations");
    if (static_cast<std::size_t>(r.cols()) != window.symbols.size()) {
        throw InvalidArgument("returns window column count does not match symbols");
    }
    const Eigen::MatrixXd centered = r.rowwise() - r.colwise().mean();
    Eigen::MatrixXd v = (centered.transpose() * centered) / static_cast<double>(r.rows() - 1);
    v = 0.5 * (v + v.transpose()).eval();
    return {window.symbols, std::move(v)};
}

TargetPortfolio mvp_weights(const CovarianceMatrix& covariance,
                            const Eigen::VectorXd& mean_returns, const Date& as_of,
                            const MvpOptions& options, std::string_view window_label) {
    const auto n = covariance.matrix.cols();
    if (n < 2) throw InvalidArgument("minimum-variance portfolio needs at least 2 symbols");
    if (covariance.matrix.rows() != n || mean_returns.size() != n ||
        static_cast<Eigen::Index>(covariance.symbols.size()) != n) {
        throw InvalidArgument("covariance, mean returns and symbols disagree in size");
    }

    Eigen::MatrixXd v = covariance.matrix;
    if (options.diagonal_loading) {
        v.diagonal().array() += options.loading * v.diagonal().mean();
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(v);
    const double rcond = lu.rcond();
    if (!(rcond >= options.min_rcond)) {
        throw SingularMatrixError(fmt::format(
            "covariance matrix is singular or near-singular (rcond {:.3g}) for {} ending {} over "
            "{} symbols",
            rcond, window_label, format_date(as_of), n));
    }
    const Eigen::VectorXd raw = lu.solve(mean_returns) + lu.solve(Eigen::VectorXd::Ones(n));
    const double total = raw.sum();
    if (!std::isfinite(total) || std::abs(total) <= 1e-12) {
        throw DomainError(fmt::format("raw minimum-variance weights sum to {}", total));
    }
    TargetPortfolio p;
    p.as_of = as_of;
    for (Eigen::Index i = 0; i < n; ++i) {
        p.weights[covariance.symbols[static_cast<std::size_t>(i)]] = raw[i] / total;
    }
    return p;
}

TargetPortfolio mvp_weights(const ReturnsWindow& window, const Date& as_of,
                            const MvpOptions& options) {
    if (window.returns.cols() < 2) {
        throw InvalidArgument("minimum-variance portfolio needs at least 2 symbols");
    }
    if (window.returns.rows() < 2) throw InsufficientHistoryError("need at least 2 observations");
    const Eigen::VectorXd mean_returns = window.returns.colwise().mean().transpose();
    return mvp_weights(sample_covariance(window), mean_returns, as_of, options,
                       fmt::format("the {}-day window", window.returns.rows()));
}

TargetPortfolio combine(const TargetPortfolio& momentum, const TargetPortfolio& mvp, double split) {
    if (!(split >= 0.0 && split <= 1.0)) {
        throw InvalidArgument(fmt::format("split {} outside [0, 1]", split));
    }
    if (momentum.as_of != mvp.as_of) {
        throw InvalidArgument(fmt::format("cannot combine portfolios dated {} and {}",
                                          format_date(momentum.as_of), format_date(mvp.as_of)));
    }
    TargetPortfolio out;
    out.as_of = momentum.as_of;
    for (const auto& [symbol, w] : momentum.weights) {
        out.weights[symbol] += split * (w * momentum.leverage);
    }
    for (const auto& [symbol, w] : mvp.weights) {
        out.weights[symbol] += (1.0 - split) * (w * mvp.leverage);
    }
    return out;
}

TargetPortfolio apply_leverage(const TargetPortfolio& portfolio, double factor) {
    if (!(factor >= 1.0)) throw InvalidArgument(fmt::format("leverage factor {} < 1", factor));
    TargetPortfolio out = portfolio;
    out.leverage *= factor;
    return out;
}

void write_targets_csv(std::ostream& out, const TargetPortfolio& portfolio, bool header) {
    if (header) out << "date,symbol,weight\n";
    const auto date = format_date(portfolio.as_of);
    for (const auto& [symbol, w] : portfolio.weights) {
        out << fmt::format("{},{},{}\n", date, symbol, w * portfolio.leverage);
    }
}

}  // namespace smartbeta::portfolio
