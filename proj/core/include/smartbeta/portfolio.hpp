#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smartbeta/date.hpp"

namespace smartbeta::portfolio {

/// Signed capital fractions per symbol. Negative weights are shorts.
///
/// `weights` is the allocation before leverage; the traded exposure of a
/// symbol is `weights[symbol] * leverage`. Leverage composes by multiplying
/// `leverage` alone, so `weights` never change under apply_leverage.
struct TargetPortfolio {
    Date as_of;
    std::map<std::string, double> weights;
    double leverage = 1.0;

    /// Levered exposure of one symbol (0 when absent).
    double exposure(const std::string& symbol) const;
    /// Levered exposures of every symbol.
    std::map<std::string, double> exposures() const;

    // All four are on levered exposures.
    double gross() const;
    double net() const;
    double long_exposure() const;   // sum of positive exposures
    double short_exposure() const;  // sum of |negative exposures|
};

using QuintileMap = std::map<std::string, int>;

/// Quintile 1 holds the top-scoring fifth. With N % 5 = r, the first r
/// quintiles take one extra member. Equal scores fall back to symbol order.
QuintileMap assign_quintiles(const std::map<std::string, double>& scores);

/// +long_fraction spread evenly over Q1, -(1 - long_fraction) over Q5, zero elsewhere.
TargetPortfolio long_short_weights(const QuintileMap& quintiles, double long_fraction,
                                   const Date& as_of = {});

/// Evenly weighted long-only book on a single quintile (gross 1).
TargetPortfolio quintile_long_only(const QuintileMap& quintiles, int quintile,
                                   const Date& as_of = {});

/// Sample covariance over sample variance of the benchmark.
double estimate_beta(std::span<const double> asset_returns,
                     std::span<const double> benchmark_returns);

struct BetaEstimate {
    std::string symbol;
    double beta = 0.0;
    std::size_t lookback = 66;
};

/// The `count` symbols with the smallest beta, ties by symbol. Returned in
/// ascending symbol order.
std::vector<std::string> select_low_beta(std::span<const BetaEstimate> betas,
                                         std::size_t count = 25);

/// Daily returns, one column per symbol.
struct ReturnsWindow {
    std::vector<std::string> symbols;
    Eigen::MatrixXd returns;  // observations x symbols
};

struct CovarianceMatrix {
    std::vector<std::string> symbols;
    Eigen::MatrixXd matrix;
};

/// Sample (N - 1) covariance of the window's columns, exactly symmetric.
CovarianceMatrix sample_covariance(const ReturnsWindow& window);

struct MvpOptions {
    double min_rcond = 1e-10;
    /// Adds `loading * mean(diag V)` to the diagonal before solving.
    bool diagonal_loading = false;
    double loading = 1e-6;
};

/// Solves V w1 = R and V w2 = 1 (R = mean daily returns), then normalises
/// w1 + w2 to sum to one. Long and short weights are both allowed.
/// Throws SingularMatrixError when the reciprocal condition estimate of V is
/// below `min_rcond`, and DomainError when the raw weights sum to ~0.
TargetPortfolio mvp_weights(const ReturnsWindow& window, const Date& as_of = {},
                            const MvpOptions& options = {});

/// As above from a covariance matrix and mean-return vector given directly.
/// `window_label` names the data window in error messages.
TargetPortfolio mvp_weights(const CovarianceMatrix& covariance,
                            const Eigen::VectorXd& mean_returns, const Date& as_of = {},
                            const MvpOptions& options = {},
                            std::string_view window_label = "the given covariance");

/// split * momentum + (1 - split) * mvp, per symbol, on levered exposures.
/// The result carries leverage 1.
TargetPortfolio combine(const TargetPortfolio& momentum, const TargetPortfolio& mvp,
                        double split = 0.5);

/// Multiplies the leverage by `factor` (>= 1); every exposure scales with it.
TargetPortfolio apply_leverage(const TargetPortfolio& portfolio, double factor = 2.0);

/// Rows `date,symbol,weight` with levered exposures, symbols ascending.
void write_targets_csv(std::ostream& out, const TargetPortfolio& portfolio, bool header = true);

}  // namespace smartbeta::portfolio
