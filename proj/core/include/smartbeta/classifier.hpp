#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smartbeta/date.hpp"
#include "smartbeta/indicators.hpp"
#include "smartbeta/market_data.hpp"

namespace smartbeta::classifier {

struct TrainingExample {
    std::vector<double> features;  // rank per feature
    int label = -1;                // +1 outperformer, -1 underperformer
    double weight = 0.0;
};

/// Depth-1 classifier: `polarity` when x[feature_index] > threshold, otherwise -polarity.
struct DecisionStump {
    std::size_t feature_index = 0;
    double threshold = 0.0;
    int polarity = 1;

    int predict(std::span<const double> x) const {
        return x[feature_index] > threshold ? polarity : -polarity;
    }

    friend bool operator==(const DecisionStump&, const DecisionStump&) = default;
};

/// Audit metadata attached to a trained model.
struct TrainingWindow {
    std::string as_of;                 // rebalance date, ISO
    std::vector<std::string> months;   // months that contributed examples
    std::size_t n_examples = 0;
};

struct AdaBoostModel {
    std::vector<DecisionStump> stumps;
    std::vector<double> alphas;
    std::vector<double> errors;   // weighted error of each selected stump
    std::size_t n_rounds = 0;     // requested rounds
    std::size_t arity = 0;
    std::vector<std::string> feature_names;
    TrainingWindow window;

    /// No stumps, or every alpha is zero.
    bool degenerate() const;
    /// Signed ensemble margin sum(alpha_t * h_t(x)).
    double margin(std::span<const double> x) const;
    int predict(std::span<const double> x) const { return margin(x) > 0.0 ? 1 : -1; }
};

/// One month of cross-sectional features with the returns realised over the
/// month that follows the feature date.
struct TrainingMonth {
    YearMonth month;  // month over which `next_returns` are realised
    indicators::FeatureMatrix features;
    std::map<std::string, double> next_returns;
};

/// Labels each stock +1 when its return strictly exceeds the month's
/// cross-sectional median, else -1. Months whose benchmark monthly range
/// exceeds `range_threshold` are skipped. Weights start uniform.
/// Throws EmptyTrainingSetError when nothing survives.
std::vector<TrainingExample> build_training_set(std::span<const TrainingMonth> months,
                                                const PriceSeries& benchmark,
                                                double range_threshold = 0.17);

inline constexpr double kAlphaCap = 10.0;

/// Discrete AdaBoost over decision stumps.
///
/// Each round selects the stump with the smallest weighted error over every
/// (feature, threshold, polarity) candidate. Thresholds are `min - 1` and the
/// midpoints of consecutive distinct feature values. Errors equal within
/// 1e-12 are ties, resolved by the first candidate in (feature, threshold,
/// polarity) order with polarity -1 before +1.
///
/// Training stops before `n_rounds` when the best error is no better than
/// chance (>= 0.5) or when a stump is perfect (error 0, alpha = kAlphaCap).
/// Throws DegenerateModelError when only one label is present.
///
/// `observer`, when set, sees the renormalised example weights after every
/// reweighting step.
using RoundObserver = std::function<void(std::size_t round, std::span<const double> weights)>;
AdaBoostModel train_adaboost(std::span<const TrainingExample> examples, std::size_t n_rounds = 50,
                             const RoundObserver& observer = {});

/// Per-symbol ensemble margin. Logs a warning for a degenerate model (all scores 0).
std::map<std::string, double> predict_scores(const AdaBoostModel& model,
                                             const indicators::FeatureMatrix& features);

/// Stratified k-fold cross-validation; returns the mean held-out accuracy.
double cross_validate(std::span<const TrainingExample> examples, std::size_t folds = 5,
                      std::uint64_t seed = 42, std::size_t n_rounds = 50);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const AdaBoostModel& model);
AdaBoostModel model_from_json(std::string_view text);

}  // namespace smartbeta::classifier
