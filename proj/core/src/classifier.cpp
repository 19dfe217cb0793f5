#include "smartbeta/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smartbeta/errors.hpp"
#include "smartbeta/log.hpp"
#include "smartbeta/random.hpp"

namespace smartbeta::classifier {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kChanceTolerance = 1e-10;

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct Candidate {
    double error = 0.0;
    DecisionStump stump;
};

/// Presorted view of one feature column.
struct Column {
    std::vector<std::size_t> order;    // example indices sorted by value
    std::vector<double> values;        // distinct values, ascending
};

Column make_column(std::span<const TrainingExample> examples, std::size_t f) {
    Column c;
    c.order.resize(examples.size());
    std::iota(c.order.begin(), c.order.end(), std::size_t{0});
    std::stable_sort(c.order.begin(), c.order.end(), [&](std::size_t a, std::size_t b) {
        return examples[a].features[f] < examples[b].features[f];
    });
    for (std::size_t i : c.order) {
        const double v = examples[i].features[f];
        if (c.values.empty() || c.values.back() != v) c.values.push_back(v);
    }
    return c;
}

/// Best stump on one feature. Sweeps thresholds in ascending order and
/// keeps the first candidate among ties.
Candidate best_on_feature(std::span<const TrainingExample> examples, std::span<const double> w,
                          const Column& col, std::size_t f) {
    double total_pos = 0.0;
    double total_neg = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        (examples[i].label > 0 ? total_pos : total_neg) += w[i];
    }
    Candidate best;
    bool have = false;
    auto consider = [&](double threshold, double left_pos, double left_neg) {
        // polarity -1: x <= threshold -> +1, x > threshold -> -1
        const double err_minus = left_neg + (total_pos - left_pos);
        // polarity +1: x <= threshold -> -1, x > threshold -> +1
        const double err_plus = left_pos + (total_neg - left_neg);
        if (!have || err_minus < best.error - kTieTolerance) {
            best = {err_minus, {f, threshold, -1}};
            have = true;
        }
        if (err_plus < best.error - kTieTolerance) best = {err_plus, {f, threshold, +1}};
    };

    consider(col.values.front() - 1.0, 0.0, 0.0);
    double left_pos = 0.0;
    double left_neg = 0.0;
    std::size_t k = 0;
    for (std::size_t v = 0; v + 1 < col.values.size(); ++v) {
        while (k < col.order.size() && examples[col.order[k]].features[f] <= col.values[v]) {
            const std::size_t i = col.order[k++];
            (examples[i].label > 0 ? left_pos : left_neg) += w[i];
        }
        consider(0.5 * (col.values[v] + col.values[v + 1]), left_pos, left_neg);
    }
    return best;
}

double weighted_error(std::span<const TrainingExample> examples, std::span<const double> w,
                      const DecisionStump& stump) {
    double err = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (stump.predict(examples[i].features) != examples[i].label) err += w[i];
    }
    return err;
}

std::vector<std::string> default_feature_names(std::size_t arity) {
    std::vector<std::string> names;
    for (std::size_t f = 0; f < arity; ++f) {
        names.emplace_back(arity == indicators::kFeatureCount ? indicators::kFeatureNames[f]
                                                               : fmt::format("f{}", f));
    }
    return names;
}

}  // namespace

bool AdaBoostModel::degenerate() const {
    return stumps.empty() ||
           std::all_of(alphas.begin(), alphas.end(), [](double a) { return a == 0.0; });
}

double AdaBoostModel::margin(std::span<const double> x) const {
    if (x.size() != arity) {
        throw InvalidArgument(fmt::format("feature arity {} does not match model arity {}",
                                          x.size(), arity));
    }
    double score = 0.0;
    for (std::size_t t = 0; t < stumps.size(); ++t) score += alphas[t] * stumps[t].predict(x);
    return score;
}

std::vector<TrainingExample> build_training_set(std::span<const TrainingMonth> months,
                                                const PriceSeries& benchmark,
                                                double range_threshold) {
    std::vector<TrainingExample> out;
    for (const auto& month : months) {
        const double range = monthly_range(benchmark, month.month);
        if (range > range_threshold) {
            log::info(fmt::format("skipping unstable month {} (benchmark range {:.4f})",
                                  format_year_month(month.month), range));
            continue;
        }
        std::vector<std::pair<const std::string*, double>> members;
        for (const auto& row : month.features.rows) {
            auto it = month.next_returns.find(row.symbol);
            if (it != month.next_returns.end()) members.emplace_back(&row.symbol, it->second);
        }
        if (members.empty()) continue;
        std::vector<double> rets;
        rets.reserve(members.size());
        for (const auto& m : members) rets.push_back(m.second);
        const double mid = median(std::move(rets));
        for (const auto& [symbol, ret] : members) {
            TrainingExample ex;
            ex.features = month.features.rank_vector(*symbol);
            ex.label = ret > mid ? 1 : -1;
            out.push_back(std::move(ex));
        }
    }
    if (out.empty()) throw EmptyTrainingSetError("every training month was filtered or empty");
    const double w = 1.0 / static_cast<double>(out.size());
    for (auto& ex : out) ex.weight = w;
    return out;
}

AdaBoostModel train_adaboost(std::span<const TrainingExample> examples, std::size_t n_rounds,
                             const RoundObserver& observer) {
    if (examples.empty()) throw InvalidArgument("no training examples");
    const std::size_t arity = examples.front().features.size();
    if (arity == 0) throw InvalidArgument("training examples have no features");
    bool has_pos = false;
    bool has_neg = false;
    for (const auto& ex : examples) {
        if (ex.features.size() != arity) throw InvalidArgument("inconsistent feature arity");
        if (ex.label != 1 && ex.label != -1) throw InvalidArgument("labels must be +1 or -1");
        (ex.label > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw DegenerateModelError("training set contains a single class");

    std::vector<double> w(examples.size());
    double total = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) total += (w[i] = examples[i].weight);
    if (!(total > 0.0)) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(examples.size()));
    } else {
        for (double& x : w) x /= total;
    }

    std::vector<Column> columns;
    columns.reserve(arity);
    for (std::size_t f = 0; f < arity; ++f) columns.push_back(make_column(examples, f));

    AdaBoostModel model;
    model.n_rounds = n_rounds;
    model.arity = arity;
    model.feature_names = default_feature_names(arity);

    for (std::size_t round = 0; round < n_rounds; ++round) {
        Candidate best = best_on_feature(examples, w, columns[0], 0);
        for (std::size_t f = 1; f < arity; ++f) {
            const Candidate c = best_on_feature(examples, w, columns[f], f);
            if (c.error < best.error - kTieTolerance) best = c;
        }
        // Sum directly so alpha does not inherit prefix-sum rounding.
        const double err = std::max(0.0, weighted_error(examples, w, best.stump));
        if (err >= 0.5 - kChanceTolerance) break;
        const double alpha = err <= 0.0 ? kAlphaCap : 0.5 * std::log((1.0 - err) / err);
        model.stumps.push_back(best.stump);
        model.alphas.push_back(alpha);
        model.errors.push_back(err);
        if (err <= 0.0) break;

        double sum = 0.0;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            w[i] *= std::exp(-alpha * examples[i].label * best.stump.predict(examples[i].features));
            sum += w[i];
        }
        for (double& x : w) x /= sum;
        if (observer) observer(round, w);
    }
    return model;
}

std::map<std::string, double> predict_scores(const AdaBoostModel& model,
                                             const indicators::FeatureMatrix& features) {
    if (model.degenerate()) {
        log::warning("degenerate AdaBoost model: every score is 0");
    }
    std::map<std::string, double> scores;
    for (const auto& row : features.rows) {
        scores.emplace(row.symbol, model.margin(features.rank_vector(row.symbol)));
    }
    return scores;
}

double cross_validate(std::span<const TrainingExample> examples, std::size_t folds,
                      std::uint64_t seed, std::size_t n_rounds) {
    if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
    if (examples.size() < folds) {
        throw InvalidArgument(
            fmt::format("{} examples cannot fill {} folds", examples.size(), folds));
    }
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        (examples[i].label > 0 ? pos : neg).push_back(i);
    }
    Rng rng(seed);
    rng.shuffle(std::span(pos));
    rng.shuffle(std::span(neg));
    std::vector<std::size_t> fold_of(examples.size());
    for (std::size_t k = 0; k < pos.size(); ++k) fold_of[pos[k]] = k % folds;
    // Continue the round-robin so small classes do not all land in fold 0.
    for (std::size_t k = 0; k < neg.size(); ++k) fold_of[neg[k]] = (pos.size() + k) % folds;

    double acc_sum = 0.0;
    std::vector<TrainingExample> train;
    for (std::size_t fold = 0; fold < folds; ++fold) {
        train.clear();
        for (std::size_t i = 0; i < examples.size(); ++i) {
            if (fold_of[i] != fold) train.push_back(examples[i]);
        }
        for (auto& ex : train) ex.weight = 1.0;
        const AdaBoostModel model = train_adaboost(train, n_rounds);
        std::size_t correct = 0;
        std::size_t held = 0;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            if (fold_of[i] != fold) continue;
            ++held;
            if (model.predict(examples[i].features) == examples[i].label) ++correct;
        }
        acc_sum += static_cast<double>(correct) / static_cast<double>(held);
    }
    return acc_sum / static_cast<double>(folds);
}

std::string model_to_json(const AdaBoostModel& model) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["n_rounds"] = model.n_rounds;
    j["arity"] = model.arity;
    j["feature_names"] = model.feature_names;
    auto& stumps = j["stumps"] = nlohmann::json::array();
    for (std::size_t t = 0; t < model.stumps.size(); ++t) {
        stumps.push_back({{"feature_index", model.stumps[t].feature_index},
                          {"threshold", model.stumps[t].threshold},
                          {"polarity", model.stumps[t].polarity},
                          {"alpha", model.alphas[t]},
                          {"error", model.errors[t]}});
    }
    j["training_window"] = {{"as_of", model.window.as_of},
                            {"months", model.window.months},
                            {"n_examples", model.window.n_examples}};
    return j.dump(2);
}

AdaBoostModel model_from_json(std::string_view text) {
    AdaBoostModel model;
    try {
        const auto j = nlohmann::json::parse(text);
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw InvalidArgument(fmt::format("unsupported model format version {}", version));
        }
        model.n_rounds = j.at("n_rounds").get<std::size_t>();
        model.arity = j.at("arity").get<std::size_t>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        for (const auto& s : j.at("stumps")) {
            DecisionStump stump{s.at("feature_index").get<std::size_t>(),
                                s.at("threshold").get<double>(), s.at("polarity").get<int>()};
            if (stump.feature_index >= model.arity || (stump.polarity != 1 && stump.polarity != -1)) {
                throw InvalidArgument("invalid stump in model document");
            }
            model.stumps.push_back(stump);
            model.alphas.push_back(s.at("alpha").get<double>());
            model.errors.push_back(s.at("error").get<double>());
        }
        const auto& win = j.at("training_window");
        model.window.as_of = win.at("as_of").get<std::string>();
        model.window.months = win.at("months").get<std::vector<std::string>>();
        model.window.n_examples = win.at("n_examples").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(fmt::format("malformed model document: {}", e.what()));
    }
    return model;
}

}  // namespace smartbeta::classifier
