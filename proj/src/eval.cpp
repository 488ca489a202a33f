#include "reefscale/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "reefscale/errors.hpp"

namespace reefscale {

void PairedScores::validate() const {
    auto n = static_cast<Eigen::Index>(keys.size());
    if (reference.size() != n || predicted.size() != n)
        throw DataError("paired score vectors are misaligned");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(reference[i] >= 0.0 && reference[i] <= 1.0) ||
            !(predicted[i] >= 0.0 && predicted[i] <= 1.0))
            throw ProbabilityOutOfRange("paired scores must lie in [0,1]");
    }
    std::set<PairKey> unique(keys.begin(), keys.end());
    if (unique.size() != keys.size())
        throw DataError("duplicate (tile, class) keys in paired scores");
}

namespace {

void require_nonempty(const PairedScores &pairs) {
    pairs.validate();
    if (pairs.keys.empty())
        throw EmptyInput("metric requires at least one pair");
}

// Sum of positive midranks over one pooled score list.
double rank_auc(const std::vector<double> &scores,
                const std::vector<bool> &positive) {
    size_t n = scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    long n_pos = 0;
    for (bool p : positive)
        n_pos += p ? 1 : 0;
    long n_neg = static_cast<long>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateLabels("AUC needs at least one positive and one negative");

    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]])
            ++j;
        double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (size_t k = i; k < j; ++k)
            if (positive[order[k]])
                rank_sum_pos += midrank;
        i = j;
    }
    double np = static_cast<double>(n_pos);
    double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

} // namespace

double rmse(const PairedScores &pairs) {
    require_nonempty(pairs);
    double mse = (pairs.reference - pairs.predicted).squaredNorm() /
                 static_cast<double>(pairs.keys.size());
    return std::sqrt(mse);
}

double mae(const PairedScores &pairs) {
    require_nonempty(pairs);
    return (pairs.reference - pairs.predicted).cwiseAbs().sum() /
           static_cast<double>(pairs.keys.size());
}

double binary_kl(const PairedScores &pairs, double epsilon) {
    require_nonempty(pairs);
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("KL epsilon must lie in (0, 0.5)");
    double total = 0.0;
    auto n = static_cast<Eigen::Index>(pairs.keys.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = std::clamp(pairs.reference[i], epsilon, 1.0 - epsilon);
        double q = std::clamp(pairs.predicted[i], epsilon, 1.0 - epsilon);
        total += p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    }
    return total / static_cast<double>(n);
}

double roc_auc(const PairedScores &pairs, double positive_threshold,
               AucAveraging averaging) {
    require_nonempty(pairs);

    if (averaging == AucAveraging::Micro) {
        std::vector<double> scores(pairs.keys.size());
        std::vector<bool> positive(pairs.keys.size());
        for (size_t i = 0; i < pairs.keys.size(); ++i) {
            scores[i] = pairs.predicted[static_cast<Eigen::Index>(i)];
            positive[i] =
                pairs.reference[static_cast<Eigen::Index>(i)] >= positive_threshold;
        }
        return rank_auc(scores, positive);
    }

    std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>> per_class;
    for (size_t i = 0; i < pairs.keys.size(); ++i) {
        auto &[scores, positive] = per_class[pairs.keys[i].class_name];
        scores.push_back(pairs.predicted[static_cast<Eigen::Index>(i)]);
        positive.push_back(
            pairs.reference[static_cast<Eigen::Index>(i)] >= positive_threshold);
    }
    double total = 0.0;
    long usable = 0;
    for (const auto &[name, data] : per_class) {
        bool has_pos = false, has_neg = false;
        for (bool p : data.second)
            (p ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg)
            continue;
        total += rank_auc(data.first, data.second);
        ++usable;
    }
    if (usable == 0)
        throw DegenerateLabels("no class has both positives and negatives");
    return total / static_cast<double>(usable);
}

double bce_soft_loss(const Eigen::VectorXd &targets,
                     const Eigen::VectorXd &logits) {
    if (targets.size() == 0)
        throw EmptyInput("BCE loss requires at least one element");
    if (targets.size() != logits.size())
        throw DataError("targets and logits are misaligned");
    double total = 0.0;
    for (Eigen::Index i = 0; i < targets.size(); ++i) {
        double p = targets[i];
        if (!(p >= 0.0 && p <= 1.0))
            throw ProbabilityOutOfRange("soft target outside [0,1]");
        double z = logits[i];
        total += std::max(z, 0.0) - z * p + std::log1p(std::exp(-std::abs(z)));
    }
    return total / static_cast<double>(targets.size());
}

Eigen::VectorXd bce_soft_loss_gradient(const Eigen::VectorXd &targets,
                                       const Eigen::VectorXd &logits) {
    if (targets.size() == 0)
        throw EmptyInput("BCE loss requires at least one element");
    if (targets.size() != logits.size())
        throw DataError("targets and logits are misaligned");
    Eigen::VectorXd g(targets.size());
    double n = static_cast<double>(targets.size());
    for (Eigen::Index i = 0; i < targets.size(); ++i) {
        double z = logits[i];
        double sigma = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                                : std::exp(z) / (1.0 + std::exp(z));
        g[i] = (sigma - targets[i]) / n;
    }
    return g;
}

} // namespace reefscale
