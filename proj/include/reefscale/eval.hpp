#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace reefscale {

struct PairKey {
    std::string tile_id;
    std::string class_name;

    bool operator<(const PairKey &o) const {
        return tile_id < o.tile_id ||
               (tile_id == o.tile_id && class_name < o.class_name);
    }
    bool operator==(const PairKey &o) const {
        return tile_id == o.tile_id && class_name == o.class_name;
    }
};

/// Aligned reference/predicted scores keyed by (tile, class).
struct PairedScores {
    std::vector<PairKey> keys;
    Eigen::VectorXd reference;
    Eigen::VectorXd predicted;

    void validate() const; // lengths match, values in [0,1], keys unique
};

double rmse(const PairedScores &pairs);
double mae(const PairedScores &pairs);

/// Mean per-pair binary KL divergence p·ln(p/q) + (1−p)·ln((1−p)/(1−q)),
/// with both sides clamped to [epsilon, 1−epsilon].
double binary_kl(const PairedScores &pairs, double epsilon = 1e-7);

enum class AucAveraging { Micro, Macro };

/// Mann–Whitney rank AUC with midranks for ties. References are thresholded
/// into positives/negatives at positive_threshold. Micro pools every pair;
/// macro averages per-class AUCs over classes with both outcomes present.
double roc_auc(const PairedScores &pairs, double positive_threshold = 0.5,
               AucAveraging averaging = AucAveraging::Micro);

/// Mean BCE-with-logits against soft targets, in the stable form
/// max(z,0) − z·P + ln(1 + e^−|z|).
double bce_soft_loss(const Eigen::VectorXd &targets,
                     const Eigen::VectorXd &logits);

/// d(bce_soft_loss)/dz elementwise: σ(z) − P, divided by n for the mean.
Eigen::VectorXd bce_soft_loss_gradient(const Eigen::VectorXd &targets,
                                       const Eigen::VectorXd &logits);

} // namespace reefscale
