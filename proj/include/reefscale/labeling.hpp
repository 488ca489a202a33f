#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "reefscale/association.hpp"

namespace reefscale {

/// Mapping from teacher (underwater) classes to the aerial class set.
struct ClassCatalog {
    std::vector<std::string> aerial_classes;            // ordered
    std::map<std::string, std::set<std::string>> merge_rules; // aerial → sources
    std::set<std::string> drop_list;                    // teacher classes discarded

    void validate() const;
    int index_of(const std::string &aerial_class) const; // -1 when absent

    /// The reef survey catalog: 12 aerial classes, algae variants merged,
    /// classes with no aerial counterpart dropped.
    static ClassCatalog reef_default();
};

/// Dense per-class values aligned with a catalog's aerial_classes order.
using ClassVector = Eigen::VectorXd;

/// Collapses a teacher class→probability map onto the aerial classes.
/// Merged classes take the max over their present sources; dropped classes
/// vanish; everything else passes through. Classes with no prediction get 0.
ClassVector remap_classes(const std::map<std::string, double> &probs,
                          const ClassCatalog &catalog);

/// Presence/absence by thresholding: h = 1 iff p >= threshold.
ClassVector binarize(const ClassVector &probs, double threshold);

enum class AggregationMethod { Hard, Weighted, Distilled };

const char *aggregation_method_name(AggregationMethod m);
AggregationMethod parse_aggregation_method(const std::string &name);

/// I(y_c=1|t) = 1 − ∏(1 − h_c(x)): present iff any image predicts presence.
ClassVector aggregate_hard(const std::vector<ClassVector> &h_maps);

/// P(y_c=1|t) = 1 − ∏(1 − r_x·h_c(x)).
ClassVector aggregate_weighted(const std::vector<ClassVector> &h_maps,
                               const std::vector<double> &ratios);

/// P(y_c=1|t) = 1 − ∏(1 − r_x·p_c(x)): the soft labels passed to the student.
ClassVector aggregate_distilled(const std::vector<ClassVector> &p_maps,
                                const std::vector<double> &ratios);

struct SoftLabelSet {
    AggregationMethod method = AggregationMethod::Distilled;
    std::vector<std::string> classes;
    std::map<std::string, ClassVector> labels; // tile_id → per-class values

    void validate() const;
};

/// Runs the chosen aggregation over every listed tile. image_probs must hold
/// remapped dense vectors; for hard/weighted they are binarized at
/// binarize_threshold first.
SoftLabelSet aggregate_tiles(const AssociationMap &assoc,
                             const std::vector<std::string> &tile_ids,
                             const std::map<std::string, ClassVector> &image_probs,
                             const std::vector<std::string> &classes,
                             AggregationMethod method,
                             double binarize_threshold = 0.5);

/// Drops classes present (label >= presence_threshold) on fewer than
/// min_count tiles.
SoftLabelSet prune_rare_classes(const SoftLabelSet &labels, int min_count,
                                double presence_threshold = 0.5);

namespace detail {
/// 1 − ∏(1 − f_i) over factors f_i ∈ [0,1], evaluated in log-complement
/// space. Factors are sorted before accumulation so the result is invariant
/// under permutation of the input.
double complement_product(std::vector<double> factors);
} // namespace detail

} // namespace reefscale
