#include "reefscale/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reefscale/errors.hpp"

namespace reefscale {

void ClassCatalog::validate() const {
    if (aerial_classes.empty())
        throw DataError("class catalog has no aerial classes");
    std::set<std::string> seen(aerial_classes.begin(), aerial_classes.end());
    if (seen.size() != aerial_classes.size())
        throw DataError("duplicate aerial class names");

    std::set<std::string> all_sources;
    for (const auto &[target, sources] : merge_rules) {
        if (!seen.count(target))
            throw DataError("merge target " + target + " is not an aerial class");
        if (sources.empty())
            throw DataError("merge rule for " + target + " has no sources");
        for (const std::string &s : sources) {
            if (!all_sources.insert(s).second)
                throw DataError("teacher class " + s + " appears in two merge rules");
            if (drop_list.count(s))
                throw DataError("teacher class " + s + " both merged and dropped");
        }
    }
}

int ClassCatalog::index_of(const std::string &aerial_class) const {
    auto it = std::find(aerial_classes.begin(), aerial_classes.end(), aerial_class);
    if (it == aerial_classes.end())
        return -1;
    return static_cast<int>(it - aerial_classes.begin());
}

ClassCatalog ClassCatalog::reef_default() {
    ClassCatalog cat;
    cat.aerial_classes = {
        "Acropore_branched", "Acropore_digitised", "Acropore_tabular",
        "Dead_coral",        "No_acropore_encrusting", "No_acropore_massive",
        "Millepore",         "No_acropore_sub_massive",
        "Rock",              "Rubble",             "Sand",
        "Algae",
    };
    cat.merge_rules["Algae"] = {"Algae_assembly", "Algae_drawn_up",
                                "Algae_limestone", "Algae_sodding"};
    cat.drop_list = {"Blurred", "Human_object", "Fish", "Sea_cucumber",
                     "Sea_urchins"};
    cat.validate();
    return cat;
}

ClassVector remap_classes(const std::map<std::string, double> &probs,
                          const ClassCatalog &catalog) {
    catalog.validate();
    std::map<std::string, std::string> source_to_target;
    for (const auto &[target, sources] : catalog.merge_rules)
        for (const std::string &s : sources)
            source_to_target[s] = target;

    ClassVector out = ClassVector::Zero(static_cast<Eigen::Index>(
        catalog.aerial_classes.size()));
    for (const auto &[name, p] : probs) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ProbabilityOutOfRange("teacher probability for " + name +
                                        " outside [0,1]");
        auto mit = source_to_target.find(name);
        if (mit != source_to_target.end()) {
            int idx = catalog.index_of(mit->second);
            out[idx] = std::max(out[idx], p);
            continue;
        }
        if (catalog.drop_list.count(name))
            continue;
        int idx = catalog.index_of(name);
        if (idx < 0)
            throw UnknownClass("teacher class " + name + " not in catalog");
        out[idx] = std::max(out[idx], p);
    }
    return out;
}

ClassVector binarize(const ClassVector &probs, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("binarization threshold must lie in (0,1)");
    ClassVector h(probs.size());
    for (Eigen::Index i = 0; i < probs.size(); ++i)
        h[i] = probs[i] >= threshold ? 1.0 : 0.0;
    return h;
}

const char *aggregation_method_name(AggregationMethod m) {
    switch (m) {
    case AggregationMethod::Hard: return "hard";
    case AggregationMethod::Weighted: return "weighted";
    case AggregationMethod::Distilled: return "distilled";
    }
    return "unknown";
}

AggregationMethod parse_aggregation_method(const std::string &name) {
    if (name == "hard") return AggregationMethod::Hard;
    if (name == "weighted") return AggregationMethod::Weighted;
    if (name == "distilled") return AggregationMethod::Distilled;
    throw std::invalid_argument("unknown aggregation method: " + name);
}

namespace detail {

double complement_product(std::vector<double> factors) {
    // Any certain factor decides the product outright.
    for (double f : factors)
        if (f >= 1.0)
            return 1.0;
    if (factors.size() == 1)
        return factors[0]; // exact single-image case
    std::sort(factors.begin(), factors.end());
    double log_comp = 0.0;
    for (double f : factors)
        log_comp += std::log1p(-f);
    double result = -std::expm1(log_comp);
    // + 0.0 turns the -0.0 that -expm1(0) yields into plain zero so absent
    // classes serialize as "0", not "-0".
    return std::clamp(result, 0.0, 1.0) + 0.0;
}

} // namespace detail

namespace {

ClassVector aggregate_scaled(const std::vector<ClassVector> &maps,
                             const std::vector<double> *ratios,
                             const char *value_kind) {
    if (maps.empty())
        throw NoImages("aggregation requires at least one image");
    if (ratios && ratios->size() != maps.size())
        throw DataError("ratio list does not match image list");
    Eigen::Index n_classes = maps[0].size();
    for (size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].size() != n_classes)
            throw DataError("inconsistent class vector lengths");
        for (Eigen::Index c = 0; c < n_classes; ++c)
            if (!(maps[i][c] >= 0.0 && maps[i][c] <= 1.0))
                throw ProbabilityOutOfRange(std::string(value_kind) +
                                            " value outside [0,1]");
        if (ratios && !((*ratios)[i] >= 0.0 && (*ratios)[i] <= 1.0))
            throw RatioOutOfRange("overlap ratio outside [0,1]");
    }

    ClassVector out(n_classes);
    std::vector<double> factors(maps.size());
    for (Eigen::Index c = 0; c < n_classes; ++c) {
        for (size_t i = 0; i < maps.size(); ++i)
            factors[i] = (ratios ? (*ratios)[i] : 1.0) * maps[i][c];
        out[c] = detail::complement_product(factors);
    }
    return out;
}

} // namespace

ClassVector aggregate_hard(const std::vector<ClassVector> &h_maps) {
    return aggregate_scaled(h_maps, nullptr, "presence");
}

ClassVector aggregate_weighted(const std::vector<ClassVector> &h_maps,
                               const std::vector<double> &ratios) {
    return aggregate_scaled(h_maps, &ratios, "presence");
}

ClassVector aggregate_distilled(const std::vector<ClassVector> &p_maps,
                                const std::vector<double> &ratios) {
    return aggregate_scaled(p_maps, &ratios, "probability");
}

void SoftLabelSet::validate() const {
    auto n = static_cast<Eigen::Index>(classes.size());
    for (const auto &[tile_id, values] : labels) {
        if (values.size() != n)
            throw DataError("tile " + tile_id + " label length mismatch");
        for (Eigen::Index c = 0; c < n; ++c)
            if (!(values[c] >= 0.0 && values[c] <= 1.0))
                throw ProbabilityOutOfRange("tile " + tile_id +
                                            " label outside [0,1]");
    }
}

SoftLabelSet aggregate_tiles(const AssociationMap &assoc,
                             const std::vector<std::string> &tile_ids,
                             const std::map<std::string, ClassVector> &image_probs,
                             const std::vector<std::string> &classes,
                             AggregationMethod method,
                             double binarize_threshold) {
    SoftLabelSet out;
    out.method = method;
    out.classes = classes;

    for (const std::string &tile_id : tile_ids) {
        auto ait = assoc.find(tile_id);
        if (ait == assoc.end() || ait->second.image_ids.empty())
            throw NoImages("tile " + tile_id + " has no associated images");
        const TileAssociation &ta = ait->second;

        std::vector<ClassVector> maps;
        maps.reserve(ta.image_ids.size());
        for (const std::string &img : ta.image_ids) {
            auto pit = image_probs.find(img);
            if (pit == image_probs.end())
                throw DataError("no predictions for image " + img);
            if (method == AggregationMethod::Distilled)
                maps.push_back(pit->second);
            else
                maps.push_back(binarize(pit->second, binarize_threshold));
        }

        switch (method) {
        case AggregationMethod::Hard:
            out.labels[tile_id] = aggregate_hard(maps);
            break;
        case AggregationMethod::Weighted:
            out.labels[tile_id] = aggregate_weighted(maps, ta.overlap_ratios);
            break;
        case AggregationMethod::Distilled:
            out.labels[tile_id] = aggregate_distilled(maps, ta.overlap_ratios);
            break;
        }
    }
    out.validate();
    return out;
}

SoftLabelSet prune_rare_classes(const SoftLabelSet &labels, int min_count,
                                double presence_threshold) {
    if (min_count < 0)
        throw std::invalid_argument("min_count must be nonnegative");
    labels.validate();

    auto n = static_cast<Eigen::Index>(labels.classes.size());
    std::vector<long> counts(labels.classes.size(), 0);
    for (const auto &[tile_id, values] : labels.labels)
        for (Eigen::Index c = 0; c < n; ++c)
            if (values[c] >= presence_threshold)
                ++counts[static_cast<size_t>(c)];

    std::vector<Eigen::Index> kept;
    SoftLabelSet out;
    out.method = labels.method;
    for (Eigen::Index c = 0; c < n; ++c) {
        if (counts[static_cast<size_t>(c)] >= min_count) {
            kept.push_back(c);
            out.classes.push_back(labels.classes[static_cast<size_t>(c)]);
        }
    }
    for (const auto &[tile_id, values] : labels.labels) {
        ClassVector v(static_cast<Eigen::Index>(kept.size()));
        for (size_t k = 0; k < kept.size(); ++k)
            v[static_cast<Eigen::Index>(k)] = values[kept[k]];
        out.labels[tile_id] = std::move(v);
    }
    return out;
}

} // namespace reefscale
