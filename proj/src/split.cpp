#include "reefscale/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "reefscale/errors.hpp"

namespace reefscale {

namespace detail {

uint64_t fnv1a64(const std::string &s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit_double(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace detail

const char *subset_name(Subset s) {
    switch (s) {
    case Subset::Train: return "train";
    case Subset::Val: return "val";
    case Subset::Test: return "test";
    }
    return "unknown";
}

namespace {

// Seeded choice among k candidates; avoids std distributions for
// cross-platform reproducibility.
size_t pick_uniform(std::mt19937_64 &rng, size_t k) {
    double u = detail::unit_double(rng());
    size_t idx = static_cast<size_t>(u * static_cast<double>(k));
    return std::min(idx, k - 1);
}

// Subset with the strictly largest value; ties resolved by larger overall
// capacity, then by seeded uniform choice.
int choose_subset(const std::array<double, 2> &per_label,
                  const std::array<double, 2> &capacity,
                  std::mt19937_64 &rng) {
    std::vector<int> best;
    double top = std::max(per_label[0], per_label[1]);
    for (int j = 0; j < 2; ++j)
        if (per_label[j] == top)
            best.push_back(j);
    if (best.size() > 1) {
        double cap = std::max(capacity[best[0]], capacity[best[1]]);
        std::vector<int> narrowed;
        for (int j : best)
            if (capacity[j] == cap)
                narrowed.push_back(j);
        best = std::move(narrowed);
    }
    if (best.size() == 1)
        return best[0];
    return best[pick_uniform(rng, best.size())];
}

} // namespace

std::vector<int> iterative_stratify(const std::vector<SampleLabels> &samples,
                                    std::array<double, 2> ratios,
                                    uint64_t seed) {
    if (samples.empty())
        throw EmptyInput("cannot stratify an empty sample list");
    if (!(ratios[0] > 0.0) || !(ratios[1] > 0.0) ||
        std::abs(ratios[0] + ratios[1] - 1.0) > 1e-9)
        throw RatioOutOfRange("stratification ratios must be positive and sum to 1");

    size_t n = samples.size();
    std::mt19937_64 rng(seed);

    std::array<double, 2> capacity = {ratios[0] * static_cast<double>(n),
                                      ratios[1] * static_cast<double>(n)};

    // Remaining unassigned samples per label, and desired per-subset counts.
    std::map<std::string, std::vector<size_t>> label_members;
    for (size_t i = 0; i < n; ++i)
        for (const std::string &lab : samples[i].label_set)
            label_members[lab].push_back(i);

    std::map<std::string, std::array<double, 2>> label_desired;
    for (const auto &[lab, members] : label_members) {
        double m = static_cast<double>(members.size());
        label_desired[lab] = {ratios[0] * m, ratios[1] * m};
    }

    std::vector<int> assignment(n, -1);

    auto assign = [&](size_t i, int j) {
        assignment[i] = j;
        capacity[j] -= 1.0;
        for (const std::string &lab : samples[i].label_set)
            label_desired[lab][j] -= 1.0;
    };

    while (true) {
        // Rarest remaining label; lexicographic on ties (map order).
        const std::string *rarest = nullptr;
        size_t rarest_count = std::numeric_limits<size_t>::max();
        for (auto &[lab, members] : label_members) {
            members.erase(std::remove_if(members.begin(), members.end(),
                                         [&](size_t i) {
                                             return assignment[i] >= 0;
                                         }),
                          members.end());
            if (!members.empty() && members.size() < rarest_count) {
                rarest_count = members.size();
                rarest = &lab;
            }
        }
        if (!rarest)
            break;
        // Copy: assignment below mutates label_members via the lambda scope.
        std::vector<size_t> members = label_members[*rarest];
        for (size_t i : members)
            assign(i, choose_subset(label_desired[*rarest], capacity, rng));
    }

    for (size_t i = 0; i < n; ++i) {
        if (assignment[i] >= 0)
            continue;
        int j;
        if (capacity[0] > capacity[1])
            j = 0;
        else if (capacity[1] > capacity[0])
            j = 1;
        else
            j = static_cast<int>(pick_uniform(rng, 2));
        assign(i, j);
    }
    return assignment;
}

SplitAssignment temporal_split(const std::vector<SampleLabels> &samples,
                               std::array<double, 3> ratios, uint64_t seed) {
    if (samples.empty())
        throw EmptyInput("cannot split an empty sample list");
    for (double r : ratios)
        if (!(r > 0.0))
            throw RatioOutOfRange("split ratios must be positive");
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
        throw RatioOutOfRange("split ratios must sum to 1");

    std::map<std::string, std::vector<size_t>> groups;
    for (size_t i = 0; i < samples.size(); ++i)
        groups[samples[i].group_key].push_back(i);

    SplitAssignment result;
    result.subsets.assign(samples.size(), Subset::Train);

    for (const auto &[key, indices] : groups) {
        uint64_t group_seed = detail::splitmix64(seed ^ detail::fnv1a64(key));

        std::vector<SampleLabels> group;
        group.reserve(indices.size());
        for (size_t i : indices)
            group.push_back(samples[i]);

        double rest = ratios[1] + ratios[2];
        std::vector<int> first =
            iterative_stratify(group, {ratios[0], rest}, group_seed);

        std::vector<SampleLabels> holdout;
        std::vector<size_t> holdout_idx;
        for (size_t k = 0; k < group.size(); ++k) {
            if (first[k] == 0) {
                result.subsets[indices[k]] = Subset::Train;
            } else {
                holdout.push_back(group[k]);
                holdout_idx.push_back(indices[k]);
            }
        }
        if (holdout.empty())
            continue;
        std::vector<int> second = iterative_stratify(
            holdout, {ratios[1] / rest, ratios[2] / rest},
            detail::splitmix64(group_seed));
        for (size_t k = 0; k < holdout.size(); ++k)
            result.subsets[holdout_idx[k]] =
                second[k] == 0 ? Subset::Val : Subset::Test;
    }
    return result;
}

std::vector<ClassSplitRow> split_report(const SplitAssignment &assignment,
                                        const std::vector<SampleLabels> &samples) {
    if (assignment.subsets.size() != samples.size())
        throw DataError("assignment does not cover the sample list");

    std::map<std::string, std::array<long, 3>> counts;
    for (size_t i = 0; i < samples.size(); ++i)
        for (const std::string &lab : samples[i].label_set)
            counts[lab][static_cast<size_t>(assignment.subsets[i])] += 1;

    std::vector<ClassSplitRow> rows;
    rows.reserve(counts.size());
    for (const auto &[lab, c] : counts) {
        ClassSplitRow row;
        row.class_name = lab;
        row.total = c[0] + c[1] + c[2];
        double total = static_cast<double>(row.total);
        row.train_freq = static_cast<double>(c[0]) / total;
        row.val_freq = static_cast<double>(c[1]) / total;
        row.test_freq = static_cast<double>(c[2]) / total;
        rows.push_back(row);
    }
    return rows;
}

} // namespace reefscale
