#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace reefscale {

struct SampleLabels {
    std::string sample_id;
    std::string group_key;           // temporal bucket, e.g. year
    std::set<std::string> label_set; // may be empty
};

enum class Subset { Train = 0, Val = 1, Test = 2 };

const char *subset_name(Subset s);

struct SplitAssignment {
    std::vector<Subset> subsets; // aligned with the input sample list
};

/// Iterative multilabel stratification into two subsets. Repeatedly picks the
/// rarest remaining label (ties broken lexicographically) and assigns its
/// samples to the subset with the largest remaining desired count for that
/// label; ties fall back to larger overall remaining capacity, then to a
/// seeded uniform choice. Label-free samples are distributed last by capacity.
/// Returns 0/1 per sample, aligned with the input.
std::vector<int> iterative_stratify(const std::vector<SampleLabels> &samples,
                                    std::array<double, 2> ratios,
                                    uint64_t seed);

/// Per temporal group: stratify train vs val∪test, then val vs test, with
/// per-group seeds derived from (seed, group_key). Concatenates across groups.
SplitAssignment temporal_split(const std::vector<SampleLabels> &samples,
                               std::array<double, 3> ratios, uint64_t seed);

struct ClassSplitRow {
    std::string class_name;
    double train_freq = 0.0;
    double val_freq = 0.0;
    double test_freq = 0.0;
    long total = 0;
};

/// Per-class counts and subset frequencies (frequencies sum to 1 per class).
std::vector<ClassSplitRow> split_report(const SplitAssignment &assignment,
                                        const std::vector<SampleLabels> &samples);

namespace detail {
uint64_t fnv1a64(const std::string &s);
uint64_t splitmix64(uint64_t x);
/// Deterministic uniform double in [0,1) from raw 64-bit engine output.
double unit_double(uint64_t bits);
} // namespace detail

} // namespace reefscale
