#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "reefscale/split.hpp"
#include "reefscale/errors.hpp"

using namespace reefscale;

namespace {

SampleLabels sample(const std::string &id, const std::string &group,
                    std::set<std::string> labels) {
    return SampleLabels{id, group, std::move(labels)};
}

// Worst per-label deviation of subset counts from the desired r_j * m_lab.
double split_deviation(const std::vector<SampleLabels> &samples,
                       const std::vector<int> &assignment,
                       std::array<double, 2> ratios) {
    std::map<std::string, std::array<long, 2>> counts;
    std::map<std::string, long> totals;
    for (size_t i = 0; i < samples.size(); ++i)
        for (const std::string &lab : samples[i].label_set) {
            counts[lab][static_cast<size_t>(assignment[i])] += 1;
            totals[lab] += 1;
        }
    double worst = 0.0;
    for (const auto &[lab, c] : counts) {
        double m = static_cast<double>(totals[lab]);
        for (int j = 0; j < 2; ++j)
            worst = std::max(worst, std::abs(static_cast<double>(c[j]) -
                                             ratios[j] * m));
    }
    return worst;
}

// Exhaustive optimum over all 2^n two-way splits.
double best_possible_deviation(const std::vector<SampleLabels> &samples,
                               std::array<double, 2> ratios) {
    size_t n = samples.size();
    REQUIRE(n <= 14);
    double best = 1e18;
    std::vector<int> assign(n);
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (size_t i = 0; i < n; ++i)
            assign[i] = (mask >> i) & 1u;
        best = std::min(best, split_deviation(samples, assign, ratios));
    }
    return best;
}

} // namespace

TEST_CASE("identical single-label samples split by capacity") {
    std::vector<SampleLabels> samples;
    for (int i = 0; i < 10; ++i)
        samples.push_back(sample("s" + std::to_string(i), "g", {"only"}));
    std::vector<int> a = iterative_stratify(samples, {0.6, 0.4}, 1);
    long zero = 0;
    for (int j : a)
        zero += j == 0 ? 1 : 0;
    CHECK(zero == 6);
    CHECK(a.size() == 10);
}

TEST_CASE("same seed gives an identical assignment") {
    std::vector<SampleLabels> samples;
    for (int i = 0; i < 50; ++i) {
        std::set<std::string> labs;
        if (i % 2 == 0)
            labs.insert("even");
        if (i % 3 == 0)
            labs.insert("third");
        if (i % 7 == 0)
            labs.insert("seventh");
        samples.push_back(sample("s" + std::to_string(i), "g", labs));
    }
    CHECK(iterative_stratify(samples, {0.7, 0.3}, 99) ==
          iterative_stratify(samples, {0.7, 0.3}, 99));

    SplitAssignment t1 = temporal_split(samples, {0.6, 0.2, 0.2}, 7);
    SplitAssignment t2 = temporal_split(samples, {0.6, 0.2, 0.2}, 7);
    CHECK(t1.subsets == t2.subsets);
}

TEST_CASE("small instances reach the exhaustive optimum within 1") {
    struct Case {
        std::vector<SampleLabels> samples;
        std::array<double, 2> ratios;
    };
    std::vector<Case> cases;

    { // every sample carries a unique label
        std::vector<SampleLabels> s;
        for (int i = 0; i < 11; ++i)
            s.push_back(sample("u" + std::to_string(i), "g",
                               {"lab" + std::to_string(i)}));
        cases.push_back({s, {0.6, 0.4}});
    }
    { // overlapping labels
        std::vector<SampleLabels> s;
        s.push_back(sample("a", "g", {"x"}));
        s.push_back(sample("b", "g", {"x", "y"}));
        s.push_back(sample("c", "g", {"y"}));
        s.push_back(sample("d", "g", {"x", "z"}));
        s.push_back(sample("e", "g", {"z"}));
        s.push_back(sample("f", "g", {"y", "z"}));
        s.push_back(sample("h", "g", {"x"}));
        s.push_back(sample("i", "g", {"y"}));
        cases.push_back({s, {0.5, 0.5}});
    }
    { // some label-free samples in the mix
        std::vector<SampleLabels> s;
        for (int i = 0; i < 12; ++i) {
            std::set<std::string> labs;
            if (i % 3 != 2)
                labs.insert(i % 2 == 0 ? "p" : "q");
            s.push_back(sample("m" + std::to_string(i), "g", labs));
        }
        cases.push_back({s, {0.75, 0.25}});
    }

    for (const Case &c : cases) {
        std::vector<int> got = iterative_stratify(c.samples, c.ratios, 5);
        double achieved = split_deviation(c.samples, got, c.ratios);
        double best = best_possible_deviation(c.samples, c.ratios);
        CHECK(achieved <= best + 1.0 + 1e-12);
    }
}

TEST_CASE("unique labels land within 1 of their desired counts") {
    std::vector<SampleLabels> samples;
    for (int i = 0; i < 12; ++i)
        samples.push_back(sample("u" + std::to_string(i), "g",
                                 {"lab" + std::to_string(i)}));
    std::vector<int> a = iterative_stratify(samples, {0.6, 0.4}, 3);
    for (size_t i = 0; i < samples.size(); ++i) {
        // each label has one member; its subset count is 0 or 1, desired 0.6/0.4
        double dev0 = std::abs((a[i] == 0 ? 1.0 : 0.0) - 0.6);
        CHECK(dev0 <= 1.0);
    }
}

TEST_CASE("temporal split partitions every sample and respects groups") {
    std::vector<SampleLabels> samples;
    for (int g = 0; g < 3; ++g)
        for (int i = 0; i < 40; ++i) {
            std::set<std::string> labs;
            labs.insert("c" + std::to_string(i % 4));
            samples.push_back(sample("g" + std::to_string(g) + "_s" +
                                         std::to_string(i),
                                     "year" + std::to_string(2021 + g), labs));
        }
    SplitAssignment sp = temporal_split(samples, {0.6, 0.2, 0.2}, 11);
    REQUIRE(sp.subsets.size() == samples.size());

    // per-group subset sizes stay near the targets
    std::map<std::string, std::array<long, 3>> group_counts;
    for (size_t i = 0; i < samples.size(); ++i)
        group_counts[samples[i].group_key]
                    [static_cast<size_t>(sp.subsets[i])] += 1;
    for (const auto &[key, c] : group_counts) {
        long total = c[0] + c[1] + c[2];
        CHECK(total == 40);
        CHECK(std::abs(c[0] - 24) <= 5); // slack ≤ label count
        CHECK(std::abs(c[1] - 8) <= 5);
        CHECK(std::abs(c[2] - 8) <= 5);
    }
}

TEST_CASE("statistical fidelity on a 2000-sample set") {
    // deterministic congruential label painter, 12 classes, 3 groups
    uint64_t s = 12345;
    auto next = [&s]() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return s >> 33;
    };
    std::vector<SampleLabels> samples;
    for (int i = 0; i < 2000; ++i) {
        std::set<std::string> labs;
        for (int c = 0; c < 12; ++c)
            if (next() % 100 < 25)
                labs.insert("class" + std::to_string(c));
        samples.push_back(sample("s" + std::to_string(i),
                                 "y" + std::to_string(i % 3), labs));
    }
    SplitAssignment sp = temporal_split(samples, {0.6, 0.2, 0.2}, 4242);
    std::vector<ClassSplitRow> rows = split_report(sp, samples);
    REQUIRE(rows.size() == 12);
    for (const ClassSplitRow &row : rows) {
        CHECK(std::abs(row.train_freq - 0.6) <= 0.05);
        CHECK(std::abs(row.val_freq - 0.2) <= 0.05);
        CHECK(std::abs(row.test_freq - 0.2) <= 0.05);
        CHECK(row.train_freq + row.val_freq + row.test_freq ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(row.total > 0);
    }
}

TEST_CASE("split_report basics") {
    std::vector<SampleLabels> samples = {
        sample("a", "g", {"x"}),
        sample("b", "g", {"x", "y"}),
        sample("c", "g", {}),
    };
    SplitAssignment all_train;
    all_train.subsets = {Subset::Train, Subset::Train, Subset::Train};
    std::vector<ClassSplitRow> rows = split_report(all_train, samples);
    REQUIRE(rows.size() == 2); // label-free sample adds no class row
    for (const ClassSplitRow &row : rows) {
        CHECK(row.train_freq == 1.0);
        CHECK(row.val_freq == 0.0);
        CHECK(row.test_freq == 0.0);
    }
    CHECK(rows[0].class_name == "x");
    CHECK(rows[0].total == 2);
    CHECK(rows[1].class_name == "y");
    CHECK(rows[1].total == 1);

    SplitAssignment wrong;
    wrong.subsets = {Subset::Train};
    CHECK_THROWS_AS(split_report(wrong, samples), DataError);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(iterative_stratify({}, {0.5, 0.5}, 1), EmptyInput);
    std::vector<SampleLabels> one = {sample("a", "g", {"x"})};
    CHECK_THROWS_AS(iterative_stratify(one, {0.5, 0.6}, 1), RatioOutOfRange);
    CHECK_THROWS_AS(iterative_stratify(one, {0.0, 1.0}, 1), RatioOutOfRange);
    CHECK_THROWS_AS(temporal_split({}, {0.6, 0.2, 0.2}, 1), EmptyInput);
    CHECK_THROWS_AS(temporal_split(one, {0.6, 0.3, 0.2}, 1), RatioOutOfRange);
    CHECK_THROWS_AS(temporal_split(one, {0.8, 0.2, 0.0}, 1), RatioOutOfRange);
}

TEST_CASE("subset names") {
    CHECK(std::string(subset_name(Subset::Train)) == "train");
    CHECK(std::string(subset_name(Subset::Val)) == "val");
    CHECK(std::string(subset_name(Subset::Test)) == "test");
}
