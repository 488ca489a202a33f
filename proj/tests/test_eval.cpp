#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "reefscale/eval.hpp"
#include "reefscale/errors.hpp"

using namespace reefscale;

namespace {

PairedScores make_pairs(const std::vector<double> &ref,
                        const std::vector<double> &pred,
                        const std::vector<std::string> &classes = {}) {
    PairedScores p;
    auto n = static_cast<Eigen::Index>(ref.size());
    p.reference.resize(n);
    p.predicted.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p.reference[i] = ref[static_cast<size_t>(i)];
        p.predicted[i] = pred[static_cast<size_t>(i)];
        std::string cls = classes.empty()
                              ? "c0"
                              : classes[static_cast<size_t>(i)];
        p.keys.push_back({"t" + std::to_string(i), cls});
    }
    return p;
}

} // namespace

TEST_CASE("identical predictions zero out the error metrics") {
    PairedScores p = make_pairs({0.1, 0.9, 0.5, 0.0, 1.0},
                                {0.1, 0.9, 0.5, 0.0, 1.0});
    CHECK(rmse(p) <= 1e-12);
    CHECK(mae(p) <= 1e-12);
    CHECK(binary_kl(p) <= 1e-12);
}

TEST_CASE("rmse and mae worked values") {
    PairedScores p = make_pairs({0.0, 1.0}, {0.5, 0.5});
    CHECK(rmse(p) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mae(p) == doctest::Approx(0.5).epsilon(1e-12));

    // mae <= rmse always (Jensen)
    PairedScores q = make_pairs({0.0, 1.0, 0.3}, {0.2, 0.4, 0.9});
    CHECK(mae(q) <= rmse(q) + 1e-15);
}

TEST_CASE("binary KL worked values and clamping") {
    // p=1, q=0.5: KL = 1*ln(1/0.5) = ln 2 up to the epsilon clamp
    PairedScores p = make_pairs({1.0}, {0.5});
    CHECK(binary_kl(p) == doctest::Approx(std::log(2.0)).epsilon(1e-5));

    // q=0 survives thanks to clamping
    PairedScores q = make_pairs({1.0}, {0.0});
    double kl = binary_kl(q);
    CHECK(std::isfinite(kl));
    CHECK(kl == doctest::Approx(-std::log(1e-7)).epsilon(1e-4));

    CHECK(binary_kl(make_pairs({0.3}, {0.3})) <= 1e-12);
    CHECK_THROWS_AS(binary_kl(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(binary_kl(p, 0.5), std::invalid_argument);
}

TEST_CASE("AUC endpoints") {
    // perfect ranking
    PairedScores perfect =
        make_pairs({1.0, 1.0, 0.0, 0.0}, {0.9, 0.8, 0.2, 0.1});
    CHECK(roc_auc(perfect) == doctest::Approx(1.0).epsilon(1e-12));

    // inverted ranking
    PairedScores inverted =
        make_pairs({1.0, 1.0, 0.0, 0.0}, {0.1, 0.2, 0.8, 0.9});
    CHECK(roc_auc(inverted) == doctest::Approx(0.0).epsilon(1e-12));

    // all scores tied -> 0.5 via midranks
    PairedScores tied = make_pairs({1.0, 0.0, 1.0, 0.0}, {0.7, 0.7, 0.7, 0.7});
    CHECK(roc_auc(tied) == doctest::Approx(0.5).epsilon(1e-12));

    // single-class references are degenerate
    PairedScores onesided = make_pairs({1.0, 1.0}, {0.4, 0.6});
    CHECK_THROWS_AS(roc_auc(onesided), DegenerateLabels);
}

TEST_CASE("AUC is invariant under monotone transforms of the scores") {
    PairedScores base =
        make_pairs({1.0, 0.0, 1.0, 0.0, 1.0, 0.0},
                   {0.9, 0.3, 0.6, 0.5, 0.4, 0.2});
    double a = roc_auc(base);
    PairedScores squashed = base;
    for (Eigen::Index i = 0; i < squashed.predicted.size(); ++i)
        squashed.predicted[i] =
            squashed.predicted[i] * squashed.predicted[i]; // monotone on [0,1]
    CHECK(roc_auc(squashed) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("complement symmetry without ties: auc(s) + auc(1-s) = 1") {
    PairedScores base =
        make_pairs({1.0, 0.0, 1.0, 0.0, 1.0}, {0.9, 0.3, 0.6, 0.5, 0.1});
    PairedScores flipped = base;
    for (Eigen::Index i = 0; i < flipped.predicted.size(); ++i)
        flipped.predicted[i] = 1.0 - flipped.predicted[i];
    CHECK(roc_auc(base) + roc_auc(flipped) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("macro AUC averages per class and skips degenerate ones") {
    // c0 perfectly ranked, c1 inverted -> macro 0.5; the pooled micro view
    // scores 3 of 4 cross-pairs correctly (positives 0.9,0.2 vs 0.1,0.8)
    PairedScores p = make_pairs({1.0, 0.0, 1.0, 0.0}, {0.9, 0.1, 0.2, 0.8},
                                {"c0", "c0", "c1", "c1"});
    CHECK(roc_auc(p, 0.5, AucAveraging::Macro) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(roc_auc(p, 0.5, AucAveraging::Micro) ==
          doctest::Approx(0.75).epsilon(1e-12));

    // c1 all-positive: macro falls back to the classes with both outcomes
    PairedScores q = make_pairs({1.0, 0.0, 1.0, 1.0}, {0.9, 0.1, 0.2, 0.8},
                                {"c0", "c0", "c1", "c1"});
    CHECK(roc_auc(q, 0.5, AucAveraging::Macro) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // nothing usable at all
    PairedScores r = make_pairs({1.0, 1.0}, {0.9, 0.1}, {"c0", "c1"});
    CHECK_THROWS_AS(roc_auc(r, 0.5, AucAveraging::Macro), DegenerateLabels);
}

TEST_CASE("micro AUC pools ties across classes with midranks") {
    // duplicated scores across the pool must midrank, not double-count
    PairedScores p = make_pairs({1.0, 0.0, 1.0, 0.0}, {0.6, 0.6, 0.6, 0.2},
                                {"c0", "c0", "c1", "c1"});
    // positives {0.6, 0.6}, negatives {0.6, 0.2}
    // ranks: 0.2 -> 1; the three 0.6s share midrank 3
    // AUC = (3+3 - 2*3/2) / (2*2) = 3/4
    CHECK(roc_auc(p) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("bce_soft_loss worked values") {
    Eigen::VectorXd t(1), z(1);
    t << 0.5;
    z << 0.0;
    CHECK(std::abs(bce_soft_loss(t, z) - std::log(2.0)) < 1e-12);

    // large positive logit with target 1 -> ~0 loss
    t << 1.0;
    z << 40.0;
    CHECK(bce_soft_loss(t, z) < 1e-12);
    // same logit with target 0 -> ~z
    t << 0.0;
    CHECK(bce_soft_loss(t, z) == doctest::Approx(40.0).epsilon(1e-12));

    // matches the naive formula where it is stable
    Eigen::VectorXd ts(3), zs(3);
    ts << 0.2, 0.7, 0.5;
    zs << 0.3, -1.2, 2.0;
    double naive = 0.0;
    for (int i = 0; i < 3; ++i) {
        double s = 1.0 / (1.0 + std::exp(-zs[i]));
        naive += -(ts[i] * std::log(s) + (1.0 - ts[i]) * std::log(1.0 - s));
    }
    naive /= 3.0;
    CHECK(bce_soft_loss(ts, zs) == doctest::Approx(naive).epsilon(1e-12));
}

TEST_CASE("bce gradient matches central finite differences") {
    Eigen::VectorXd t(5), z(5);
    t << 0.0, 1.0, 0.5, 0.25, 0.9;
    z << -2.0, 3.0, 0.0, 0.7, -0.3;
    Eigen::VectorXd g = bce_soft_loss_gradient(t, z);
    double h = 1e-6;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        Eigen::VectorXd zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        double fd = (bce_soft_loss(t, zp) - bce_soft_loss(t, zm)) / (2.0 * h);
        CHECK(std::abs(g[i] - fd) < 1e-6);
    }
}

TEST_CASE("paired score validation") {
    PairedScores p = make_pairs({0.5}, {0.5});
    CHECK_NOTHROW(p.validate());

    PairedScores bad_range = make_pairs({0.5}, {1.5});
    CHECK_THROWS_AS(bad_range.validate(), ProbabilityOutOfRange);

    PairedScores dup = make_pairs({0.5, 0.6}, {0.5, 0.6});
    dup.keys[1] = dup.keys[0];
    CHECK_THROWS_AS(dup.validate(), DataError);

    PairedScores misaligned = make_pairs({0.5, 0.6}, {0.5, 0.6});
    misaligned.predicted.resize(1);
    CHECK_THROWS_AS(misaligned.validate(), DataError);

    PairedScores empty;
    CHECK_THROWS_AS(rmse(empty), EmptyInput);
    CHECK_THROWS_AS(roc_auc(empty), EmptyInput);
    CHECK_THROWS_AS(bce_soft_loss(Eigen::VectorXd(), Eigen::VectorXd()),
                    EmptyInput);
}
