#include "qthermo/divergences.hpp"

#include "../support/test_support.hpp"
#include "qthermo/channels.hpp"
#include "qthermo/smoothing.hpp"

using namespace qthermo;
using namespace qthermo::testing;

namespace {
const Mat kPi = diag({0.5, 0.5});
const Mat kZero = diag({1, 0});
const Mat kBiased = diag({0.9, 0.1});
}  // namespace

TEST(DMax, Examples) {
    EXPECT_NEAR(d_max(kZero, kPi).value, 1.0, 1e-12);
    EXPECT_NEAR(d_max(kBiased, kBiased).value, 0.0, 1e-12);
    EXPECT_NEAR(d_max(kBiased, kPi).value, std::log2(1.8), 1e-12);
    DivergenceValue v = d_max(kPi, kZero);
    EXPECT_TRUE(v.infinite);
    EXPECT_TRUE(v.support_violation);
}

TEST(DMin, Examples) {
    EXPECT_NEAR(d_min(kBiased, kBiased).value, 0.0, 1e-12);
    EXPECT_NEAR(d_min(kZero, kPi).value, 1.0, 1e-12);
    EXPECT_NEAR(d_min(kBiased, kPi).value, 0.0, 1e-12);
    EXPECT_TRUE(d_min(kZero, diag({0, 1})).infinite);
}

TEST(Umegaki, Examples) {
    EXPECT_NEAR(d_umegaki(kBiased, kBiased).value, 0.0, 1e-12);
    EXPECT_NEAR(d_umegaki(kZero, kPi).value, 1.0, 1e-12);
    EXPECT_NEAR(d_umegaki(kBiased, kPi).value, 1.0 - binary_entropy(0.9), 1e-12);
    EXPECT_NEAR(d_umegaki(kBiased, kPi).value, 0.5310044064107188, 1e-12);
    EXPECT_TRUE(d_umegaki(kPi, kZero).infinite);
}

TEST(Sandwiched, Examples) {
    EXPECT_NEAR(d_sandwiched(kBiased, kBiased, 2.0).value, 0.0, 1e-12);
    EXPECT_NEAR(d_sandwiched(kBiased, kPi, 2.0).value, std::log2(1.64), 1e-12);
    EXPECT_NEAR(d_sandwiched(kBiased, kPi, 1e4).value, d_max(kBiased, kPi).value, 1e-3);
    EXPECT_THROW(d_sandwiched(kBiased, kPi, 0.3), ValidationError);
}

TEST(Petz, Examples) {
    EXPECT_NEAR(d_petz(kBiased, kBiased, 0.5).value, 0.0, 1e-12);
    Rng rng(1);
    for (int k = 0; k < 5; ++k) {
        Mat r = random_state({3}, 2, rng).mat(), s = random_state({3}, 3, rng).mat();
        EXPECT_NEAR(d_petz(r, s, 0.0).value, d_min(r, s).value, 1e-9);
    }
    EXPECT_THROW(d_petz(kBiased, kPi, 2.5), ValidationError);
}

TEST(Petz, MonotoneInAlphaOnCommutingPair) {
    Rng rng(2);
    Mat r = random_diagonal_state({3}, rng).mat(), s = random_diagonal_state({3}, rng).mat();
    double prev = -1e9;
    for (int k = 1; k <= 9; ++k) {
        double v = d_petz(r, s, 0.1 * k).value;
        EXPECT_GE(v, prev - 1e-12);
        prev = v;
    }
}

TEST(Renyi, NearOneDelegatesToUmegaki) {
    Rng rng(3);
    Mat r = random_state({2}, 2, rng).mat(), s = random_state({2}, 2, rng).mat();
    EXPECT_NEAR(d_sandwiched(r, s, 1.0 + 5e-5).value, d_umegaki(r, s).value, 1e-12);
    EXPECT_NEAR(d_petz(r, s, 1.0 - 5e-5).value, d_umegaki(r, s).value, 1e-12);
}

TEST(Divergences, OrderingOnRandomPairs) {
    Rng rng(4);
    for (int k = 0; k < 50; ++k) {
        Mat r = random_state({3}, 1 + k % 3, rng).mat(), s = random_state({3}, 3, rng).mat();
        const double mn = d_min(r, s).value, um = d_umegaki(r, s).value, mx = d_max(r, s).value;
        EXPECT_LE(mn, um + 1e-7);
        EXPECT_LE(um, mx + 1e-7);
    }
}

TEST(Divergences, Additivity) {
    Rng rng(5);
    for (int k = 0; k < 10; ++k) {
        Mat r = random_state({2}, 2, rng).mat(), s = random_state({2}, 2, rng).mat();
        Mat w = random_state({2}, 2, rng).mat(), t = random_state({2}, 2, rng).mat();
        Mat rw = kron(r, w), st = kron(s, t);
        EXPECT_NEAR(d_max(rw, st).value, d_max(r, s).value + d_max(w, t).value, 1e-7);
        EXPECT_NEAR(d_min(rw, st).value, d_min(r, s).value + d_min(w, t).value, 1e-7);
        EXPECT_NEAR(d_umegaki(rw, st).value, d_umegaki(r, s).value + d_umegaki(w, t).value, 1e-7);
        EXPECT_NEAR(d_sandwiched(rw, st, 2.0).value, d_sandwiched(r, s, 2.0).value + d_sandwiched(w, t, 2.0).value, 1e-7);
        EXPECT_NEAR(d_petz(rw, st, 0.5).value, d_petz(r, s, 0.5).value + d_petz(w, t, 0.5).value, 1e-7);
    }
}

TEST(Divergences, DataProcessing) {
    Rng rng(6);
    for (int k = 0; k < 20; ++k) {
        ChoiOperator ch = random_channel({3}, {2}, rng, 2);
        Mat r = random_state({3}, 1 + k % 3, rng).mat(), s = random_state({3}, 3, rng).mat();
        Mat nr = apply_choi(ch, r), ns = apply_choi(ch, s);
        EXPECT_LE(d_max(nr, ns).value, d_max(r, s).value + 1e-7);
        EXPECT_LE(d_min(nr, ns).value, d_min(r, s).value + 1e-7);
        EXPECT_LE(d_umegaki(nr, ns).value, d_umegaki(r, s).value + 1e-7);
        EXPECT_LE(d_sandwiched(nr, ns, 1.5).value, d_sandwiched(r, s, 1.5).value + 1e-7);
        EXPECT_LE(d_petz(nr, ns, 0.5).value, d_petz(r, s, 0.5).value + 1e-7);
    }
}

TEST(DMinSmoothed, Examples) {
    SmoothedValue v = d_min_smoothed(kZero, kPi, 0.0);
    EXPECT_NEAR(v.value, 1.0, 1e-6);
    EXPECT_TRUE(d_min_smoothed(kZero, kPi, 1.0).infinite);
    // Neyman-Pearson by hand: keep all of outcome 0 (mass 0.9) and nothing else, Tr[L pi] = 0.5
    EXPECT_NEAR(d_min_smoothed(kBiased, kPi, 0.1).value, 1.0, 1e-6);
    // eps = 0.05: outcome 0 plus half of outcome 1, Tr[L pi] = 0.5 + 0.25
    EXPECT_NEAR(d_min_smoothed(kBiased, kPi, 0.05).value, -std::log2(0.75), 1e-6);
}

TEST(DMinSmoothed, NondecreasingInEps) {
    Rng rng(7);
    Mat r = random_state({3}, 2, rng).mat(), s = random_state({3}, 3, rng).mat();
    double prev = -1e9;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4}) {
        double v = d_min_smoothed(r, s, eps).value;
        // larger eps relaxes the constraint of a supremum
        EXPECT_GE(v, prev - 1e-6);
        prev = v;
    }
    EXPECT_NEAR(d_min_smoothed(r, s, 0.0).value, d_min(r, s).value, 1e-6);
}
