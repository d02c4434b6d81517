#include "qthermo/smoothing.hpp"

#include "../support/test_support.hpp"
#include "qthermo/classical.hpp"

using namespace qthermo;
using namespace qthermo::testing;

namespace {

ThermoState phi2() { return ThermoState(special_state(SpecialKind::max_entangled, 2, 2), uniform_state(2)); }

std::vector<double> ones(int n) { return std::vector<double>(n, 1.0); }

}  // namespace

TEST(Smoothing, ZeroEpsRecoversUnsmoothed) {
    for (int k = 0; k < 5; ++k) {
        ThermoState ts = random_ts(2, 2, 10 + k);
        const Mat& rho = ts.rho().mat();
        EXPECT_NEAR(i_min_down_smoothed(ts, 0.0).value, i_min_down(ts).value, 1e-6);
        EXPECT_NEAR(i_max_up_smoothed(ts, 0.0).value, i_max_up(ts).value, 1e-6);
        EXPECT_NEAR(h_max_cond_smoothed(rho, 2, 2, 0.0).value, h_max_cond(rho, 2, 2).value, 1e-6);
        EXPECT_NEAR(h_min_cond_smoothed(rho, 2, 2, 0.0).value, h_min_cond(rho, 2, 2).value, 1e-6);
        EXPECT_NEAR(i_max_down_smoothed(ts, 0.0).value, i_max_down(ts).value, 1e-6);
    }
}

TEST(Smoothing, MaximallyEntangledValues) {
    ThermoState ts = phi2();
    EXPECT_NEAR(i_max_up_smoothed(ts, 0.0).value, 2.0, 1e-9);
    EXPECT_NEAR(i_min_down_smoothed(ts, 0.0).value, 2.0, 1e-6);
    // both quantities are bracketed by the unsmoothed values of the pure state
    SmoothedValue up = i_max_up_smoothed(ts, 0.1);
    EXPECT_LE(up.value, 2.0 + 1e-4);
    SmoothedValue down = i_min_down_smoothed(ts, 0.1);
    EXPECT_GE(down.value, 2.0 - 1e-6);
}

TEST(Smoothing, OrderingInEps) {
    for (int k = 0; k < 3; ++k) {
        ThermoState ts = random_ts(2, 2, 30 + k);
        double prev_up = 1e9, prev_down = -1e9, prev_mdown = 1e9;
        for (double eps : {0.0, 0.05, 0.1, 0.2}) {
            const double up = i_max_up_smoothed(ts, eps).value;
            const double down = i_min_down_smoothed(ts, eps).value;
            const double mdown = i_max_down_smoothed(ts, eps).value;
            EXPECT_LE(up, prev_up + 2e-4);
            EXPECT_GE(down, prev_down - 1e-6);
            EXPECT_LE(mdown, prev_mdown + 1e-6);
            prev_up = up;
            prev_down = down;
            prev_mdown = mdown;
        }
    }
}

TEST(Smoothing, MinDownWitness) {
    ThermoState ts = random_ts(2, 2, 50);
    const double eps = 0.1;
    SmoothedValue v = i_min_down_smoothed(ts, eps);
    const Mat& L = v.witness.lambda;
    EXPECT_GT(min_eigenvalue(L), -1e-6);
    EXPECT_LT(max_eigenvalue(L), 1 + 1e-6);
    EXPECT_GE(real_trace(L * ts.rho().mat()), 1 - eps - 1e-6);
    Mat g = kron(sqrt_psd(ts.gamma().mat()), Mat::Identity(2, 2));
    const double t = max_eigenvalue(trace_first(g * L * g, 2, 2));
    EXPECT_NEAR(-std::log2(t), v.value, 1e-5);
}

TEST(Smoothing, MaxUpWitness) {
    ThermoState ts = random_ts(2, 2, 51);
    const double eps = 0.1;
    SmoothedValue v = i_max_up_smoothed(ts, eps);
    const Mat& tau = v.witness.tau;
    const Mat& sigma = v.witness.sigma;
    const double t = std::exp2(v.value);
    EXPECT_LE(gen_trace_distance(ts.rho().mat(), tau), eps + 1e-6);
    EXPECT_GT(min_eigenvalue(tau), -1e-6);
    EXPECT_GT(min_eigenvalue(t * kron(ts.gamma().mat(), sigma) - tau), -1e-6);
    EXPECT_LE(v.bracket_hi - v.bracket_lo, 1e-4 + 1e-12);
}

TEST(Smoothing, MaxDownWitness) {
    ThermoState ts = random_ts(2, 2, 52);
    const double eps = 0.1;
    SmoothedValue v = i_max_down_smoothed(ts, eps);
    EXPECT_LE(v.witness.ball_distance, eps + 1e-6);
    EXPECT_GT(min_eigenvalue(kron(ts.gamma().mat(), v.witness.x) - v.witness.tau), -1e-6);
    EXPECT_NEAR(std::log2(v.witness.x.trace().real()), v.value, 1e-5);
    EXPECT_LE(v.value, i_max_up_smoothed(ts, eps).value + 2e-4);
}

TEST(Smoothing, DiagonalInstancesMatchLpOracles) {
    for (int k = 0; k < 4; ++k) {
        ThermoState ts = random_diag_ts(2, 2, 60 + k);
        DiagData d = diag_data(ts);
        const Mat& rho = ts.rho().mat();
        for (double eps : {0.05, 0.15}) {
            EXPECT_NEAR(i_min_down_smoothed(ts, eps).value, lp_hypothesis(d, d.g, eps), 1e-5);
            EXPECT_NEAR(h_max_cond_smoothed(rho, 2, 2, eps).value, -lp_hypothesis(d, ones(2), eps), 1e-5);
            EXPECT_NEAR(i_max_down_smoothed(ts, eps).value, lp_max_down(d, eps), 1e-5);
            EXPECT_NEAR(i_max_up_smoothed(ts, eps).value, lp_max_up(d, eps), 2e-4);
        }
    }
}

TEST(Smoothing, BallDistanceMatchesKeptMass) {
    ThermoState ts = random_diag_ts(2, 2, 70);
    DiagData d = diag_data(ts);
    for (double logt : {-0.5, 0.0, 0.3}) {
        const double t = std::exp2(logt);
        SmoothedWitness w = max_up_ball_distance(ts, t);
        EXPECT_NEAR(w.ball_distance, 1.0 - lp_max_up_kept(d, t), 1e-6);
    }
}

TEST(Smoothing, RejectsBadEps) {
    ThermoState ts = random_ts(2, 2, 80);
    EXPECT_THROW(i_max_up_smoothed(ts, -0.1), ValidationError);
    EXPECT_THROW(i_min_down_smoothed(ts, 1.5), ValidationError);
}

TEST(Classical, MatchesLpOracles) {
    for (int k = 0; k < 6; ++k) {
        ThermoState ts = random_diag_ts(2, 2, 90 + k);
        DiagData d = diag_data(ts);
        ClassicalInstance c = classical_instance(ts);
        for (double eps : {0.0, 0.05, 0.2}) {
            EXPECT_NEAR(classical_i_min_down_smoothed(c, eps), lp_hypothesis(d, d.g, eps), 1e-6);
            EXPECT_NEAR(classical_h_max_cond_smoothed(c, eps), -lp_hypothesis(d, ones(2), eps), 1e-6);
            EXPECT_NEAR(classical_i_max_down_smoothed(c, eps), lp_max_down(d, eps), 1e-6);
            EXPECT_NEAR(classical_i_max_up_smoothed(c, eps), lp_max_up(d, eps), 1e-6);
        }
        for (double t : {0.5, 1.0, 1.7})
            EXPECT_NEAR(classical_max_up_kept_mass(c, t), lp_max_up_kept(d, t), 1e-9);
    }
}

TEST(Classical, MatchesSdpOnDiagonalInputs) {
    ThermoState ts = random_diag_ts(2, 3, 100);
    const double eps = 0.1;
    EXPECT_NEAR(classical_oracle(SmoothedKind::i_min_down, ts, eps), i_min_down_smoothed(ts, eps).value, 1e-5);
    EXPECT_NEAR(classical_oracle(SmoothedKind::i_max_down, ts, eps), i_max_down_smoothed(ts, eps).value, 1e-5);
    EXPECT_NEAR(classical_oracle(SmoothedKind::i_max_up, ts, eps), i_max_up_smoothed(ts, eps).value, 2e-4);
    EXPECT_NEAR(classical_oracle(SmoothedKind::h_max_up, ts, eps),
                h_max_cond_smoothed(ts.rho().mat(), 2, 3, eps).value, 1e-5);
    EXPECT_NEAR(classical_oracle(SmoothedKind::h_min_down, ts, eps),
                h_min_cond_smoothed(ts.rho().mat(), 2, 3, eps).value, 2e-4);
}

TEST(Classical, DMinMatchesNeymanPearson) {
    std::vector<ClassicalEntry> pairs{{0.9, 0.5, 1.0}, {0.1, 0.5, 1.0}};
    EXPECT_NEAR(classical_d_min_smoothed(pairs, 0.1), 1.0, 1e-12);
    EXPECT_NEAR(classical_d_min_smoothed(pairs, 0.05), -std::log2(0.75), 1e-12);
}

TEST(Classical, PowerIsAdditiveWithoutSmoothing) {
    ThermoState ts = random_diag_ts(2, 2, 110);
    ClassicalInstance one = classical_instance(ts);
    for (int n : {2, 3, 5}) {
        ClassicalInstance c = classical_power(ts, n);
        EXPECT_NEAR(c.total_mass(), 1.0, 1e-12);
        EXPECT_NEAR(classical_i_max_up_smoothed(c, 0.0), n * classical_i_max_up_smoothed(one, 0.0), 1e-8);
        EXPECT_NEAR(classical_i_min_down_smoothed(c, 0.0), n * classical_i_min_down_smoothed(one, 0.0), 1e-8);
    }
}

TEST(Classical, RejectsQuantumInput) {
    EXPECT_THROW(classical_instance(ThermoState(special_state(SpecialKind::max_entangled, 2, 2), uniform_state(2))),
                 ValidationError);
}

TEST(Oracles, GreedyKeptMassMatchesVertexEnumeration) {
    for (int k = 0; k < 10; ++k) {
        DiagData d = diag_data(random_diag_ts(2, 2, 120 + k));
        for (double t : {0.3, 0.8, 1.0, 1.6, 3.0}) EXPECT_NEAR(greedy_max_up_kept(d, t), lp_max_up_kept(d, t), 1e-10);
    }
}

TEST(Oracles, NeymanPearsonMatchesHypothesisLp) {
    for (int k = 0; k < 10; ++k) {
        DiagData d = diag_data(random_diag_ts(3, 1, 130 + k));
        std::vector<double> p{d.p[0][0], d.p[1][0], d.p[2][0]};
        for (double eps : {0.0, 0.1, 0.3}) EXPECT_NEAR(neyman_pearson(p, d.g, eps), lp_hypothesis(d, d.g, eps), 1e-10);
    }
}
