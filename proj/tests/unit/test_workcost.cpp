#include "qthermo/workcost.hpp"

#include "../support/test_support.hpp"

using namespace qthermo;
using namespace qthermo::testing;

namespace {

ThermoState with_uniform(const Mat& rho, int dA) { return ThermoState(rho, uniform_state(dA).mat()); }
ThermoState phi2() { return with_uniform(special_state(SpecialKind::max_entangled, 2, 2).mat(), 2); }
ThermoState phibar2() { return with_uniform(special_state(SpecialKind::max_classical, 2, 2).mat(), 2); }

ThermoState uniform_product(std::uint64_t seed) {
    Rng rng(seed);
    return with_uniform(kron(diag({0.5, 0.5}), random_state({2}, 2, rng).mat()), 2);
}

}  // namespace

TEST(OneShot, Examples) {
    EXPECT_NEAR(w_prep_oneshot(uniform_product(1), 0.0, 1.0).work_bits, -1.0, 1e-9);
    EXPECT_NEAR(w_prep_oneshot(phi2(), 0.0, 1.0).work_bits, 1.0, 1e-9);
    EXPECT_NEAR(w_eras_oneshot(uniform_product(1), 0.0, 1.0).work_bits, 1.0, 1e-9);
    EXPECT_NEAR(w_eras_oneshot(phi2(), 0.0, 1.0).work_bits, -1.0, 1e-9);
    // beta_b only rescales
    EXPECT_NEAR(w_prep_oneshot(phi2(), 0.0, 2.0).work_bits, 0.5, 1e-9);
    EXPECT_THROW(w_prep_oneshot(phi2(), 0.0, 0.0), ValidationError);
}

TEST(OneShot, ConditionallyGibbsCostsNothingExtra) {
    Rng rng(2);
    for (int k = 0; k < 5; ++k) {
        DensityOperator g = random_gibbs(2, rng);
        ThermoState ts(kron(g.mat(), random_state({2}, 2, rng).mat()), g.mat());
        EXPECT_NEAR(w_prep_oneshot(ts, 0.0, 1.0).work_bits, -1.0, 1e-9);
        EXPECT_NEAR(w_eras_oneshot(ts, 0.0, 1.0).work_bits, 1.0, 1e-9);
    }
}

TEST(OneShot, UniformAgreesWithGeneral) {
    Rng rng(3);
    for (int k = 0; k < 30; ++k) {
        Mat rho = random_state({2, 2}, 1 + k % 4, rng).mat();
        ThermoState ts = with_uniform(rho, 2);
        EXPECT_NEAR(w_oneshot_uniform(rho, 2, 2, WorkDirection::prep, 0.0, 1.0).work_bits,
                    w_prep_oneshot(ts, 0.0, 1.0).work_bits, 1e-6);
        EXPECT_NEAR(w_oneshot_uniform(rho, 2, 2, WorkDirection::eras, 0.0, 1.0).work_bits,
                    w_eras_oneshot(ts, 0.0, 1.0).work_bits, 1e-6);
    }
    for (int k = 0; k < 3; ++k) {
        Mat rho = random_state({2, 2}, 2 + k, rng).mat();
        ThermoState ts = with_uniform(rho, 2);
        EXPECT_NEAR(w_oneshot_uniform(rho, 2, 2, WorkDirection::prep, 0.1, 1.0).work_bits,
                    w_prep_oneshot(ts, 0.1, 1.0).work_bits, 1e-6);
        EXPECT_NEAR(w_oneshot_uniform(rho, 2, 2, WorkDirection::eras, 0.1, 1.0).work_bits,
                    w_eras_oneshot(ts, 0.1, 1.0).work_bits, 1e-6);
    }
}

TEST(OneShot, ProtocolMatchesFormula) {
    ThermoState ts = random_ts(2, 2, 4);
    WorkReport p = w_protocol(ts, WorkDirection::prep, 0.1, 1.0);
    EXPECT_EQ(p.diagnostics.at("pass"), 1.0);
    EXPECT_NEAR(p.work_bits, w_prep_oneshot(ts, 0.1, 1.0).work_bits, 2e-4);
    WorkReport e = w_protocol(ts, WorkDirection::eras, 0.1, 1.0);
    EXPECT_EQ(e.diagnostics.at("pass"), 1.0);
    EXPECT_NEAR(e.work_bits, w_eras_oneshot(ts, 0.1, 1.0).work_bits, 1e-6);
}

TEST(OneShot, DirectionParsing) {
    EXPECT_EQ(parse_work_direction("prep"), WorkDirection::prep);
    EXPECT_EQ(parse_work_direction("eras"), WorkDirection::eras);
    EXPECT_THROW(parse_work_direction("both"), ValidationError);
}

TEST(Conversion, IdentityCostsNothing) {
    ThermoState ts = random_ts(2, 2, 5);
    WorkReport r = w_convert_oneshot(ts, ts, 0.1, 1.0);
    EXPECT_NEAR(r.work_bits, 0.0, 1e-12);
}

TEST(Conversion, ErasureThenPreparation) {
    ThermoState from = random_ts(2, 2, 6);
    ThermoState to(random_ts(2, 2, 7).rho().mat(), from.gamma().mat());
    const double eps = 0.2;
    Protocol p = conversion_protocol(from, to, eps);
    ASSERT_EQ(p.stages.size(), 2u);
    VerificationReport v = verify_protocol(p, from, to.rho(), eps);
    EXPECT_TRUE(v.pass) << v.achieved_error;
    const double expect = w_eras_oneshot(from, eps / 2, 1.0).work_bits + w_prep_oneshot(to, eps / 2, 1.0).work_bits;
    EXPECT_NEAR(p.ideal_work_bits(), expect, 2e-4);
}

TEST(Asymptotic, Examples) {
    EXPECT_NEAR(w_asymptotic(phibar2(), phi2(), 1.0).work_bits, 1.0, 1e-9);
    EXPECT_NEAR(rate_asymptotic(phi2(), phibar2()), 2.0, 1e-9);
    EXPECT_TRUE(std::isinf(rate_asymptotic(phi2(), uniform_product(8))));
    ThermoState ts = random_ts(2, 2, 8);
    ThermoState cg(kron(ts.gamma().mat(), ts.rho_B()), ts.gamma().mat());
    EXPECT_NEAR(w_asymptotic(cg, cg, 1.0).work_bits, 0.0, 1e-12);
    EXPECT_NEAR(w_asymptotic(cg, ts, 1.0).work_bits, i_umegaki(ts).value, 1e-9);
}

TEST(Asymptotic, AntisymmetryAndReciprocity) {
    for (int k = 0; k < 10; ++k) {
        ThermoState a = random_ts(2, 2, 20 + k), b = random_ts(2, 3, 40 + k);
        EXPECT_NEAR(w_asymptotic(a, b, 1.3).work_bits, -w_asymptotic(b, a, 1.3).work_bits, 1e-12);
        EXPECT_NEAR(rate_asymptotic(a, b) * rate_asymptotic(b, a), 1.0, 1e-9);
    }
}

TEST(Asymptotic, HelmholtzForm) {
    for (int k = 0; k < 10; ++k) {
        Rng rng(60 + k);
        Hamiltonian h1 = random_hamiltonian(2, rng), h2 = random_hamiltonian(3, rng);
        const double beta = 0.7;
        ThermoState a = random_thermo_state({2, 2}, h1, beta, 70 + k);
        ThermoState b = random_thermo_state({3, 2}, h2, beta, 80 + k);
        EXPECT_NEAR(w_asymptotic_helmholtz(a, h1, b, h2, beta), w_asymptotic(a, b, beta).work_bits,
                    1e-8);
    }
}

TEST(Power, RegroupsCopies) {
    ThermoState ts = random_ts(2, 3, 9);
    ThermoState t2 = thermo_power(ts, 2);
    EXPECT_EQ(t2.dA(), 4);
    EXPECT_EQ(t2.dB(), 9);
    EXPECT_LT(max_abs(t2.rho_B() - kron(ts.rho_B(), ts.rho_B())), 1e-12);
    EXPECT_LT(max_abs(t2.rho_A() - kron(ts.rho_A(), ts.rho_A())), 1e-12);
    EXPECT_NEAR(i_umegaki(t2).value, 2 * i_umegaki(ts).value, 1e-9);
}

TEST(Aep, SingleCopyWithoutSmoothing) {
    ThermoState ts = random_ts(2, 2, 10);
    std::vector<AepPoint> pts = aep_experiment(ts, 0.0, 0.0, 1);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0].value_bits, i_max_up(ts).value, 1e-6);
    EXPECT_NEAR(pts[0].lower_bound, i_max_down(ts).value, 1e-6);
}

TEST(Aep, ConditionallyGibbsIsZero) {
    Mat g = diag({0.7, 0.3});
    ThermoState ts(kron(g, diag({0.6, 0.4})), g);
    // rescaling by 1 - eps is optimal: any admissible tau keeps trace >= 1 - eps and Tr tau <= t
    for (const AepPoint& p : aep_experiment(ts, 0.1, 0.1, 5)) {
        EXPECT_NEAR(p.n * p.value_bits, std::log2(0.8), 1e-9);
        EXPECT_NEAR(p.n * p.lower_bound, std::log2(0.8), 1e-9);
    }
}

TEST(Aep, ClassicalChainBoundsHold) {
    ThermoState ts = random_diag_ts(2, 2, 12);
    std::vector<AepPoint> pts = aep_experiment(ts, 0.1, 0.1, 8);
    ASSERT_EQ(pts.size(), 8u);
    for (const AepPoint& p : pts) {
        EXPECT_TRUE(p.bounds_hold) << "n=" << p.n;
        EXPECT_LE(p.lower_bound, p.value_bits + 1e-9);
        EXPECT_LE(p.value_bits, p.upper_bound + 1e-9);
    }
}

TEST(Aep, ClassicalMatchesQuantumPath) {
    ThermoState ts = random_diag_ts(2, 2, 13);
    AepOptions quantum;
    quantum.classical_fast_path = false;
    std::vector<AepPoint> a = aep_experiment(ts, 0.1, 0.1, 1), b = aep_experiment(ts, 0.1, 0.1, 1, quantum);
    EXPECT_NEAR(a[0].value_bits, b[0].value_bits, 2e-4);
    EXPECT_NEAR(a[0].lower_bound, b[0].lower_bound, 1e-5);
    EXPECT_NEAR(a[0].upper_bound, b[0].upper_bound, 1e-5);
}

TEST(Aep, RejectsBadArguments) {
    ThermoState ts = random_diag_ts(2, 2, 14);
    EXPECT_THROW(aep_experiment(ts, 0.6, 0.5, 2), ValidationError);
    EXPECT_THROW(aep_experiment(ts, 0.1, 0.1, 0), ValidationError);
}

TEST(Sweeps, SmallSandwichSweepIsClean) {
    SweepConfig cfg;
    cfg.states_per_dims = 5;
    cfg.pure_duality_samples = 5;
    cfg.workers = 2;
    SweepReport r = entropy_sandwich_sweep(cfg);
    EXPECT_EQ(r.samples, 15);
    EXPECT_TRUE(r.violations.empty());
    EXPECT_LT(r.special_state_max_error, 1e-9);
    EXPECT_LT(r.duality_max_residual, 1e-6);
}

TEST(Sweeps, SmallMonotonicitySweepPasses) {
    MonotonicityConfig cfg;
    cfg.samples = 2;
    MonotonicityReport r = monotonicity_sweep(cfg);
    EXPECT_EQ(r.samples, 2);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.max_increase_max_up, cfg.tol);
    EXPECT_LE(r.max_increase_min_down, cfg.tol);
}
