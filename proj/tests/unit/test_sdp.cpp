#include "qthermo/sdp.hpp"

#include <sstream>

#include "../support/test_support.hpp"

using namespace qthermo;
using namespace qthermo::testing;

TEST(Sdp, TraceAboveFixedMatrix) {
    // min Tr X s.t. X >= diag(1, 2)
    SdpProblem p;
    auto x = p.add_hermitian(2);
    p.add_objective(x, Mat::Identity(2, 2));
    int l = p.add_lmi(2);
    p.lmi_constant(l, -diag({1, 2}));
    p.lmi_identity(l, x);
    SdpSolution s = sdp_solve(p);
    ASSERT_TRUE(s.ok()) << s.message;
    EXPECT_NEAR(s.primal_value, 3.0, 1e-6);
    EXPECT_LT(max_abs(p.value(x, s.x) - diag({1, 2})), 1e-4);
}

TEST(Sdp, ScalarTimesIdentity) {
    // min t s.t. t 1 >= diag(0.3, 0.7)
    SdpProblem p;
    int t = p.add_scalar();
    p.add_objective(t, 1.0);
    int l = p.add_lmi(2);
    p.lmi_constant(l, -diag({0.3, 0.7}));
    p.lmi_scalar(l, t, Mat::Identity(2, 2));
    SdpSolution s = sdp_solve(p);
    ASSERT_TRUE(s.ok()) << s.message;
    EXPECT_NEAR(s.primal_value, 0.7, 1e-6);
    EXPECT_NEAR(s.dual_value, 0.7, 1e-6);
}

TEST(Sdp, ComplexOffDiagonal) {
    // min t s.t. t 1 >= [[0, i], [-i, 0]]; the largest eigenvalue is 1
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = cd(0, 1);
    m(1, 0) = cd(0, -1);
    SdpProblem p;
    int t = p.add_scalar();
    p.add_objective(t, 1.0);
    int l = p.add_lmi(2);
    p.lmi_constant(l, -m);
    p.lmi_scalar(l, t, Mat::Identity(2, 2));
    SdpSolution s = sdp_solve(p);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(s.primal_value, 1.0, 1e-6);
}

TEST(Sdp, LargestEigenvalueOfRandomMatrices) {
    Rng rng(1);
    for (int d : {2, 3, 4}) {
        Mat m = random_hermitian(d, rng);
        SdpProblem p;
        int t = p.add_scalar();
        p.add_objective(t, 1.0);
        int l = p.add_lmi(d);
        p.lmi_constant(l, -m);
        p.lmi_scalar(l, t, Mat::Identity(d, d));
        SdpSolution s = sdp_solve(p);
        ASSERT_TRUE(s.ok());
        EXPECT_NEAR(s.primal_value, max_eigenvalue(m), 1e-6);
    }
}

TEST(Sdp, ScalarInequalities) {
    // min x s.t. x >= 2, x <= 5
    SdpProblem p;
    int x = p.add_scalar();
    p.add_objective(x, 1.0);
    p.add_inequality({-2.0, {{x, 1.0}}});
    p.add_inequality({5.0, {{x, -1.0}}});
    SdpSolution s = sdp_solve(p);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(s.primal_value, 2.0, 1e-6);
}

TEST(Sdp, FeasibilityCertificate) {
    // X >= 0, X <= 1, Tr X = 1 with X restricted to be PSD: any density matrix, objective 0
    SdpProblem p;
    auto x = p.add_hermitian(2);
    int a = p.add_lmi(2);
    p.lmi_identity(a, x);
    int b = p.add_lmi(2);
    p.lmi_constant(b, Mat::Identity(2, 2));
    p.lmi_identity(b, x, -1.0);
    SdpProblem::LinearExpr up{1.0, {}}, down{-1.0, {}};
    SdpProblem::add_trace_term(up, x, Mat::Identity(2, 2), -1.0);
    SdpProblem::add_trace_term(down, x, Mat::Identity(2, 2), 1.0);
    p.add_inequality(up);
    p.add_inequality(down);
    SdpSolution s = sdp_solve(p);
    ASSERT_TRUE(s.ok());
    Mat v = p.value(x, s.x);
    EXPECT_NEAR(v.trace().real(), 1.0, 1e-6);
    EXPECT_GT(min_eigenvalue(v), -1e-6);
}

TEST(Sdp, Infeasible) {
    // x >= 1 and x <= 0
    SdpProblem p;
    int x = p.add_scalar();
    p.add_objective(x, 1.0);
    p.add_inequality({-1.0, {{x, 1.0}}});
    p.add_inequality({0.0, {{x, -1.0}}});
    SdpSolution s = sdp_solve(p);
    EXPECT_FALSE(s.ok());
    EXPECT_NE(s.status, SdpStatus::optimal);
}

TEST(Sdp, Unbounded) {
    // min x s.t. x <= 1
    SdpProblem p;
    int x = p.add_scalar();
    p.add_objective(x, 1.0);
    p.add_inequality({1.0, {{x, -1.0}}});
    SdpSolution s = sdp_solve(p);
    EXPECT_FALSE(s.ok());
}

TEST(Sdp, HermitianBasisIsOrthogonal) {
    for (int d : {2, 3}) {
        for (int i = 0; i < d * d; ++i)
            for (int j = 0; j < d * d; ++j) {
                Mat a = hermitian_basis(d, i), b = hermitian_basis(d, j);
                EXPECT_LT(max_abs(a - a.adjoint()), 1e-15);
                // off-diagonal elements carry both entries, so their squared norm is 2
                EXPECT_NEAR((a * b).trace().real(), i != j ? 0.0 : i < d ? 1.0 : 2.0, 1e-14);
            }
    }
}

TEST(Sdp, SparseDumpMentionsEveryBlock) {
    SdpProblem p;
    auto x = p.add_hermitian(2);
    p.add_objective(x, Mat::Identity(2, 2));
    int l = p.add_lmi(2);
    p.lmi_constant(l, -diag({1, 2}));
    p.lmi_identity(l, x);
    std::ostringstream os;
    p.write_sparse(os);
    EXPECT_FALSE(os.str().empty());
}
