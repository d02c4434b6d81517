#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "qthermo/linalg.hpp"

namespace qthermo {

struct StateTolerances {
    double psd = 1e-9;
    double trace = 1e-9;
};

// Positive semidefinite, unit trace.
class DensityOperator {
public:
    DensityOperator() = default;
    explicit DensityOperator(Mat m, Dims dims = {}, StateTolerances tol = {});
    explicit DensityOperator(const HermitianOperator& op, StateTolerances tol = {});

    const Mat& mat() const { return op_.mat(); }
    operator const Mat&() const { return op_.mat(); }
    const HermitianOperator& op() const { return op_; }
    const Dims& dims() const { return op_.dims(); }
    int dim() const { return op_.dim(); }

private:
    HermitianOperator op_;
};

// Positive semidefinite with trace at most one.
class SubnormalizedState {
public:
    SubnormalizedState() = default;
    explicit SubnormalizedState(Mat m, Dims dims = {}, StateTolerances tol = {});
    SubnormalizedState(const DensityOperator& rho) : op_(rho.op()) {}  // NOLINT: every state is subnormalized

    const Mat& mat() const { return op_.mat(); }
    operator const Mat&() const { return op_.mat(); }
    const Dims& dims() const { return op_.dims(); }
    int dim() const { return op_.dim(); }

private:
    HermitianOperator op_;
};

struct Hamiltonian {
    HermitianOperator op;
};

// The couple (rho_AB, gamma_A). gamma_A must be full rank.
class ThermoState {
public:
    ThermoState() = default;
    ThermoState(DensityOperator rho, DensityOperator gamma);
    ThermoState(const Mat& rho, const Mat& gamma);

    const DensityOperator& rho() const { return rho_; }
    const DensityOperator& gamma() const { return gamma_; }
    int dA() const { return gamma_.dim(); }
    int dB() const { return rho_.dim() / gamma_.dim(); }
    Mat rho_A() const;
    Mat rho_B() const;

private:
    DensityOperator rho_;
    DensityOperator gamma_;
};

enum class SpecialKind { uniform, pure_default, max_entangled, max_classical };

SpecialKind parse_special_kind(const std::string& s);

DensityOperator gibbs_state(const Hamiltonian& h, double beta_b);
DensityOperator uniform_state(int d);
DensityOperator special_state(SpecialKind kind, int dA, int dB);

double trace_distance(const Mat& rho, const Mat& sigma);
double gen_trace_distance(const Mat& rho, const Mat& tau);
bool in_epsilon_ball(const Mat& rho, const Mat& tau, double eps);

// Rank-1 extension on A (x) B (x) C with |C| = rank(rho).
DensityOperator purify(const DensityOperator& rho);

using Rng = std::mt19937_64;

Mat random_unitary(int d, Rng& rng);
Eigen::VectorXcd random_pure_vector(int d, Rng& rng);
DensityOperator random_state(const Dims& dims, int rank, std::uint64_t seed);
DensityOperator random_state(const Dims& dims, int rank, Rng& rng);
DensityOperator random_diagonal_state(const Dims& dims, Rng& rng);
Hamiltonian random_hamiltonian(int d, Rng& rng, double spread = 2.0);
ThermoState random_thermo_state(const Dims& dims, const Hamiltonian& h, double beta_b, std::uint64_t seed);

bool is_conditionally_gibbs(const ThermoState& ts, double tol = 1e-9);
double conditional_gibbs_residual(const ThermoState& ts);

}  // namespace qthermo
