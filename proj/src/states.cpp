#include "qthermo/states.hpp"

#include <cmath>

namespace qthermo {

namespace {

void check_psd(const Mat& m, double tol, const char* what) {
    if (m.rows() == 0) return;
    if (min_eigenvalue(m) < -tol) throw ValidationError(std::string(what) + ": operator is not positive semidefinite");
}

}  // namespace

DensityOperator::DensityOperator(Mat m, Dims dims, StateTolerances tol)
    : DensityOperator(HermitianOperator(std::move(m), std::move(dims)), tol) {}

DensityOperator::DensityOperator(const HermitianOperator& op, StateTolerances tol) : op_(op) {
    check_psd(op_.mat(), tol.psd, "density operator");
    if (std::abs(real_trace(op_.mat()) - 1.0) > tol.trace)
        throw ValidationError("density operator: trace differs from 1");
}

SubnormalizedState::SubnormalizedState(Mat m, Dims dims, StateTolerances tol)
    : op_(std::move(m), std::move(dims)) {
    check_psd(op_.mat(), tol.psd, "subnormalized state");
    if (real_trace(op_.mat()) > 1.0 + tol.trace) throw ValidationError("subnormalized state: trace exceeds 1");
}

ThermoState::ThermoState(DensityOperator rho, DensityOperator gamma) : rho_(std::move(rho)), gamma_(std::move(gamma)) {
    const int da = gamma_.dim();
    if (rho_.dim() % da != 0) throw DimensionError("thermo state: dim(rho) is not a multiple of dim(gamma)");
    if (min_eigenvalue(gamma_.mat()) <= 1e-12) throw ValidationError("thermo state: gamma must be full rank");
    const int db = rho_.dim() / da;
    if (rho_.dims().size() != 2 || rho_.dims()[0] != da) rho_ = DensityOperator(rho_.op().mat(), {da, db});
}

ThermoState::ThermoState(const Mat& rho, const Mat& gamma)
    : ThermoState(DensityOperator(rho, {static_cast<int>(gamma.rows()), static_cast<int>(rho.rows() / std::max<Eigen::Index>(1, gamma.rows()))}),
                  DensityOperator(gamma)) {}

Mat ThermoState::rho_A() const { return trace_second(rho_.mat(), dA(), dB()); }
Mat ThermoState::rho_B() const { return trace_first(rho_.mat(), dA(), dB()); }

SpecialKind parse_special_kind(const std::string& s) {
    if (s == "uniform") return SpecialKind::uniform;
    if (s == "pure_default" || s == "pure") return SpecialKind::pure_default;
    if (s == "max_entangled") return SpecialKind::max_entangled;
    if (s == "max_classical") return SpecialKind::max_classical;
    throw ValidationError("unknown special state kind: " + s);
}

DensityOperator gibbs_state(const Hamiltonian& h, double beta_b) {
    if (!(beta_b > 0)) throw ValidationError("beta_b must be positive");
    const double beta = beta_b * std::log(2.0);
    Eig e = eig_hermitian(h.op.mat());
    const double emin = e.values(e.values.size() - 1);
    Mat g = from_spectrum(e, [&](double x) { return std::exp(-beta * (x - emin)); });
    g /= real_trace(g);
    return DensityOperator(hermitian_part(g), h.op.dims());
}

DensityOperator uniform_state(int d) { return DensityOperator(Mat::Identity(d, d) / static_cast<double>(d)); }

DensityOperator special_state(SpecialKind kind, int dA, int dB) {
    if (dA < 1 || dB < 1) throw DimensionError("special state: dims must be positive");
    const int d = dA * dB;
    Mat m = Mat::Zero(d, d);
    switch (kind) {
        case SpecialKind::uniform:
            m = Mat::Identity(d, d) / static_cast<double>(d);
            break;
        case SpecialKind::pure_default:
            m(0, 0) = 1.0;
            break;
        case SpecialKind::max_entangled:
            if (dA != dB) throw DimensionError("maximally entangled state requires dA = dB");
            for (int i = 0; i < dA; ++i)
                for (int j = 0; j < dA; ++j) m(i * dB + i, j * dB + j) = 1.0 / dA;
            break;
        case SpecialKind::max_classical:
            if (dA != dB) throw DimensionError("maximally classically correlated state requires dA = dB");
            for (int i = 0; i < dA; ++i) m(i * dB + i, i * dB + i) = 1.0 / dA;
            break;
    }
    return DensityOperator(m, {dA, dB});
}

double trace_distance(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows()) throw DimensionError("trace distance: dimension mismatch");
    return 0.5 * trace_norm(rho - sigma);
}

double gen_trace_distance(const Mat& rho, const Mat& tau) {
    if (rho.rows() != tau.rows()) throw DimensionError("generalized trace distance: dimension mismatch");
    return 0.5 * (trace_norm(rho - tau) + std::abs(real_trace(rho) - real_trace(tau)));
}

bool in_epsilon_ball(const Mat& rho, const Mat& tau, double eps) {
    if (eps < 0 || eps > 1) throw ValidationError("eps must lie in [0,1]");
    return gen_trace_distance(rho, tau) <= eps + 1e-9;
}

DensityOperator purify(const DensityOperator& rho) {
    Eig e = eig_hermitian(rho.mat());
    const double cut = support_cutoff(e.values, 1e-9);
    int r = 0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        if (e.values(i) > cut) ++r;
    r = std::max(r, 1);
    const int d = rho.dim();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * r);
    for (int k = 0; k < r; ++k) {
        const double w = std::sqrt(std::max(0.0, e.values(k)));
        for (int i = 0; i < d; ++i) psi(static_cast<Eigen::Index>(i) * r + k) += w * e.vectors(i, k);
    }
    psi /= psi.norm();
    Dims dims = rho.dims();
    dims.push_back(r);
    return DensityOperator(psi * psi.adjoint(), dims);
}

Mat random_unitary(int d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ() * Mat::Identity(d, d);
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        cd rjj = r(j, j);
        double a = std::abs(rjj);
        if (a > 0) q.col(j) *= rjj / a;
    }
    return q;
}

Eigen::VectorXcd random_pure_vector(int d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) v(i) = cd(g(rng), g(rng));
    return v / v.norm();
}

DensityOperator random_state(const Dims& dims, int rank, Rng& rng) {
    const int d = dims_product(dims);
    if (rank < 1 || rank > d) throw ValidationError("random state: rank must be in [1, dim]");
    Eigen::VectorXcd psi = random_pure_vector(d * rank, rng);
    Mat full = psi * psi.adjoint();
    Mat rho = partial_trace(full, {d, rank}, {0});
    rho = hermitian_part(rho);
    rho /= real_trace(rho);
    return DensityOperator(rho, dims);
}

DensityOperator random_state(const Dims& dims, int rank, std::uint64_t seed) {
    Rng rng(seed);
    return random_state(dims, rank, rng);
}

DensityOperator random_diagonal_state(const Dims& dims, Rng& rng) {
    const int d = dims_product(dims);
    std::exponential_distribution<double> ex(1.0);
    Mat m = Mat::Zero(d, d);
    double s = 0;
    for (int i = 0; i < d; ++i) {
        double x = ex(rng) + 1e-3;
        m(i, i) = x;
        s += x;
    }
    m /= s;
    return DensityOperator(m, dims);
}

Hamiltonian random_hamiltonian(int d, Rng& rng, double spread) {
    std::uniform_real_distribution<double> u(0.0, spread);
    Mat diag = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = u(rng);
    Mat v = random_unitary(d, rng);
    return Hamiltonian{HermitianOperator(hermitian_part(v * diag * v.adjoint()))};
}

ThermoState random_thermo_state(const Dims& dims, const Hamiltonian& h, double beta_b, std::uint64_t seed) {
    if (dims.size() != 2) throw DimensionError("thermo state requires dims [dA, dB]");
    if (h.op.dim() != dims[0]) throw DimensionError("Hamiltonian dimension must equal dA");
    Rng rng(seed);
    const int d = dims_product(dims);
    std::uniform_int_distribution<int> rk(1, d);
    DensityOperator rho = random_state(dims, rk(rng), rng);
    return ThermoState(rho, gibbs_state(h, beta_b));
}

double conditional_gibbs_residual(const ThermoState& ts) {
    return trace_norm(ts.rho().mat() - kron(ts.gamma().mat(), ts.rho_B()));
}

bool is_conditionally_gibbs(const ThermoState& ts, double tol) { return conditional_gibbs_residual(ts) <= tol; }

}  // namespace qthermo
