#include "qthermo/conditional.hpp"

#include <algorithm>
#include <cmath>

namespace qthermo {

namespace {

constexpr double kRankTol = 1e-9;

void check_bipartite(const Mat& rho, int dA, int dB) {
    if (dA < 1 || dB < 1 || rho.rows() != static_cast<Eigen::Index>(dA) * dB)
        throw DimensionError("conditional entropy: dims do not match state");
}

Mat id(int d) { return Mat::Identity(d, d); }

// Euclidean projection of a real vector onto the probability simplex.
RVec project_simplex(const RVec& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        css += u[k];
        double t = (css - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0) theta = t;
    }
    RVec out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = std::max(0.0, v(i) - theta);
    return out;
}

Mat project_density(const Mat& x) {
    Eig e = eig_hermitian(x);
    RVec p = project_simplex(e.values);
    return hermitian_part(e.vectors * p.cast<cd>().asDiagonal() * e.vectors.adjoint());
}

double power_objective(const Mat& m, const Mat& sigma, double s) {
    return real_trace(m * support_power(sigma, s, 0.0));
}

// Frechet derivative of sigma -> Tr[M sigma^s].
Mat power_gradient(const Mat& m, const Mat& sigma, double s) {
    Eig e = eig_hermitian(sigma);
    const Eigen::Index n = e.values.size();
    const double floor = 1e-15;
    Mat mt = e.vectors.adjoint() * m * e.vectors;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double li = std::max(e.values(i), floor), lj = std::max(e.values(j), floor);
            double g;
            if (std::abs(li - lj) <= 1e-12 * std::max(li, lj))
                g = s * std::pow(0.5 * (li + lj), s - 1.0);
            else
                g = (std::pow(li, s) - std::pow(lj, s)) / (li - lj);
            mt(i, j) *= g;
        }
    }
    return hermitian_part(e.vectors * mt * e.vectors.adjoint());
}

}  // namespace

std::string to_string(CondVariant v) {
    switch (v) {
        case CondVariant::min_down: return "min_down";
        case CondVariant::max_up: return "max_up";
        case CondVariant::von_neumann: return "von_neumann";
        case CondVariant::sandwiched_down: return "sandwiched_down";
        case CondVariant::petz_up: return "petz_up";
    }
    return "?";
}

std::string to_string(InfoVariant v) {
    switch (v) {
        case InfoVariant::max_up: return "max_up";
        case InfoVariant::min_down: return "min_down";
        case InfoVariant::umegaki: return "umegaki";
        case InfoVariant::max_down: return "max_down";
        case InfoVariant::petz_down: return "petz_down";
    }
    return "?";
}

CondEntropyValue h_min_cond(const Mat& rho, int dA, int dB) {
    check_bipartite(rho, dA, dB);
    Mat rb = trace_first(rho, dA, dB);
    Mat s = kron(id(dA), pinv_sqrt(rb, kRankTol));
    double top = max_eigenvalue(hermitian_part(s * rho * s));
    return {-std::log2(top), CondVariant::min_down, std::numeric_limits<double>::infinity()};
}

CondEntropyValue h_max_cond(const Mat& rho, int dA, int dB) {
    check_bipartite(rho, dA, dB);
    Mat p = support_projector(rho, kRankTol);
    return {std::log2(max_eigenvalue(trace_first(p, dA, dB))), CondVariant::max_up, 0.0};
}

CondEntropyValue h_vn_cond(const Mat& rho, int dA, int dB) {
    check_bipartite(rho, dA, dB);
    double v = von_neumann_entropy(rho) - von_neumann_entropy(trace_first(rho, dA, dB));
    return {v, CondVariant::von_neumann, 1.0};
}

CondEntropyValue h_sandwiched_down(const Mat& rho, int dA, int dB, double alpha) {
    check_bipartite(rho, dA, dB);
    Mat ref = kron(id(dA), trace_first(rho, dA, dB));
    DivergenceValue d = d_sandwiched(rho, ref, alpha);
    return {-d.value, CondVariant::sandwiched_down, alpha};
}

CondEntropyValue h_petz_up(const Mat& rho, int dA, int dB, double alpha) {
    check_bipartite(rho, dA, dB);
    if (!(alpha >= 0.0 && alpha <= 2.0)) throw ValidationError("Petz order must lie in [0,1) or (1,2]");
    if (std::abs(alpha - 1.0) < 1e-4) {
        auto v = h_vn_cond(rho, dA, dB);
        return {v.value, CondVariant::petz_up, alpha};
    }
    if (alpha == 0.0) {
        auto v = h_max_cond(rho, dA, dB);
        return {v.value, CondVariant::petz_up, 0.0};
    }
    Mat m = trace_first(support_power(rho, alpha, kRankTol), dA, dB);
    RVec ev = eig_hermitian(m).values;
    double tr = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 0) tr += std::pow(ev(i), 1.0 / alpha);
    return {alpha / (1.0 - alpha) * std::log2(tr), CondVariant::petz_up, alpha};
}

MutualInfoValue i_max_up(const ThermoState& ts) {
    Mat ref = kron(ts.gamma().mat(), ts.rho_B());
    DivergenceValue d = d_max(ts.rho().mat(), ref);
    MutualInfoValue out;
    out.value = d.value;
    out.infinite = d.infinite;
    out.variant = InfoVariant::max_up;
    return out;
}

MutualInfoValue i_min_down(const ThermoState& ts) {
    const int dA = ts.dA(), dB = ts.dB();
    Mat p = support_projector(ts.rho().mat(), kRankTol);
    Mat g = kron(sqrt_psd(ts.gamma().mat()), id(dB));
    Mat m = trace_first(hermitian_part(g * p * g), dA, dB);
    MutualInfoValue out;
    out.value = -std::log2(max_eigenvalue(m));
    out.variant = InfoVariant::min_down;
    out.alpha = 0.0;
    return out;
}

MutualInfoValue i_umegaki(const ThermoState& ts) {
    Mat ref = kron(ts.gamma().mat(), ts.rho_B());
    DivergenceValue d = d_umegaki(ts.rho().mat(), ref);
    MutualInfoValue out;
    out.value = d.value;
    out.infinite = d.infinite;
    out.variant = InfoVariant::umegaki;
    return out;
}

MutualInfoValue i_petz_down(const ThermoState& ts, double alpha, const PetzOptions& opt) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("Petz mutual information order must lie in [0,1)");
    const int dA = ts.dA(), dB = ts.dB();
    const double s = 1.0 - alpha;
    // D_alpha(rho || gamma (x) sigma) = log2 Tr[M sigma^s] / (alpha - 1)
    Mat ra = alpha == 0.0 ? support_projector(ts.rho().mat(), kRankTol)
                          : support_power(ts.rho().mat(), alpha, kRankTol);
    Mat g = kron(support_power(ts.gamma().mat(), 0.5 * s, 0.0), id(dB));
    Mat m = trace_first(hermitian_part(g * ra * g), dA, dB);

    Mat sigma = Mat::Identity(dB, dB) / static_cast<double>(dB);
    double q = power_objective(m, sigma, s);
    double eta = 1.0;
    MutualInfoValue out;
    out.variant = InfoVariant::petz_down;
    out.alpha = alpha;
    out.converged = false;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        Mat grad = power_gradient(m, sigma, s);
        bool accepted = false;
        Mat next;
        double qn = q;
        for (int bt = 0; bt < 60; ++bt) {
            next = project_density(sigma + eta * grad);
            qn = power_objective(m, next, s);
            double lin = real_trace(grad * (next - sigma));
            if (qn >= q + 1e-4 * lin - 1e-16 * std::abs(q)) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            out.converged = true;  // no ascent direction left at machine precision
            break;
        }
        double step = (next - sigma).norm() / eta;
        sigma = next;
        q = std::max(q, qn);
        eta = std::min(eta * 2.0, 1e6);
        if (step <= opt.grad_tol) {
            out.converged = true;
            break;
        }
    }
    out.iterations = it;
    if (q <= 0) {
        out.value = std::numeric_limits<double>::infinity();
        out.infinite = true;
        return out;
    }
    out.value = std::log2(q) / (alpha - 1.0);

    // Random probes must not beat the optimum.
    Rng rng(opt.probe_seed);
    for (int k = 0; k < opt.probes; ++k) {
        Mat probe = random_state({dB}, dB, rng).mat();
        double qp = power_objective(m, probe, s);
        if (qp > 0 && std::log2(qp) / (alpha - 1.0) < out.value - 1e-6) out.converged = false;
    }
    return out;
}

double helmholtz_cond(const ThermoState& ts, const Hamiltonian& h, double beta_b) {
    if (!(beta_b > 0)) throw ValidationError("beta_b must be positive");
    if (h.op.dim() != ts.dA()) throw DimensionError("Hamiltonian dimension must equal dA");
    double energy = real_trace(h.op.mat() * ts.rho_A());
    return energy - h_vn_cond(ts.rho().mat(), ts.dA(), ts.dB()).value / beta_b;
}

double helmholtz(const Mat& state, const Hamiltonian& h, double beta_b) {
    if (!(beta_b > 0)) throw ValidationError("beta_b must be positive");
    if (h.op.dim() != state.rows()) throw DimensionError("Hamiltonian dimension mismatch");
    return real_trace(h.op.mat() * state) - von_neumann_entropy(state) / beta_b;
}

}  // namespace qthermo
