#include "qthermo/channels.hpp"

#include <algorithm>
#include <cmath>

namespace qthermo {

namespace {

using RMat = Eigen::MatrixXd;

Mat choi_matrix(const LinearMap& f, int din, int dout) {
    Mat j = Mat::Zero(static_cast<Eigen::Index>(din) * dout, static_cast<Eigen::Index>(din) * dout);
    for (int i = 0; i < din; ++i)
        for (int k = 0; k < din; ++k) {
            Mat out = f(ket_bra(din, i, k));
            if (out.rows() != dout || out.cols() != dout) throw DimensionError("map output has the wrong dimension");
            j.block(static_cast<Eigen::Index>(i) * dout, static_cast<Eigen::Index>(k) * dout, dout, dout) = out;
        }
    return j;
}

Dims concat(const Dims& a, const Dims& b) {
    Dims c = a;
    c.insert(c.end(), b.begin(), b.end());
    return c;
}

// Tr_A of an operator on A (x) B.
Mat trace_a(const Mat& x, int dA, int dB) { return trace_first(x, dA, dB); }

struct Bip {
    int a_in, b_in, a_out, b_out;
};

Bip bipartite(const ChoiOperator& ch) {
    auto split = [](const Dims& d, int& a, int& b) {
        if (d.size() == 1) {
            a = d[0];
            b = 1;
        } else if (d.size() == 2) {
            a = d[0];
            b = d[1];
        } else {
            throw DimensionError("bipartite channel expected ({A,B} dims)");
        }
    };
    Bip r{};
    split(ch.in_dims(), r.a_in, r.b_in);
    split(ch.out_dims(), r.a_out, r.b_out);
    return r;
}

double trace_norm_diff(const Mat& x, const Mat& y) { return trace_norm(hermitian_part(x - y)); }

// Doubly scaled positive matrix with the requested row and column sums.
RMat sinkhorn(RMat q, const RVec& rows, const RVec& cols) {
    for (int it = 0; it < 5000; ++it) {
        for (Eigen::Index r = 0; r < q.rows(); ++r) q.row(r) *= rows(r) / q.row(r).sum();
        for (Eigen::Index c = 0; c < q.cols(); ++c) q.col(c) *= cols(c) / q.col(c).sum();
        double err = (q.rowwise().sum() - rows).cwiseAbs().maxCoeff();
        if (err < 1e-15) break;
    }
    return q;
}

// Unitary commuting with gamma: independent Haar blocks on its eigenspaces.
Mat gamma_commuting_unitary(const Mat& gamma, Rng& rng) {
    Eig e = eig_hermitian(gamma);
    const int d = static_cast<int>(gamma.rows());
    Mat u = Mat::Zero(d, d);
    int start = 0;
    while (start < d) {
        int end = start + 1;
        while (end < d && std::abs(e.values(end) - e.values(start)) <= 1e-12) ++end;
        u.block(start, start, end - start, end - start) = random_unitary(end - start, rng);
        start = end;
    }
    return e.vectors * u * e.vectors.adjoint();
}

}  // namespace

ChoiOperator::ChoiOperator(Mat j, Dims in_dims, Dims out_dims, double tp_tol)
    : j_(std::move(j)), in_(std::move(in_dims)), out_(std::move(out_dims)) {
    const Eigen::Index n = static_cast<Eigen::Index>(d_in()) * d_out();
    if (j_.rows() != n || j_.cols() != n) throw DimensionError("Choi matrix does not match its dims");
    if (hermiticity_defect(j_) > 1e-9) throw ValidationError("Choi matrix is not Hermitian");
    j_ = hermitian_part(j_);
    if (tp_tol >= 0 && trace_preservation_defect() > tp_tol) throw ValidationError("channel is not trace preserving");
}

double ChoiOperator::trace_preservation_defect() const {
    Mat t = trace_second(j_, d_in(), d_out());
    return (t - Mat::Identity(d_in(), d_in())).cwiseAbs().maxCoeff();
}

ThermoOperation::ThermoOperation(ChoiOperator ch, DensityOperator g_in, DensityOperator g_out)
    : channel(std::move(ch)), gamma_in(std::move(g_in)), gamma_out(std::move(g_out)) {
    if (gamma_in.dim() != dA_in() || gamma_out.dim() != dA_out())
        throw DimensionError("Gibbs states do not match the channel's A systems");
}

Mat apply_choi(const ChoiOperator& ch, const Mat& x) {
    const int din = ch.d_in(), dout = ch.d_out();
    if (x.rows() != din || x.cols() != din) throw DimensionError("apply_choi: input dimension mismatch");
    Mat out = Mat::Zero(dout, dout);
    for (int i = 0; i < din; ++i)
        for (int k = 0; k < din; ++k) {
            if (x(i, k) == cd(0.0)) continue;
            out += x(i, k) * ch.mat().block(static_cast<Eigen::Index>(i) * dout, static_cast<Eigen::Index>(k) * dout, dout, dout);
        }
    return out;
}

DensityOperator apply_channel(const ChoiOperator& ch, const DensityOperator& rho) {
    return DensityOperator(apply_choi(ch, rho.mat()), ch.out_dims());
}

Mat apply_on_factors(const ChoiOperator& ch, const Mat& x, const Dims& dims, int first, int count) {
    const int n = static_cast<int>(dims.size());
    if (first < 0 || count < 1 || first + count > n) throw DimensionError("apply_on_factors: factor range out of bounds");
    if (x.rows() != dims_product(dims)) throw DimensionError("apply_on_factors: operator does not match dims");
    int mid = 1;
    for (int k = first; k < first + count; ++k) mid *= dims[k];
    if (mid != ch.d_in()) throw DimensionError("apply_on_factors: channel input does not match the factors");
    int left = 1, right = 1;
    for (int k = 0; k < first; ++k) left *= dims[k];
    for (int k = first + count; k < n; ++k) right *= dims[k];
    // bring the acted-on factors to the front
    Mat y = permute_subsystems(x, {left, mid, right}, {1, 0, 2});
    const int rest = left * right, dout = ch.d_out();
    Mat out = Mat::Zero(static_cast<Eigen::Index>(dout) * rest, static_cast<Eigen::Index>(dout) * rest);
    for (int i = 0; i < mid; ++i)
        for (int k = 0; k < mid; ++k) {
            Mat blk = y.block(static_cast<Eigen::Index>(i) * rest, static_cast<Eigen::Index>(k) * rest, rest, rest);
            if (blk.cwiseAbs().maxCoeff() == 0.0) continue;
            out += kron(ch.mat().block(static_cast<Eigen::Index>(i) * dout, static_cast<Eigen::Index>(k) * dout, dout, dout), blk);
        }
    return permute_subsystems(out, {dout, left, right}, {1, 0, 2});
}

ChoiOperator choi_of_map(const LinearMap& f, const Dims& in_dims, const Dims& out_dims) {
    return ChoiOperator(choi_matrix(f, dims_product(in_dims), dims_product(out_dims)), in_dims, out_dims);
}

ChoiOperator identity_channel(const Dims& dims) {
    return choi_of_map([](const Mat& x) { return x; }, dims, dims);
}

ChoiOperator thermalization_channel(const DensityOperator& gamma) {
    const int d = gamma.dim();
    return ChoiOperator(kron(Mat::Identity(d, d), gamma.mat()), {d}, {d});
}

ChoiOperator compose(const ChoiOperator& second, const ChoiOperator& first) {
    if (first.d_out() != second.d_in()) throw DimensionError("compose: intermediate dimensions differ");
    return choi_of_map([&](const Mat& x) { return apply_choi(second, apply_choi(first, x)); }, first.in_dims(),
                       second.out_dims());
}

ChoiOperator tensor_channels(const ChoiOperator& a, const ChoiOperator& b) {
    Mat j = kron(a.mat(), b.mat());
    j = permute_subsystems(j, {a.d_in(), a.d_out(), b.d_in(), b.d_out()}, {0, 2, 1, 3});
    return ChoiOperator(j, concat(a.in_dims(), b.in_dims()), concat(a.out_dims(), b.out_dims()));
}

ChoiOperator unitary_channel(const Mat& u, const Dims& dims) {
    const int d = dims_product(dims);
    if (u.rows() != d || u.cols() != d) throw DimensionError("unitary_channel: dims mismatch");
    Eigen::VectorXcd omega = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * d);
    for (int i = 0; i < d; ++i) omega(static_cast<Eigen::Index>(i) * d + i) = 1.0;
    Mat w = kron(Mat::Identity(d, d), u);
    Eigen::VectorXcd v = w * omega;
    return ChoiOperator(v * v.adjoint(), dims, dims);
}

ChoiOperator depolarize(const ChoiOperator& ch, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("depolarizing weight must lie in [0,1]");
    const int din = ch.d_in(), dout = ch.d_out();
    Mat noise = Mat::Identity(static_cast<Eigen::Index>(din) * dout, static_cast<Eigen::Index>(din) * dout) / static_cast<double>(dout);
    return ChoiOperator((1.0 - w) * ch.mat() + w * noise, ch.in_dims(), ch.out_dims());
}

PredicateResult is_cond_thermal_covariant(const ThermoOperation& op, double tol) {
    const Bip d = bipartite(op.channel);
    const Mat& g = op.gamma_in.mat();
    const Mat& gp = op.gamma_out.mat();
    Mat lhs = choi_matrix(
        [&](const Mat& x) { return apply_choi(op.channel, kron(g, trace_a(x, d.a_in, d.b_in))); },
        d.a_in * d.b_in, d.a_out * d.b_out);
    Mat rhs = choi_matrix(
        [&](const Mat& x) { return Mat(kron(gp, trace_a(apply_choi(op.channel, x), d.a_out, d.b_out))); },
        d.a_in * d.b_in, d.a_out * d.b_out);
    PredicateResult r;
    r.residual = trace_norm_diff(lhs, rhs);
    r.holds = r.residual <= tol;
    return r;
}

PredicateResult is_cond_gibbs_preserving(const ThermoOperation& op, double tol) {
    const Bip d = bipartite(op.channel);
    const Mat& g = op.gamma_in.mat();
    const Mat& gp = op.gamma_out.mat();
    auto on_gibbs = [&](const Mat& y) { return apply_choi(op.channel, kron(g, y)); };
    Mat lhs = choi_matrix(on_gibbs, d.b_in, d.a_out * d.b_out);
    Mat rhs = choi_matrix([&](const Mat& y) { return Mat(kron(gp, trace_a(on_gibbs(y), d.a_out, d.b_out))); },
                          d.b_in, d.a_out * d.b_out);
    PredicateResult r;
    r.residual = trace_norm_diff(lhs, rhs);
    r.holds = r.residual <= tol;
    return r;
}

PredicateResult is_nonsignaling_A_to_B(const ChoiOperator& ch, double tol) {
    const Bip d = bipartite(ch);
    // any fixed state on A gives the reduced map; the maximally mixed one is used
    Mat pa = Mat::Identity(d.a_in, d.a_in) / static_cast<double>(d.a_in);
    Mat lhs = choi_matrix([&](const Mat& x) { return trace_a(apply_choi(ch, x), d.a_out, d.b_out); },
                          d.a_in * d.b_in, d.b_out);
    Mat rhs = choi_matrix(
        [&](const Mat& x) { return trace_a(apply_choi(ch, kron(pa, trace_a(x, d.a_in, d.b_in))), d.a_out, d.b_out); },
        d.a_in * d.b_in, d.b_out);
    PredicateResult r;
    r.residual = trace_norm_diff(lhs, rhs);
    r.holds = r.residual <= tol;
    return r;
}

PredicateResult is_gibbs_preserving_nonsignaling(const ThermoOperation& op, double tol) {
    PredicateResult gp = is_cond_gibbs_preserving(op, tol);
    PredicateResult ns = is_nonsignaling_A_to_B(op.channel, tol);
    PredicateResult r;
    r.residual = std::max(gp.residual, ns.residual);
    r.holds = r.residual <= tol;
    return r;
}

ChoiOperator random_channel(const Dims& in_dims, const Dims& out_dims, Rng& rng, int d_env) {
    const int din = dims_product(in_dims), dout = dims_product(out_dims);
    const int big = dout * d_env;
    if (big < din) throw DimensionError("random_channel: environment too small for an isometry");
    Mat v = random_unitary(big, rng).leftCols(din);  // isometry in -> out (x) env
    return choi_of_map(
        [&](const Mat& x) {
            Mat y = v * x * v.adjoint();
            return trace_second(y, dout, d_env);
        },
        in_dims, out_dims);
}

ChoiOperator random_gibbs_preserving(const DensityOperator& gamma_in, const DensityOperator& gamma_out, Rng& rng) {
    const int din = gamma_in.dim(), dout = gamma_out.dim();
    Eig ein = eig_hermitian(gamma_in.mat());
    Eig eout = eig_hermitian(gamma_out.mat());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);

    RMat q(dout, din);
    for (int c = 0; c < dout; ++c)
        for (int a = 0; a < din; ++a) q(c, a) = 0.05 + unif(rng);
    q = sinkhorn(q, eout.values, ein.values);
    // relabelling channel: measure in gamma's eigenbasis, prepare gamma''s eigenvectors
    LinearMap relabel = [&](const Mat& x) {
        Mat xt = ein.vectors.adjoint() * x * ein.vectors;
        Mat y = Mat::Zero(dout, dout);
        for (int c = 0; c < dout; ++c) {
            cd acc = 0.0;
            for (int a = 0; a < din; ++a) acc += q(c, a) / ein.values(a) * xt(a, a);
            y(c, c) = acc;
        }
        return Mat(eout.vectors * y * eout.vectors.adjoint());
    };

    const bool same = din == dout && (gamma_in.mat() - gamma_out.mat()).cwiseAbs().maxCoeff() <= 1e-12;
    double w_rep = expo(rng), w_rel = expo(rng), w_uni = same ? 2.0 * expo(rng) : 0.0;
    const double tot = w_rep + w_rel + w_uni;
    w_rep /= tot;
    w_rel /= tot;
    w_uni /= tot;
    Mat u1, u2;
    double split = unif(rng);
    if (same) {
        u1 = gamma_commuting_unitary(gamma_in.mat(), rng);
        u2 = gamma_commuting_unitary(gamma_in.mat(), rng);
    }
    const Mat& gp = gamma_out.mat();
    return choi_of_map(
        [&](const Mat& x) {
            Mat y = w_rep * x.trace() * gp + w_rel * relabel(x);
            if (same) y += w_uni * (split * u1 * x * u1.adjoint() + (1.0 - split) * u2 * x * u2.adjoint());
            return y;
        },
        {din}, {dout});
}

ThermoOperation random_free_operation(const FreeOperationDims& dims, const DensityOperator& gamma_in,
                                      const DensityOperator& gamma_out, std::uint64_t seed) {
    if (gamma_in.dim() != dims.dA || gamma_out.dim() != dims.dA_out)
        throw DimensionError("random_free_operation: Gibbs states do not match dims");
    Rng rng(seed);
    const int m = dims.d_memory;
    ChoiOperator bob = random_channel({dims.dB}, {dims.dB_out, m}, rng, std::max(2, dims.dB));
    std::vector<ChoiOperator> branches;
    for (int k = 0; k < m; ++k) branches.push_back(random_gibbs_preserving(gamma_in, gamma_out, rng));
    const int dA = dims.dA, dAo = dims.dA_out, dBo = dims.dB_out;
    ChoiOperator ch = choi_of_map(
        [&](const Mat& x) {
            // A (x) B -> A (x) B' (x) M
            Mat y = apply_on_factors(bob, x, {dA, dims.dB}, 1, 1);
            // move M in front of A: M (x) A (x) B'
            y = permute_subsystems(y, {dA, dBo, m}, {2, 0, 1});
            const int blk = dA * dBo;
            Mat out = Mat::Zero(static_cast<Eigen::Index>(dAo) * dBo, static_cast<Eigen::Index>(dAo) * dBo);
            for (int k = 0; k < m; ++k) {
                Mat yk = y.block(static_cast<Eigen::Index>(k) * blk, static_cast<Eigen::Index>(k) * blk, blk, blk);
                out += apply_on_factors(branches[k], yk, {dA, dBo}, 0, 1);
            }
            return out;
        },
        {dims.dA, dims.dB}, {dims.dA_out, dims.dB_out});
    return ThermoOperation(std::move(ch), gamma_in, gamma_out);
}

}  // namespace qthermo
