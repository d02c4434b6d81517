#include "qthermo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qthermo {

int dims_product(const Dims& d) {
    int p = 1;
    for (int x : d) {
        if (x < 1) throw DimensionError("subsystem dimensions must be >= 1");
        p *= x;
    }
    return p;
}

HermitianOperator::HermitianOperator(Mat m, Dims dims, double herm_tol) : m_(std::move(m)), dims_(std::move(dims)) {
    if (m_.rows() != m_.cols()) throw DimensionError("operator must be square");
    if (dims_.empty()) dims_ = {static_cast<int>(m_.rows())};
    if (dims_product(dims_) != m_.rows()) throw DimensionError("subsystem dims do not match operator dimension");
    if (hermiticity_defect(m_) > herm_tol) throw ValidationError("operator is not Hermitian within tolerance");
    m_ = hermitian_part(m_);
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron_all(const std::vector<Mat>& ms) {
    Mat out = Mat::Ones(1, 1);
    for (const auto& m : ms) out = kron(out, m);
    return out;
}

HermitianOperator tensor(const HermitianOperator& m, const HermitianOperator& n) {
    Dims d = m.dims();
    d.insert(d.end(), n.dims().begin(), n.dims().end());
    return HermitianOperator(kron(m.mat(), n.mat()), d);
}

namespace {

// Splits every flat index into (index within kept factors, index within traced factors).
void split_indices(const Dims& dims, const std::vector<int>& keep, std::vector<int>& kidx, std::vector<int>& tidx,
                   int& kdim, int& tdim) {
    const int n = static_cast<int>(dims.size());
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw DimensionError("partial trace: subsystem index out of range");
        kept[k] = true;
    }
    kdim = 1;
    tdim = 1;
    for (int k : keep) kdim *= dims[k];
    for (int i = 0; i < n; ++i)
        if (!kept[i]) tdim *= dims[i];
    const int total = dims_product(dims);
    kidx.assign(total, 0);
    tidx.assign(total, 0);
    std::vector<int> digits(n);
    for (int flat = 0; flat < total; ++flat) {
        int r = flat;
        for (int i = n - 1; i >= 0; --i) {
            digits[i] = r % dims[i];
            r /= dims[i];
        }
        int ki = 0;
        for (int k : keep) ki = ki * dims[k] + digits[k];
        int ti = 0;
        for (int i = 0; i < n; ++i)
            if (!kept[i]) ti = ti * dims[i] + digits[i];
        kidx[flat] = ki;
        tidx[flat] = ti;
    }
}

}  // namespace

Mat partial_trace(const Mat& m, const Dims& dims, const std::vector<int>& keep) {
    if (m.rows() != m.cols() || dims_product(dims) != m.rows())
        throw DimensionError("partial trace: dims do not match operator");
    std::vector<int> kidx, tidx;
    int kdim, tdim;
    split_indices(dims, keep, kidx, tidx, kdim, tdim);
    std::vector<std::vector<int>> groups(tdim);
    for (int i = 0; i < static_cast<int>(kidx.size()); ++i) groups[tidx[i]].push_back(i);
    Mat out = Mat::Zero(kdim, kdim);
    for (const auto& g : groups)
        for (int i : g)
            for (int j : g) out(kidx[i], kidx[j]) += m(i, j);
    return out;
}

HermitianOperator partial_trace(const HermitianOperator& m, const std::vector<int>& keep) {
    Dims d;
    for (int k : keep) {
        if (k < 0 || k >= static_cast<int>(m.dims().size())) throw DimensionError("partial trace: bad subsystem");
        d.push_back(m.dims()[k]);
    }
    return HermitianOperator(partial_trace(m.mat(), m.dims(), keep), d);
}

Mat trace_first(const Mat& m, int d1, int d2) { return partial_trace(m, {d1, d2}, {1}); }
Mat trace_second(const Mat& m, int d1, int d2) { return partial_trace(m, {d1, d2}, {0}); }

Mat permute_subsystems(const Mat& m, const Dims& dims, const std::vector<int>& perm) {
    const int n = static_cast<int>(dims.size());
    if (static_cast<int>(perm.size()) != n) throw DimensionError("permutation length mismatch");
    const int total = dims_product(dims);
    if (m.rows() != total) throw DimensionError("permute: dims do not match operator");
    Dims newdims(n);
    for (int k = 0; k < n; ++k) newdims[k] = dims[perm[k]];
    std::vector<int> oldstride(n);
    int s = 1;
    for (int i = n - 1; i >= 0; --i) {
        oldstride[i] = s;
        s *= dims[i];
    }
    std::vector<int> map(total);
    std::vector<int> digits(n);
    for (int flat = 0; flat < total; ++flat) {
        int r = flat;
        for (int k = n - 1; k >= 0; --k) {
            digits[k] = r % newdims[k];
            r /= newdims[k];
        }
        int old = 0;
        for (int k = 0; k < n; ++k) old += digits[k] * oldstride[perm[k]];
        map[flat] = old;
    }
    Mat out(total, total);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j) out(i, j) = m(map[i], map[j]);
    return out;
}

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_defect(const Mat& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eig eig_hermitian(const Mat& m) {
    if (m.rows() != m.cols()) throw DimensionError("eig: operator must be square");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
    if (es.info() != Eigen::Success) throw SolverError("Hermitian eigensolver did not converge");
    const Eigen::Index n = m.rows();
    Eig e;
    e.values = es.eigenvalues().reverse();
    e.vectors = es.eigenvectors().rowwise().reverse();
    if (n > 0) {
        double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        double resid = (e.vectors * e.values.cast<cd>().asDiagonal() * e.vectors.adjoint() - hermitian_part(m))
                           .cwiseAbs()
                           .maxCoeff();
        if (resid > 1e-9 * scale * std::max<double>(1.0, static_cast<double>(n)))
            throw SolverError("eigen-decomposition residual too large: " + std::to_string(resid));
    }
    return e;
}

Mat from_spectrum(const Eig& e, const std::function<double(double)>& f) {
    RVec fv = e.values.unaryExpr(f);
    return e.vectors * fv.cast<cd>().asDiagonal() * e.vectors.adjoint();
}

Mat apply_spectral(const Mat& m, const std::function<double(double)>& f) { return from_spectrum(eig_hermitian(m), f); }

double support_cutoff(const RVec& eigvals, double rank_tol) {
    if (eigvals.size() == 0) return 0.0;
    double top = eigvals.cwiseAbs().maxCoeff();
    return rank_tol * top;
}

Mat support_projector(const Mat& m, double rank_tol) {
    Eig e = eig_hermitian(m);
    double cut = support_cutoff(e.values, rank_tol);
    return from_spectrum(e, [cut](double x) { return x > cut ? 1.0 : 0.0; });
}

Mat support_power(const Mat& m, double p, double rank_tol) {
    Eig e = eig_hermitian(m);
    double cut = support_cutoff(e.values, rank_tol);
    return from_spectrum(e, [cut, p](double x) { return x > cut ? std::pow(x, p) : 0.0; });
}

Mat pinv_sqrt(const Mat& m, double rank_tol) { return support_power(m, -0.5, rank_tol); }

Mat sqrt_psd(const Mat& m) {
    return apply_spectral(m, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

int numerical_rank(const Mat& m, double rank_tol) {
    Eig e = eig_hermitian(m);
    double cut = support_cutoff(e.values, rank_tol);
    int r = 0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        if (e.values(i) > cut) ++r;
    return r;
}

double op_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    return eig_hermitian(m).values.cwiseAbs().maxCoeff();
}

double trace_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    return eig_hermitian(m).values.cwiseAbs().sum();
}

double max_eigenvalue(const Mat& m) { return eig_hermitian(m).values(0); }
double min_eigenvalue(const Mat& m) {
    RVec v = eig_hermitian(m).values;
    return v(v.size() - 1);
}

double real_trace(const Mat& m) { return m.trace().real(); }

Mat embed_with_pure_ancilla(const Mat& m, const Dims& dims, int d_anc, int position) {
    if (d_anc < 1) throw DimensionError("ancilla dimension must be >= 1");
    const int n = static_cast<int>(dims.size());
    if (position < 0 || position > n) throw DimensionError("ancilla position out of range");
    Mat withanc = kron(basis_projector(d_anc, 0), m);
    Dims d = dims;
    d.insert(d.begin(), d_anc);
    // ancilla currently in front; move it to `position`
    std::vector<int> perm;
    for (int k = 1; k <= position; ++k) perm.push_back(k);
    perm.push_back(0);
    for (int k = position + 1; k <= n; ++k) perm.push_back(k);
    return permute_subsystems(withanc, d, perm);
}

HermitianOperator embed_with_pure_ancilla(const HermitianOperator& m, int d_anc, int position) {
    Dims d = m.dims();
    Mat e = embed_with_pure_ancilla(m.mat(), d, d_anc, position);
    d.insert(d.begin() + position, d_anc);
    return HermitianOperator(e, d);
}

Mat ket_bra(int d, int i, int j) {
    Mat m = Mat::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

Mat basis_projector(int d, int i) { return ket_bra(d, i, i); }

}  // namespace qthermo
