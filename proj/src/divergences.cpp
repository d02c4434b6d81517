#include "qthermo/divergences.hpp"

#include <cmath>

namespace qthermo {

namespace {

constexpr double kRankTol = 1e-9;
constexpr double kNearOne = 1e-4;

double log2_trace_power(const RVec& ev, double alpha) {
    // log2 sum_i ev_i^alpha over positive eigenvalues, stable for large alpha.
    double top = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) top = std::max(top, ev(i));
    if (top <= 0.0) return -std::numeric_limits<double>::infinity();
    double cut = kRankTol * top;
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cut) s += std::pow(ev(i) / top, alpha);
    return alpha * std::log2(top) + std::log2(s);
}

}  // namespace

bool support_contained(const Mat& rho, const Mat& sigma, double rank_tol) {
    Mat ps = support_projector(sigma, rank_tol);
    Mat comp = Mat::Identity(sigma.rows(), sigma.cols()) - ps;
    double leak = real_trace(comp * rho * comp);
    double scale = std::max(1e-300, std::abs(real_trace(rho)));
    return leak <= 1e-8 * scale;
}

DivergenceValue d_max(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows()) throw DimensionError("d_max: dimension mismatch");
    if (!support_contained(rho, sigma)) return DivergenceValue::inf();
    Mat s = pinv_sqrt(sigma, kRankTol);
    double top = max_eigenvalue(hermitian_part(s * rho * s));
    if (top <= 0) return {-std::numeric_limits<double>::infinity(), false, false};
    return DivergenceValue::finite(std::log2(top));
}

DivergenceValue d_min(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows()) throw DimensionError("d_min: dimension mismatch");
    double t = real_trace(support_projector(rho, kRankTol) * sigma);
    if (t <= 1e-300) return DivergenceValue::inf(false);
    return DivergenceValue::finite(-std::log2(t));
}

double von_neumann_entropy(const Mat& rho) {
    RVec ev = eig_hermitian(rho).values;
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-300) s -= ev(i) * std::log2(ev(i));
    return s;
}

double binary_entropy(double p) {
    auto h = [](double x) { return x > 0 ? -x * std::log2(x) : 0.0; };
    return h(p) + h(1.0 - p);
}

DivergenceValue d_umegaki(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows()) throw DimensionError("d_umegaki: dimension mismatch");
    if (!support_contained(rho, sigma)) return DivergenceValue::inf();
    Eig es = eig_hermitian(sigma);
    double cut = support_cutoff(es.values, kRankTol);
    Mat log_sigma = from_spectrum(es, [cut](double x) { return x > cut ? std::log2(x) : 0.0; });
    double cross = real_trace(rho * log_sigma);
    return DivergenceValue::finite(-von_neumann_entropy(rho) - cross);
}

DivergenceValue d_sandwiched(const Mat& rho, const Mat& sigma, double alpha) {
    if (rho.rows() != sigma.rows()) throw DimensionError("d_sandwiched: dimension mismatch");
    if (!(alpha >= 0.5) || !std::isfinite(alpha))
        throw ValidationError("sandwiched Renyi order must lie in [1/2,1) or (1,inf)");
    if (std::abs(alpha - 1.0) < kNearOne) return d_umegaki(rho, sigma);
    if (alpha > 1.0 && !support_contained(rho, sigma)) return DivergenceValue::inf();
    const double s = (1.0 - alpha) / (2.0 * alpha);
    Mat sp = support_power(sigma, s, kRankTol);
    RVec ev = eig_hermitian(hermitian_part(sp * rho * sp)).values;
    double lq = log2_trace_power(ev, alpha);
    if (!std::isfinite(lq)) return DivergenceValue::inf(false);
    return DivergenceValue::finite(lq / (alpha - 1.0));
}

DivergenceValue d_petz(const Mat& rho, const Mat& sigma, double alpha) {
    if (rho.rows() != sigma.rows()) throw DimensionError("d_petz: dimension mismatch");
    if (!(alpha >= 0.0 && alpha <= 2.0)) throw ValidationError("Petz Renyi order must lie in [0,1) or (1,2]");
    if (std::abs(alpha - 1.0) < kNearOne) return d_umegaki(rho, sigma);
    if (alpha == 0.0) return d_min(rho, sigma);
    if (alpha > 1.0 && !support_contained(rho, sigma)) return DivergenceValue::inf();
    Mat ra = support_power(rho, alpha, kRankTol);
    Mat sb = support_power(sigma, 1.0 - alpha, kRankTol);
    double q = real_trace(ra * sb);
    if (q <= 1e-300) return DivergenceValue::inf(false);
    return DivergenceValue::finite(std::log2(q) / (alpha - 1.0));
}

}  // namespace qthermo
