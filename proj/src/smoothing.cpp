#include "qthermo/smoothing.hpp"

#include <cmath>
#include <limits>

namespace qthermo {

std::string to_string(SmoothedKind k) {
    switch (k) {
        case SmoothedKind::d_min: return "d_min";
        case SmoothedKind::i_min_down: return "i_min_down";
        case SmoothedKind::h_max_up: return "h_max_up";
        case SmoothedKind::i_max_up: return "i_max_up";
        case SmoothedKind::h_min_down: return "h_min_down";
        case SmoothedKind::i_max_down: return "i_max_down";
    }
    return "?";
}

namespace {

void check_eps(double eps, bool allow_one) {
    if (!(eps >= 0.0) || eps > 1.0 || (!allow_one && eps >= 1.0))
        throw ValidationError(allow_one ? "eps must lie in [0,1]" : "eps must lie in [0,1)");
}

void require_ok(const SdpSolution& s, const char* what) {
    if (!s.ok())
        throw SolverError(std::string(what) + ": SDP " + to_string(s.status) + " (" + s.message + ", gap " +
                          std::to_string(s.gap) + ")");
}

// min t s.t. t 1_B >= Tr_A[(W^1/2 (x) 1) L (W^1/2 (x) 1)], 0 <= L <= 1, Tr[L rho] >= 1 - eps
SmoothedValue hypothesis_program(const Mat& rho, const Mat& weight, int dA, int dB, double eps,
                                 const SmoothingOptions& opt) {
    const int d = dA * dB;
    Mat w = kron(sqrt_psd(weight), Mat::Identity(dB, dB));
    if (eps == 0.0) {
        // Tr[L rho] = 1 forces L = 1 on the support of rho; the kernel block only adds to t.
        SmoothedValue out;
        out.witness.lambda = support_projector(rho, 1e-9);
        out.witness.t = max_eigenvalue(trace_first(hermitian_part(w * out.witness.lambda * w), dA, dB));
        out.solver.status = SdpStatus::optimal;
        out.solver.primal_value = out.solver.dual_value = out.witness.t;
        out.solver.message = "closed form";
        return out;
    }
    SdpProblem p;
    auto L = p.add_hermitian(d);
    int t = p.add_scalar();
    p.add_objective(t, 1.0);
    int l0 = p.add_lmi(d);
    p.lmi_identity(l0, L);
    int l1 = p.add_lmi(d);
    p.lmi_constant(l1, Mat::Identity(d, d));
    p.lmi_identity(l1, L, -1.0);
    int l2 = p.add_lmi(dB);
    p.lmi_scalar(l2, t, Mat::Identity(dB, dB));
    p.lmi_map(l2, L, [&](const Mat& e) { return Mat(-trace_first(w * e * w, dA, dB)); });
    SdpProblem::LinearExpr tr{-(1.0 - eps), {}};
    SdpProblem::add_trace_term(tr, L, rho);
    p.add_inequality(tr);

    SmoothedValue out;
    out.eps = eps;
    out.solver = sdp_solve(p, opt.sdp);
    out.solves = 1;
    require_ok(out.solver, "hypothesis-testing program");
    out.witness.lambda = p.value(L, out.solver.x);
    out.witness.t = out.solver.x[t];
    return out;
}

}  // namespace

SmoothedValue d_min_smoothed(const Mat& rho, const Mat& sigma, double eps, const SmoothingOptions& opt) {
    check_eps(eps, true);
    if (rho.rows() != sigma.rows()) throw DimensionError("d_min_smoothed: dimension mismatch");
    SmoothedValue out;
    out.kind = SmoothedKind::d_min;
    out.eps = eps;
    if (eps >= 1.0) {
        // L = 0 is admissible
        out.value = std::numeric_limits<double>::infinity();
        out.infinite = true;
        out.witness.lambda = Mat::Zero(rho.rows(), rho.cols());
        return out;
    }
    const int d = static_cast<int>(rho.rows());
    if (eps == 0.0) {
        out.witness.lambda = support_projector(rho, 1e-9);
        double v = real_trace(out.witness.lambda * sigma);
        out.solver.status = SdpStatus::optimal;
        out.solver.primal_value = out.solver.dual_value = v;
        out.solver.message = "closed form";
        out.infinite = v <= 1e-14;
        out.value = out.infinite ? std::numeric_limits<double>::infinity() : -std::log2(v);
        return out;
    }
    SdpProblem p;
    auto L = p.add_hermitian(d);
    p.add_objective(L, sigma);
    int l0 = p.add_lmi(d);
    p.lmi_identity(l0, L);
    int l1 = p.add_lmi(d);
    p.lmi_constant(l1, Mat::Identity(d, d));
    p.lmi_identity(l1, L, -1.0);
    SdpProblem::LinearExpr tr{-(1.0 - eps), {}};
    SdpProblem::add_trace_term(tr, L, rho);
    p.add_inequality(tr);
    out.solver = sdp_solve(p, opt.sdp);
    out.solves = 1;
    require_ok(out.solver, "d_min_smoothed");
    out.witness.lambda = p.value(L, out.solver.x);
    const double v = out.solver.primal_value;
    if (v <= 1e-14) {
        out.value = std::numeric_limits<double>::infinity();
        out.infinite = true;
    } else {
        out.value = -std::log2(v);
    }
    return out;
}

SmoothedValue i_min_down_smoothed(const ThermoState& ts, double eps, const SmoothingOptions& opt) {
    check_eps(eps, false);
    SmoothedValue out = hypothesis_program(ts.rho().mat(), ts.gamma().mat(), ts.dA(), ts.dB(), eps, opt);
    out.kind = SmoothedKind::i_min_down;
    out.value = -std::log2(out.witness.t);
    return out;
}

SmoothedValue h_max_cond_smoothed(const Mat& rho, int dA, int dB, double eps, const SmoothingOptions& opt) {
    check_eps(eps, false);
    if (rho.rows() != static_cast<Eigen::Index>(dA) * dB) throw DimensionError("h_max_cond_smoothed: dims");
    SmoothedValue out = hypothesis_program(rho, Mat::Identity(dA, dA), dA, dB, eps, opt);
    out.kind = SmoothedKind::h_max_up;
    out.value = std::log2(out.witness.t);
    return out;
}

SmoothedWitness max_up_ball_distance(const ThermoState& ts, double t, const SmoothingOptions& opt) {
    const int dA = ts.dA(), dB = ts.dB(), d = dA * dB;
    const Mat& rho = ts.rho().mat();
    const Mat& gamma = ts.gamma().mat();
    SdpProblem p;
    auto tau = p.add_hermitian(d);
    auto sig = p.add_hermitian(dB);
    auto nn = p.add_hermitian(d);
    // ball distance = 1 - Tr tau + Tr N once P = rho - tau + N is eliminated
    p.add_objective(nn, Mat::Identity(d, d));
    p.add_objective(tau, -Mat::Identity(d, d));
    int l;
    l = p.add_lmi(d);
    p.lmi_identity(l, tau);
    l = p.add_lmi(d);
    p.lmi_identity(l, nn);
    l = p.add_lmi(d);
    p.lmi_constant(l, rho);
    p.lmi_identity(l, tau, -1.0);
    p.lmi_identity(l, nn);
    l = p.add_lmi(d);
    p.lmi_map(l, sig, [&](const Mat& e) { return Mat(t * kron(gamma, e)); });
    p.lmi_identity(l, tau, -1.0);
    l = p.add_lmi(dB);
    p.lmi_identity(l, sig);
    p.lmi_map(l, tau, [&](const Mat& e) { return Mat(-trace_first(e, dA, dB)); });
    SdpProblem::LinearExpr trt{1.0, {}};
    SdpProblem::add_trace_term(trt, tau, Mat::Identity(d, d), -1.0);
    p.add_inequality(trt);
    SdpProblem::LinearExpr trs{1.0, {}};
    SdpProblem::add_trace_term(trs, sig, Mat::Identity(dB, dB), -1.0);
    p.add_inequality(trs);

    SdpSolution s = sdp_solve(p, opt.sdp);
    require_ok(s, "max-mutual-information ball program");
    SmoothedWitness w;
    w.t = t;
    w.tau = p.value(tau, s.x);
    w.sigma = p.value(sig, s.x);
    w.ball_distance = 1.0 + s.primal_value;
    return w;
}

SmoothedValue i_max_up_smoothed(const ThermoState& ts, double eps, const SmoothingOptions& opt) {
    check_eps(eps, false);
    MutualInfoValue top = i_max_up(ts);
    SmoothedValue out;
    out.kind = SmoothedKind::i_max_up;
    out.eps = eps;
    if (eps == 0.0) {
        // the ball is {rho}; the best sigma_B is rho_B
        out.value = out.bracket_lo = out.bracket_hi = top.value;
        out.witness.t = std::exp2(top.value);
        out.witness.tau = ts.rho().mat();
        out.witness.sigma = ts.rho_B();
        return out;
    }
    double lo = opt.bracket_floor;
    double hi = top.value + 1.0;
    auto feasible = [&](double logt, SmoothedWitness& w) {
        w = max_up_ball_distance(ts, std::exp2(logt), opt);
        ++out.solves;
        return w.ball_distance <= eps + opt.ball_slack;
    };
    SmoothedWitness whi, wlo;
    if (!feasible(hi, whi)) throw SolverError("i_max_up_smoothed: upper bracket is not feasible");
    if (feasible(lo, wlo)) throw SolverError("i_max_up_smoothed: lower bracket is already feasible");
    while (hi - lo > opt.bisection_tol) {
        double mid = 0.5 * (lo + hi);
        SmoothedWitness w;
        if (feasible(mid, w)) {
            hi = mid;
            whi = w;
        } else {
            lo = mid;
        }
    }
    out.value = hi;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.witness = whi;
    return out;
}

SmoothedValue h_min_cond_smoothed(const Mat& rho, int dA, int dB, double eps, const SmoothingOptions& opt) {
    if (rho.rows() != static_cast<Eigen::Index>(dA) * dB) throw DimensionError("h_min_cond_smoothed: dims");
    ThermoState ts(DensityOperator(rho, {dA, dB}), uniform_state(dA));
    SmoothedValue v = i_max_up_smoothed(ts, eps, opt);
    const double la = std::log2(static_cast<double>(dA));
    v.kind = SmoothedKind::h_min_down;
    v.value = la - v.value;
    const double lo = v.bracket_lo;
    v.bracket_lo = la - v.bracket_hi;
    v.bracket_hi = la - lo;
    return v;
}

SmoothedValue i_max_down_smoothed(const ThermoState& ts, double eps, const SmoothingOptions& opt) {
    check_eps(eps, false);
    const int dA = ts.dA(), dB = ts.dB(), d = dA * dB;
    const Mat& rho = ts.rho().mat();
    const Mat& gamma = ts.gamma().mat();
    if (eps == 0.0) {
        MutualInfoValue v = i_max_down(ts, opt.sdp);
        SmoothedValue out;
        out.kind = SmoothedKind::i_max_down;
        out.value = v.value;
        out.solves = 1;
        out.witness.tau = rho;
        out.solver.status = SdpStatus::optimal;
        out.solver.primal_value = std::exp2(v.value);
        return out;
    }
    SdpProblem p;
    auto x = p.add_hermitian(dB);
    auto tau = p.add_hermitian(d);
    auto nn = p.add_hermitian(d);
    p.add_objective(x, Mat::Identity(dB, dB));
    int l;
    l = p.add_lmi(d);
    p.lmi_map(l, x, [&](const Mat& e) { return Mat(kron(gamma, e)); });
    p.lmi_identity(l, tau, -1.0);
    l = p.add_lmi(d);
    p.lmi_identity(l, tau);
    l = p.add_lmi(d);
    p.lmi_identity(l, nn);
    l = p.add_lmi(d);
    p.lmi_constant(l, rho);
    p.lmi_identity(l, tau, -1.0);
    p.lmi_identity(l, nn);
    SdpProblem::LinearExpr trt{1.0, {}};
    SdpProblem::add_trace_term(trt, tau, Mat::Identity(d, d), -1.0);
    p.add_inequality(trt);
    // eps - (1 - Tr tau + Tr N) >= 0
    SdpProblem::LinearExpr ball{eps - 1.0, {}};
    SdpProblem::add_trace_term(ball, tau, Mat::Identity(d, d), 1.0);
    SdpProblem::add_trace_term(ball, nn, Mat::Identity(d, d), -1.0);
    p.add_inequality(ball);

    SmoothedValue out;
    out.kind = SmoothedKind::i_max_down;
    out.eps = eps;
    out.solver = sdp_solve(p, opt.sdp);
    out.solves = 1;
    require_ok(out.solver, "i_max_down_smoothed");
    out.witness.x = p.value(x, out.solver.x);
    out.witness.tau = p.value(tau, out.solver.x);
    out.witness.ball_distance = gen_trace_distance(rho, out.witness.tau);
    out.value = std::log2(out.solver.primal_value);
    return out;
}

MutualInfoValue i_max_down(const ThermoState& ts, const SdpOptions& opt) {
    const int dA = ts.dA(), dB = ts.dB(), d = dA * dB;
    const Mat& gamma = ts.gamma().mat();
    SdpProblem p;
    auto x = p.add_hermitian(dB);
    p.add_objective(x, Mat::Identity(dB, dB));
    int l = p.add_lmi(d);
    p.lmi_map(l, x, [&](const Mat& e) { return Mat(kron(gamma, e)); });
    p.lmi_constant(l, -ts.rho().mat());
    SdpSolution s = sdp_solve(p, opt);
    require_ok(s, "i_max_down");
    MutualInfoValue out;
    out.variant = InfoVariant::max_down;
    out.value = std::log2(s.primal_value);
    out.iterations = s.iterations;
    return out;
}

}  // namespace qthermo
