#include "qthermo/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qthermo {

namespace {

Mat clip_spectrum(const Mat& m, double lo, double hi) {
    return apply_spectral(hermitian_part(m), [&](double x) { return std::clamp(x, lo, hi); });
}

int checked_battery(double want, int cap, const char* what) {
    if (!(want <= static_cast<double>(cap)))
        throw ValidationError(std::string(what) + ": battery dimension exceeds max_battery_dim");
    return static_cast<int>(want);
}

// tau >= 0, tau_B <= sigma, Tr sigma = 1, everything inside supp(1 (x) sigma).
void clean_preparation_witness(Mat& tau, Mat& sigma, int dA, int dB) {
    tau = clip_spectrum(tau, 0.0, INFINITY);
    sigma = clip_spectrum(sigma, 0.0, INFINITY);
    const Mat proj = support_projector(sigma);
    const Mat lift = kron(Mat::Identity(dA, dA), proj);
    tau = hermitian_part(lift * tau * lift);
    double deficit = std::max(0.0, -min_eigenvalue(proj * (sigma - trace_first(tau, dA, dB)) * proj));
    if (deficit > 0.0) sigma += (deficit + 1e-12) * proj;
    const double tr = real_trace(sigma);
    if (tr > 1.0) {
        sigma /= tr;
        tau /= tr;
    } else {
        sigma += (1.0 - tr) / real_trace(proj) * proj;
    }
}

ProtocolStage make_stage(ChoiOperator ch, const Mat& g_in, const Mat& g_out, std::string label) {
    ProtocolStage s;
    s.operation = ThermoOperation(std::move(ch), DensityOperator(g_in), DensityOperator(g_out));
    s.label = std::move(label);
    return s;
}

}  // namespace

double Protocol::ideal_work_bits() const {
    double w = 0.0;
    for (const auto& s : stages) w += s.ideal_work_bits;
    return w;
}

double Protocol::integer_work_bits() const {
    double w = 0.0;
    for (const auto& s : stages) w += s.integer_work_bits;
    return w;
}

int Protocol::d_battery_in() const {
    int d = 1;
    for (const auto& s : stages) d *= s.d_battery_in;
    return d;
}

int Protocol::d_battery_out() const {
    int d = 1;
    for (const auto& s : stages) d *= s.d_battery_out;
    return d;
}

const ThermoOperation& Protocol::operation() const {
    if (stages.size() != 1) throw ValidationError("operation(): protocol has " + std::to_string(stages.size()) + " stages");
    return stages.front().operation;
}

Protocol build_preparation_protocol(const ThermoState& ts, double eps, const ProtocolOptions& opt) {
    const int dA = ts.dA(), dB = ts.dB();
    const Mat& gamma = ts.gamma().mat();
    SmoothedValue v = i_max_up_smoothed(ts, eps, opt.smoothing);
    Mat tau = v.witness.tau, sigma = v.witness.sigma;
    clean_preparation_witness(tau, sigma, dA, dB);

    const Mat whiten = kron(pinv_sqrt(gamma), pinv_sqrt(sigma));
    const double t = max_eigenvalue(hermitian_part(whiten * tau * whiten));
    if (!(t > 0.0)) throw SolverError("build_preparation_protocol: degenerate witness");

    const int a1 = checked_battery(std::max(2.0, std::ceil(1.0 + 1.0 / t)), opt.max_battery_dim, "preparation");
    double a0d = std::max(1.0, std::ceil(a1 * t / dA - 1e-9));
    if (a0d * dA < 2.0) a0d = 2.0;
    const int a0 = checked_battery(a0d, opt.max_battery_dim, "preparation");
    const int din = a0 * dA;

    const Mat e0_out = basis_projector(a1, 0);
    const Mat rest_out = (Mat::Identity(a1, a1) - e0_out) / double(a1 - 1);
    const Mat gs = kron(gamma, sigma);
    const Mat target_block = kron(e0_out, tau) + kron(rest_out, kron(gamma, sigma) - kron(gamma, trace_first(tau, dA, dB)));
    const Mat other_block = (double(din) * kron(Mat::Identity(a1, a1) / double(a1), gs) - target_block) / double(din - 1);

    const Mat e0_in = basis_projector(din, 0);
    Mat j = kron(e0_in, target_block) + kron(Mat::Identity(din, din) - e0_in, other_block);
    ChoiOperator ch(std::move(j), {din, 1}, {a1 * dA, dB});

    const Mat pi_a = uniform_state(dA).mat();
    ProtocolStage s = make_stage(std::move(ch), uniform_state(din).mat(),
                                 kron(uniform_state(a1).mat(), gamma), "preparation");
    s.d_battery_in = a0;
    s.d_battery_out = a1;
    s.dA_in = dA;
    s.dB_in = 1;
    s.dA_out = dA;
    s.dB_out = dB;
    s.gamma_system_in = pi_a;
    s.gamma_system_out = gamma;
    s.ideal_work_bits = std::log2(t) - std::log2(double(dA));
    s.integer_work_bits = std::log2(double(a0)) - std::log2(double(a1));
    Protocol p;
    p.stages.push_back(std::move(s));
    p.target_error = eps;
    return p;
}

Protocol build_erasure_protocol(const ThermoState& ts, double eps, const ProtocolOptions& opt) {
    const int dA = ts.dA(), dB = ts.dB();
    const Mat& gamma = ts.gamma().mat();
    SmoothedValue v = i_min_down_smoothed(ts, eps, opt.smoothing);
    const Mat lambda = clip_spectrum(v.witness.lambda, 0.0, 1.0);

    const Mat gh = kron(sqrt_psd(gamma), Mat::Identity(dB, dB));
    const Mat x = hermitian_part(trace_first(gh * lambda * gh, dA, dB));
    const double xn = max_eigenvalue(x);
    if (!(xn > 0.0)) throw SolverError("build_erasure_protocol: degenerate witness");

    const int a1 = opt.erasure_battery_out;
    if (a1 < 1 || a1 * dA < 2) throw ValidationError("build_erasure_protocol: output battery too small");
    const int a0 = checked_battery(std::max(2.0, std::ceil(a1 * dA * xn - 1e-9)), opt.max_battery_dim, "erasure");
    const double c = double(a0) / double(a1 * dA);

    const int din = a0 * dA * dB;
    const int dout = a1 * dA;
    const Mat eff = kron(basis_projector(a0, 0), lambda) +
                    kron(basis_projector(a0, 1), kron(Mat::Identity(dA, dA), c * Mat::Identity(dB, dB) - x));
    const Mat p0 = basis_projector(dout, 0);
    const Mat rest = (Mat::Identity(dout, dout) - p0) / double(dout - 1);
    Mat j = kron(Mat(eff.transpose()), p0) + kron(Mat((Mat::Identity(din, din) - eff).transpose()), rest);
    ChoiOperator ch(std::move(j), {a0 * dA, dB}, {dout, 1});

    ProtocolStage s = make_stage(std::move(ch), kron(uniform_state(a0).mat(), gamma), uniform_state(dout).mat(),
                                 "erasure");
    s.d_battery_in = a0;
    s.d_battery_out = a1;
    s.dA_in = dA;
    s.dB_in = dB;
    s.dA_out = dA;
    s.dB_out = 1;
    s.gamma_system_in = gamma;
    s.gamma_system_out = uniform_state(dA).mat();
    s.ideal_work_bits = std::log2(double(dA) * xn);
    s.integer_work_bits = std::log2(double(a0)) - std::log2(double(a1));
    Protocol p;
    p.stages.push_back(std::move(s));
    p.target_error = eps;
    return p;
}

Protocol identity_protocol(const DensityOperator& gamma, int dB) {
    const int dA = gamma.dim();
    ProtocolStage s = make_stage(identity_channel({dA, dB}), gamma.mat(), gamma.mat(), "identity");
    s.dA_in = s.dA_out = dA;
    s.dB_in = s.dB_out = dB;
    s.gamma_system_in = s.gamma_system_out = gamma.mat();
    Protocol p;
    p.stages.push_back(std::move(s));
    return p;
}

Protocol compose_protocols(const Protocol& p1, const Protocol& p2) {
    if (p1.stages.empty()) return p2;
    if (p2.stages.empty()) return p1;
    const ProtocolStage& last = p1.stages.back();
    const ProtocolStage& first = p2.stages.front();
    if (last.dA_out != first.dA_in || last.dB_out != first.dB_in)
        throw DimensionError("compose_protocols: output system of the first does not match input of the second");
    if ((last.gamma_system_out - first.gamma_system_in).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError("compose_protocols: Gibbs states at the junction differ");
    Protocol p = p1;
    p.stages.insert(p.stages.end(), p2.stages.begin(), p2.stages.end());
    p.target_error = p1.target_error + p2.target_error;
    return p;
}

Protocol corrupt_protocol(const Protocol& p, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("corrupt_protocol: weight must lie in [0,1]");
    Protocol q = p;
    for (auto& s : q.stages) {
        s.operation.channel = depolarize(s.operation.channel, w);
        s.label += "+depolarized";
    }
    return q;
}

Mat run_protocol(const Protocol& p, const Mat& input) {
    if (p.stages.empty()) return input;
    Mat state = input;
    Dims dims{p.stages.front().dA_in, p.stages.front().dB_in};
    if (state.rows() != dims_product(dims) || state.cols() != state.rows())
        throw DimensionError("run_protocol: input does not match the first stage");
    for (const auto& s : p.stages) {
        if (dims[0] != s.dA_in || dims[1] != s.dB_in)
            throw DimensionError("run_protocol: stage '" + s.label + "' does not match the current system");
        state = kron(basis_projector(s.d_battery_in, 0), state);
        dims.insert(dims.begin(), s.d_battery_in);
        state = apply_on_factors(s.operation.channel, state, dims, 0, 3);
        Dims next{s.d_battery_out, s.dA_out, s.dB_out};
        next.insert(next.end(), dims.begin() + 3, dims.end());
        // move the output battery behind the earlier ones
        std::vector<int> perm(next.size());
        std::iota(perm.begin(), perm.end() - 1, 1);
        perm.back() = 0;
        state = permute_subsystems(state, next, perm);
        dims.clear();
        for (int k : perm) dims.push_back(next[k]);
    }
    return state;
}

VerificationReport verify_protocol(const Protocol& p, const ThermoState& input, const DensityOperator& target,
                                   double eps, double cov_tol, double err_slack) {
    VerificationReport r;
    for (const auto& s : p.stages)
        r.covariance_residual = std::max(r.covariance_residual, is_cond_thermal_covariant(s.operation, cov_tol).residual);
    const Mat out = run_protocol(p, input.rho().mat());
    const int db = p.d_battery_out();
    if (out.rows() != target.dim() * db) throw DimensionError("verify_protocol: target dimension mismatch");
    r.achieved_error = gen_trace_distance(out, kron(target.mat(), basis_projector(db, 0)));
    r.work_bits = p.ideal_work_bits();
    r.integer_work_bits = p.integer_work_bits();
    r.pass = r.covariance_residual <= cov_tol && r.achieved_error <= eps + err_slack;
    return r;
}

}  // namespace qthermo
