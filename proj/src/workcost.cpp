#include "qthermo/workcost.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace qthermo {

namespace {

void check_beta(double beta_b) {
    if (!(beta_b > 0.0) || !std::isfinite(beta_b)) throw ValidationError("beta_b must be positive and finite");
}

bool is_diagonal(const Mat& m, double tol = 1e-12) {
    Mat off = m;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() <= tol;
}

bool same_thermo_state(const ThermoState& a, const ThermoState& b) {
    if (a.dA() != b.dA() || a.dB() != b.dB()) return false;
    return (a.rho().mat() - b.rho().mat()).cwiseAbs().maxCoeff() <= 1e-12 &&
           (a.gamma().mat() - b.gamma().mat()).cwiseAbs().maxCoeff() <= 1e-12;
}

// Runs body(i) for i in [0, n) on up to `workers` threads; body must only touch slot i.
void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void record_solver(WorkReport& r, const SmoothedValue& v) {
    r.diagnostics["sdp_solves"] = v.solves;
    if (v.eps > 0.0) {
        r.diagnostics["bracket_lo"] = v.bracket_lo;
        r.diagnostics["bracket_hi"] = v.bracket_hi;
    }
}

// rho (x) |0><0| on A A' B with gamma (x) pi_A'.
ThermoState embed_pure_ancilla(const ThermoState& ts, int d) {
    Mat rho = embed_with_pure_ancilla(ts.rho().mat(), {ts.dA(), ts.dB()}, d, 1);
    return ThermoState(rho, kron(ts.gamma().mat(), uniform_state(d).mat()));
}

}  // namespace

std::string to_string(WorkMethod m) {
    switch (m) {
        case WorkMethod::closed_form: return "closed_form";
        case WorkMethod::sdp: return "sdp";
        case WorkMethod::protocol: return "protocol";
    }
    return "?";
}

WorkDirection parse_work_direction(const std::string& s) {
    if (s == "prep") return WorkDirection::prep;
    if (s == "eras") return WorkDirection::eras;
    throw ValidationError("unknown work direction '" + s + "' (expected prep or eras)");
}

WorkReport w_prep_oneshot(const ThermoState& ts, double eps, double beta_b, const SmoothingOptions& opt) {
    check_beta(beta_b);
    SmoothedValue v = i_max_up_smoothed(ts, eps, opt);
    WorkReport r;
    r.beta_b = beta_b;
    r.epsilon = eps;
    r.method = eps == 0.0 ? WorkMethod::closed_form : WorkMethod::sdp;
    r.work_bits = (v.value - std::log2(double(ts.dA()))) / beta_b;
    r.diagnostics["i_max_up_smoothed"] = v.value;
    record_solver(r, v);
    return r;
}

WorkReport w_eras_oneshot(const ThermoState& ts, double eps, double beta_b, const SmoothingOptions& opt) {
    check_beta(beta_b);
    SmoothedValue v = i_min_down_smoothed(ts, eps, opt);
    WorkReport r;
    r.beta_b = beta_b;
    r.epsilon = eps;
    r.method = eps == 0.0 ? WorkMethod::closed_form : WorkMethod::sdp;
    r.work_bits = (std::log2(double(ts.dA())) - v.value) / beta_b;
    r.diagnostics["i_min_down_smoothed"] = v.value;
    record_solver(r, v);
    return r;
}

WorkReport w_oneshot_uniform(const Mat& rho, int dA, int dB, WorkDirection dir, double eps, double beta_b,
                             const SmoothingOptions& opt) {
    check_beta(beta_b);
    WorkReport r;
    r.beta_b = beta_b;
    r.epsilon = eps;
    r.method = eps == 0.0 ? WorkMethod::closed_form : WorkMethod::sdp;
    SmoothedValue v;
    if (dir == WorkDirection::prep) {
        v = h_min_cond_smoothed(rho, dA, dB, eps, opt);
        r.work_bits = -v.value / beta_b;
        r.diagnostics["h_min_cond_smoothed"] = v.value;
    } else {
        v = h_max_cond_smoothed(rho, dA, dB, eps, opt);
        r.work_bits = v.value / beta_b;
        r.diagnostics["h_max_cond_smoothed"] = v.value;
    }
    record_solver(r, v);
    return r;
}

WorkReport w_protocol(const ThermoState& ts, WorkDirection dir, double eps, double beta_b, const ProtocolOptions& opt) {
    check_beta(beta_b);
    Protocol p;
    VerificationReport vr;
    if (dir == WorkDirection::prep) {
        p = build_preparation_protocol(ts, eps, opt);
        ThermoState start(basis_projector(ts.dA(), 0), uniform_state(ts.dA()).mat());
        vr = verify_protocol(p, start, ts.rho(), eps);
    } else {
        p = build_erasure_protocol(ts, eps, opt);
        vr = verify_protocol(p, ts, DensityOperator(basis_projector(ts.dA(), 0)), eps);
    }
    WorkReport r;
    r.beta_b = beta_b;
    r.epsilon = eps;
    r.method = WorkMethod::protocol;
    r.work_bits = p.ideal_work_bits() / beta_b;
    r.diagnostics["integer_work_bits"] = p.integer_work_bits() / beta_b;
    r.diagnostics["achieved_error"] = vr.achieved_error;
    r.diagnostics["covariance_residual"] = vr.covariance_residual;
    r.diagnostics["d_battery_in"] = p.d_battery_in();
    r.diagnostics["d_battery_out"] = p.d_battery_out();
    r.diagnostics["pass"] = vr.pass ? 1.0 : 0.0;
    return r;
}

Protocol conversion_protocol(const ThermoState& from, const ThermoState& to, double eps, const ProtocolOptions& opt) {
    if (same_thermo_state(from, to)) {
        Protocol p = identity_protocol(from.gamma(), from.dB());
        p.target_error = eps;
        return p;
    }
    return compose_protocols(build_erasure_protocol(from, 0.5 * eps, opt), build_preparation_protocol(to, 0.5 * eps, opt));
}

WorkReport w_convert_oneshot(const ThermoState& from, const ThermoState& to, double eps, double beta_b,
                             const ProtocolOptions& opt) {
    check_beta(beta_b);
    Protocol p = conversion_protocol(from, to, eps, opt);
    VerificationReport vr = verify_protocol(p, from, to.rho(), eps);
    WorkReport r;
    r.beta_b = beta_b;
    r.epsilon = eps;
    r.method = WorkMethod::protocol;
    r.work_bits = p.ideal_work_bits() / beta_b;
    r.diagnostics["integer_work_bits"] = p.integer_work_bits() / beta_b;
    r.diagnostics["achieved_error"] = vr.achieved_error;
    r.diagnostics["covariance_residual"] = vr.covariance_residual;
    r.diagnostics["stages"] = double(p.stages.size());
    r.diagnostics["pass"] = vr.pass ? 1.0 : 0.0;
    return r;
}

WorkReport w_asymptotic(const ThermoState& from, const ThermoState& to, double beta_b) {
    check_beta(beta_b);
    const double i_from = i_umegaki(from).value;
    const double i_to = i_umegaki(to).value;
    WorkReport r;
    r.beta_b = beta_b;
    r.method = WorkMethod::closed_form;
    r.work_bits = (i_to - i_from) / beta_b;
    r.diagnostics["i_from"] = i_from;
    r.diagnostics["i_to"] = i_to;
    return r;
}

double rate_asymptotic(const ThermoState& from, const ThermoState& to) {
    const double num = i_umegaki(from).value;
    const double den = i_umegaki(to).value;
    if (den <= 1e-12) return std::numeric_limits<double>::infinity();
    return num / den;
}

double w_asymptotic_helmholtz(const ThermoState& from, const Hamiltonian& h_from, const ThermoState& to,
                              const Hamiltonian& h_to, double beta_b) {
    check_beta(beta_b);
    const double f_from = helmholtz_cond(from, h_from, beta_b) - helmholtz(from.gamma().mat(), h_from, beta_b);
    const double f_to = helmholtz_cond(to, h_to, beta_b) - helmholtz(to.gamma().mat(), h_to, beta_b);
    return f_to - f_from;
}

ThermoState thermo_power(const ThermoState& ts, int n) {
    if (n < 1) throw ValidationError("thermo_power: n must be positive");
    const int dA = ts.dA(), dB = ts.dB();
    Mat rho = ts.rho().mat(), gamma = ts.gamma().mat();
    Dims dims{dA, dB};
    for (int k = 1; k < n; ++k) {
        rho = kron(rho, ts.rho().mat());
        gamma = kron(gamma, ts.gamma().mat());
        dims.push_back(dA);
        dims.push_back(dB);
    }
    std::vector<int> perm;
    for (int k = 0; k < n; ++k) perm.push_back(2 * k);
    for (int k = 0; k < n; ++k) perm.push_back(2 * k + 1);
    return ThermoState(permute_subsystems(rho, dims, perm), gamma);
}

std::vector<AepPoint> aep_experiment(const ThermoState& ts, double eps, double eps_prime, int n_max,
                                     const AepOptions& opt) {
    if (n_max < 1) throw ValidationError("aep_experiment: n_max must be positive");
    if (!(eps >= 0.0) || !(eps_prime >= 0.0) || eps + eps_prime >= 1.0)
        throw ValidationError("aep_experiment: need eps, eps' >= 0 and eps + eps' < 1");
    const bool classical =
        opt.classical_fast_path && is_diagonal(ts.rho().mat()) && is_diagonal(ts.gamma().mat());
    const double total = eps + eps_prime;
    const double log_term = eps > 0.0 ? std::log2(2.0 / (eps * eps)) : std::numeric_limits<double>::infinity();
    std::vector<AepPoint> out;
    for (int n = 1; n <= n_max; ++n) {
        AepPoint pt;
        pt.n = n;
        pt.eps = total;
        double value, lower, down_prime;
        if (classical) {
            if (n > opt.max_classical_n) throw DimensionError("aep_experiment: n exceeds the classical limit");
            ClassicalInstance c = classical_power(ts, n);
            value = classical_i_max_up_smoothed(c, total);
            lower = classical_i_max_down_smoothed(c, total);
            down_prime = classical_i_max_down_smoothed(c, eps_prime);
        } else {
            if (std::pow(double(ts.dA() * ts.dB()), n) > opt.max_quantum_dim)
                throw DimensionError("aep_experiment: n-copy dimension exceeds max_quantum_dim");
            ThermoState tn = thermo_power(ts, n);
            value = i_max_up_smoothed(tn, total, opt.smoothing).value;
            lower = i_max_down_smoothed(tn, total, opt.smoothing).value;
            down_prime = i_max_down_smoothed(tn, eps_prime, opt.smoothing).value;
        }
        pt.value_bits = value / n;
        pt.lower_bound = lower / n;
        pt.upper_bound = (down_prime + log_term) / n;
        pt.bounds_hold = lower <= value + opt.bound_slack && value <= down_prime + log_term + opt.bound_slack;
        out.push_back(pt);
    }
    return out;
}

SweepReport entropy_sandwich_sweep(const SweepConfig& cfg) {
    SweepReport rep;
    std::mutex mu;
    auto violate = [&](std::string what, double amount) {
        std::lock_guard<std::mutex> lock(mu);
        rep.violations.push_back({std::move(what), amount});
    };

    std::vector<std::pair<Dims, int>> jobs;
    for (const Dims& d : cfg.dims)
        for (int k = 0; k < cfg.states_per_dims; ++k) jobs.push_back({d, k});
    std::atomic<int> checks{0};
    parallel_for(int(jobs.size()), cfg.workers, [&](int i) {
        const auto& [d, k] = jobs[i];
        Rng rng(cfg.seed * 1000003ULL + std::uint64_t(i));
        const int dim = d[0] * d[1];
        const int rank = 1 + int(rng() % std::uint64_t(dim));
        const Mat rho = random_state(d, rank, rng).mat();
        const double lo = h_min_cond(rho, d[0], d[1]).value;
        const double hi = h_max_cond(rho, d[0], d[1]).value;
        std::vector<std::pair<std::string, double>> mids;
        mids.push_back({"h_vn", h_vn_cond(rho, d[0], d[1]).value});
        for (double a : cfg.sandwiched_alphas)
            mids.push_back({"h_sandwiched(" + std::to_string(a) + ")", h_sandwiched_down(rho, d[0], d[1], a).value});
        for (double a : cfg.petz_alphas)
            mids.push_back({"h_petz(" + std::to_string(a) + ")", h_petz_up(rho, d[0], d[1], a).value});
        const std::string tag = " at dims (" + std::to_string(d[0]) + "," + std::to_string(d[1]) + ") sample " +
                                std::to_string(k);
        for (const auto& [name, v] : mids) {
            if (v < lo - cfg.tol) violate("h_min > " + name + tag, lo - v);
            if (v > hi + cfg.tol) violate(name + " > h_max" + tag, v - hi);
            checks += 2;
        }
    });
    rep.samples = int(jobs.size());

    // items (i)-(iv)
    for (int dA : {2, 3}) {
        const double l = std::log2(double(dA));
        const std::pair<SpecialKind, double> table[] = {{SpecialKind::uniform, l},
                                                        {SpecialKind::pure_default, 0.0},
                                                        {SpecialKind::max_classical, 0.0},
                                                        {SpecialKind::max_entangled, -l}};
        for (const auto& [kind, expect] : table) {
            const Mat rho = special_state(kind, dA, dA).mat();
            for (double v : {h_min_cond(rho, dA, dA).value, h_max_cond(rho, dA, dA).value, h_vn_cond(rho, dA, dA).value}) {
                rep.special_state_max_error = std::max(rep.special_state_max_error, std::abs(v - expect));
                ++checks;
            }
        }
    }

    const Dims& dd = cfg.duality_dims;
    if (dd.size() != 3) throw DimensionError("duality_dims must list three factors");
    std::vector<double> residuals(cfg.pure_duality_samples, 0.0);
    parallel_for(cfg.pure_duality_samples, cfg.workers, [&](int i) {
        Rng rng(cfg.seed * 7919ULL + std::uint64_t(i) + 17);
        const Mat psi = random_state(dd, 1, rng).mat();
        const Mat ab = partial_trace(psi, dd, {0, 1});
        const Mat ac = partial_trace(psi, dd, {0, 2});
        residuals[i] = std::abs(h_min_cond(ab, dd[0], dd[1]).value + h_max_cond(ac, dd[0], dd[2]).value);
    });
    rep.duality_samples = cfg.pure_duality_samples;
    for (double r : residuals) rep.duality_max_residual = std::max(rep.duality_max_residual, r);
    rep.checks = checks + cfg.pure_duality_samples;
    return rep;
}

MonotonicityReport monotonicity_sweep(const MonotonicityConfig& cfg) {
    MonotonicityReport rep;
    const auto& d = cfg.dims;
    for (int s = 0; s < cfg.samples; ++s) {
        Rng rng(cfg.seed * 104729ULL + std::uint64_t(s));
        const Hamiltonian h_in = random_hamiltonian(d.dA, rng);
        const Hamiltonian h_out = random_hamiltonian(d.dA_out, rng);
        const ThermoState ts = random_thermo_state({d.dA, d.dB}, h_in, 1.0, rng());
        const DensityOperator g_out = gibbs_state(h_out, 1.0);
        const ThermoOperation op = random_free_operation(d, ts.gamma(), g_out, rng());
        const ThermoState image(apply_channel(op.channel, ts.rho()), g_out);

        const double up_in = i_max_up_smoothed(ts, cfg.eps, cfg.smoothing).value;
        const double up_out = i_max_up_smoothed(image, cfg.eps, cfg.smoothing).value;
        const double dn_in = i_min_down_smoothed(ts, cfg.eps, cfg.smoothing).value;
        const double dn_out = i_min_down_smoothed(image, cfg.eps, cfg.smoothing).value;
        rep.max_increase_max_up = std::max(rep.max_increase_max_up, up_out - up_in);
        rep.max_increase_min_down = std::max(rep.max_increase_min_down, dn_out - dn_in);
        ++rep.samples;

        // the embedding check is costlier, so it runs on the first few samples only
        if (s < 5) {
            for (int e : cfg.embed_dims) {
                const ThermoState big = embed_pure_ancilla(ts, e);
                const double off = std::log2(double(e));
                const double up_big = i_max_up_smoothed(big, cfg.eps, cfg.smoothing).value;
                const double dn_big = i_min_down_smoothed(big, cfg.eps, cfg.smoothing).value;
                rep.max_embedding_error = std::max(
                    {rep.max_embedding_error, std::abs(up_big - up_in - off), std::abs(dn_big - dn_in - off)});
            }
        }
    }
    rep.pass = rep.max_increase_max_up <= cfg.tol && rep.max_increase_min_down <= cfg.tol &&
               rep.max_embedding_error <= 1e-4;
    return rep;
}

}  // namespace qthermo
