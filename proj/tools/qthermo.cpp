// Command-line front end. Exit codes: 0 ok, 2 invalid input, 3 solver failure.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qthermo/io.hpp"

using namespace qthermo;

namespace {

struct Common {
    bool json = false;
    std::string out;
    double tol_gap = 1e-8;
    double tol_feas = 1e-7;
    double tol_bisection = 1e-4;
    double tol_ball = 1e-8;
    double tol_pred = 1e-8;
    int workers = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = 1;

    SmoothingOptions smoothing() const {
        SmoothingOptions o;
        o.sdp.gap_tol = tol_gap;
        o.sdp.feas_tol = tol_feas;
        o.bisection_tol = tol_bisection;
        o.ball_slack = tol_ball;
        return o;
    }
};

struct StateArgs {
    std::string state;
    std::string gamma;
    std::string hamiltonian;
    double beta_b = 1.0;
    Dims dims;
};

// FILE, or special:KIND:dA:dB with KIND in uniform|pure|max_entangled|max_classical.
Mat read_state(const std::string& spec, Dims& dims) {
    if (spec.rfind("special:", 0) == 0) {
        std::stringstream ss(spec.substr(8));
        std::string kind, a, b;
        std::getline(ss, kind, ':');
        std::getline(ss, a, ':');
        std::getline(ss, b, ':');
        int dA = 0, dB = 0;
        try {
            dA = std::stoi(a);
            dB = std::stoi(b);
        } catch (const std::exception&) {
            throw ValidationError("--state: expected special:KIND:dA:dB");
        }
        dims = {dA, dB};
        return special_state(parse_special_kind(kind), dA, dB).mat();
    }
    Dims file_dims;
    Mat m = load_operator(spec, &file_dims);
    if (dims.empty()) dims = file_dims;
    if (dims_product(dims) != m.rows()) throw DimensionError("--dims do not match " + spec);
    return m;
}

void require(const std::string& v, const char* flag) {
    if (v.empty()) throw ValidationError(std::string(flag) + " is required");
}

Mat read_gamma(const StateArgs& a, int dA) {
    if (!a.gamma.empty() && !a.hamiltonian.empty()) throw ValidationError("give either --gamma or --hamiltonian");
    if (a.gamma == "uniform" || (a.gamma.empty() && a.hamiltonian.empty())) return uniform_state(dA).mat();
    if (!a.gamma.empty()) return load_operator(a.gamma);
    Hamiltonian h{HermitianOperator(load_operator(a.hamiltonian))};
    return gibbs_state(h, a.beta_b).mat();
}

ThermoState read_thermo(const StateArgs& a) {
    require(a.state, "--state");
    Dims dims = a.dims;
    Mat rho = read_state(a.state, dims);
    if (dims.size() != 2) throw DimensionError("the state needs bipartite dims (use --dims dA,dB)");
    return ThermoState(rho, read_gamma(a, dims[0]));
}

void add_state_flags(CLI::App* sub, StateArgs& a, bool with_gamma) {
    sub->add_option("--state", a.state, "operator JSON file or special:KIND:dA:dB");
    sub->add_option("--dims", a.dims, "subsystem dims, overriding the file")->delimiter(',');
    if (with_gamma) {
        sub->add_option("--gamma", a.gamma, "Gibbs state JSON file, or 'uniform' (default)");
        sub->add_option("--hamiltonian", a.hamiltonian, "Hamiltonian JSON file; gamma is its Gibbs state");
        sub->add_option("--beta-b", a.beta_b, "battery inverse temperature")->check(CLI::PositiveNumber);
    }
}

void emit(const Common& c, const Json& j, const std::string& human) {
    const std::string text = c.json ? j.dump(2) + "\n" : human;
    if (!c.out.empty()) write_text_file(c.out, j.dump(2) + "\n");
    std::cout << text;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

Json value_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Work costs and conditional entropies with quantum side information"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file with option values (sections per subcommand)");
    Common c;
    app.add_flag("--json", c.json, "machine-readable JSON on stdout");
    app.add_option("--out", c.out, "also write the result to this file");
    app.add_option("--tol-gap", c.tol_gap, "SDP duality-gap tolerance");
    app.add_option("--tol-feas", c.tol_feas, "SDP feasibility tolerance");
    app.add_option("--tol-bisection", c.tol_bisection, "bisection width in bits");
    app.add_option("--tol-ball", c.tol_ball, "slack on the smoothing-ball radius");
    app.add_option("--tol-pred", c.tol_pred, "tolerance of channel predicates");
    app.add_option("--workers", c.workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "random seed");

    // entropy
    StateArgs ent;
    std::string ent_variant = "vn";
    double ent_alpha = 2.0, ent_eps = 0.0;
    auto* s_ent = app.add_subcommand("entropy", "conditional entropy H(A|B)");
    add_state_flags(s_ent, ent, false);
    s_ent->add_option("--variant", ent_variant, "min|max|vn|sandwiched|petz")
        ->check(CLI::IsMember({"min", "max", "vn", "sandwiched", "petz"}));
    s_ent->add_option("--alpha", ent_alpha, "Renyi order");
    s_ent->add_option("--eps", ent_eps, "smoothing for min/max");

    // divergence
    std::string div_rho, div_sigma, div_variant = "umegaki";
    double div_alpha = 2.0, div_eps = 0.0;
    auto* s_div = app.add_subcommand("divergence", "relative entropy D(rho||sigma)");
    s_div->add_option("--state", div_rho, "rho (operator JSON)")->required();
    s_div->add_option("--sigma", div_sigma, "sigma (operator JSON)")->required();
    s_div->add_option("--variant", div_variant, "umegaki|max|min|sandwiched|petz")
        ->check(CLI::IsMember({"umegaki", "max", "min", "sandwiched", "petz"}));
    s_div->add_option("--alpha", div_alpha, "Renyi order");
    s_div->add_option("--eps", div_eps, "smoothing (min only)");

    // mutualinfo
    StateArgs mi;
    std::string mi_variant = "umegaki";
    double mi_alpha = 0.5, mi_eps = 0.0;
    auto* s_mi = app.add_subcommand("mutualinfo", "generalized mutual information I(rho_AB||gamma_A)");
    add_state_flags(s_mi, mi, true);
    s_mi->add_option("--variant", mi_variant, "max_up|min_down|umegaki|max_down|petz_down")
        ->check(CLI::IsMember({"max_up", "min_down", "umegaki", "max_down", "petz_down"}));
    s_mi->add_option("--alpha", mi_alpha, "Petz order");
    s_mi->add_option("--eps", mi_eps, "smoothing");

    // workcost
    StateArgs wc, wc_to;
    std::string wc_mode = "prep", wc_method = "sdp";
    double wc_eps = 0.0;
    auto* s_wc = app.add_subcommand("workcost", "one-shot work cost in units of kT ln 2");
    add_state_flags(s_wc, wc, true);
    s_wc->add_option("--mode", wc_mode, "prep|eras|convert")->check(CLI::IsMember({"prep", "eras", "convert"}));
    s_wc->add_option("--method", wc_method, "sdp|protocol (prep/eras)")->check(CLI::IsMember({"sdp", "protocol"}));
    s_wc->add_option("--eps", wc_eps, "error tolerance");
    s_wc->add_option("--target", wc_to.state, "target state for convert (default: --state)");
    s_wc->add_option("--target-gamma", wc_to.gamma, "target Gibbs state (default: --gamma)");

    // protocol
    StateArgs pr;
    std::string pr_mode = "prep";
    double pr_eps = 0.0;
    int pr_battery = 4;
    auto* s_pr = app.add_subcommand("protocol", "synthesize and verify a preparation or erasure channel");
    add_state_flags(s_pr, pr, true);
    s_pr->add_option("--mode", pr_mode, "prep|eras")->check(CLI::IsMember({"prep", "eras"}));
    s_pr->add_option("--eps", pr_eps, "error tolerance");
    s_pr->add_option("--battery-out", pr_battery, "output battery dimension for erasure")->check(CLI::PositiveNumber);
    std::string pr_file;
    s_pr->add_option("--protocol-out", pr_file, "write the protocol JSON here");

    // verify-channel
    std::string vc_choi, vc_gin, vc_gout;
    auto* s_vc = app.add_subcommand("verify-channel", "check the free-operation predicates of a Choi operator");
    s_vc->add_option("--choi", vc_choi, "Choi JSON")->required();
    s_vc->add_option("--gamma-in", vc_gin, "Gibbs state of Alice's input (default uniform)");
    s_vc->add_option("--gamma-out", vc_gout, "Gibbs state of Alice's output (default uniform)");

    // aep
    StateArgs ae;
    double ae_eps = 0.1, ae_eps_prime = -1.0;
    int ae_n = 10;
    bool ae_quantum = false;
    auto* s_ae = app.add_subcommand("aep", "per-copy smoothed max-information of n copies, with one-shot bounds");
    add_state_flags(s_ae, ae, true);
    s_ae->add_option("--eps", ae_eps, "smoothing eps");
    s_ae->add_option("--eps-prime", ae_eps_prime, "second smoothing parameter (default: eps)");
    s_ae->add_option("--n-max", ae_n, "largest number of copies")->check(CLI::PositiveNumber);
    s_ae->add_flag("--quantum", ae_quantum, "skip the diagonal fast path");

    // sweep
    std::string sw_kind = "sandwich";
    int sw_samples = 0;
    double sw_eps = 0.1;
    auto* s_sw = app.add_subcommand("sweep", "property sweeps over random instances");
    s_sw->add_option("--kind", sw_kind, "sandwich|monotonicity")->check(CLI::IsMember({"sandwich", "monotonicity"}));
    s_sw->add_option("--samples", sw_samples, "instances (0: default)");
    s_sw->add_option("--eps", sw_eps, "smoothing for monotonicity");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*s_ent) {
            require(ent.state, "--state");
            Dims dims = ent.dims;
            Mat rho = read_state(ent.state, dims);
            if (dims.size() != 2) throw DimensionError("entropy needs bipartite dims");
            const int dA = dims[0], dB = dims[1];
            double v = 0.0;
            if (ent_eps > 0.0 && ent_variant == "min") v = h_min_cond_smoothed(rho, dA, dB, ent_eps, c.smoothing()).value;
            else if (ent_eps > 0.0 && ent_variant == "max") v = h_max_cond_smoothed(rho, dA, dB, ent_eps, c.smoothing()).value;
            else if (ent_eps > 0.0) throw ValidationError("--eps applies to min and max only");
            else if (ent_variant == "min") v = h_min_cond(rho, dA, dB).value;
            else if (ent_variant == "max") v = h_max_cond(rho, dA, dB).value;
            else if (ent_variant == "vn") v = h_vn_cond(rho, dA, dB).value;
            else if (ent_variant == "sandwiched") v = h_sandwiched_down(rho, dA, dB, ent_alpha).value;
            else v = h_petz_up(rho, dA, dB, ent_alpha).value;
            emit(c, Json{{"variant", ent_variant}, {"eps", ent_eps}, {"value_bits", value_json(v)}}, fmt(v) + "\n");
        } else if (*s_div) {
            Mat rho = load_operator(div_rho), sigma = load_operator(div_sigma);
            DivergenceValue v;
            if (div_variant == "min" && div_eps > 0.0) {
                SmoothedValue s = d_min_smoothed(rho, sigma, div_eps, c.smoothing());
                v = s.infinite ? DivergenceValue::inf(false) : DivergenceValue::finite(s.value);
            } else if (div_eps > 0.0) {
                throw ValidationError("--eps applies to the min variant only");
            } else if (div_variant == "umegaki") v = d_umegaki(rho, sigma);
            else if (div_variant == "max") v = d_max(rho, sigma);
            else if (div_variant == "min") v = d_min(rho, sigma);
            else if (div_variant == "sandwiched") v = d_sandwiched(rho, sigma, div_alpha);
            else v = d_petz(rho, sigma, div_alpha);
            emit(c, Json{{"variant", div_variant}, {"value_bits", value_json(v.value)}, {"infinite", v.infinite}},
                 fmt(v.value) + "\n");
        } else if (*s_mi) {
            ThermoState ts = read_thermo(mi);
            double v = 0.0;
            if (mi_eps > 0.0) {
                if (mi_variant == "max_up") v = i_max_up_smoothed(ts, mi_eps, c.smoothing()).value;
                else if (mi_variant == "min_down") v = i_min_down_smoothed(ts, mi_eps, c.smoothing()).value;
                else if (mi_variant == "max_down") v = i_max_down_smoothed(ts, mi_eps, c.smoothing()).value;
                else throw ValidationError("--eps applies to max_up, min_down and max_down");
            } else if (mi_variant == "max_up") v = i_max_up(ts).value;
            else if (mi_variant == "min_down") v = i_min_down(ts).value;
            else if (mi_variant == "umegaki") v = i_umegaki(ts).value;
            else if (mi_variant == "max_down") v = i_max_down(ts, c.smoothing().sdp).value;
            else v = i_petz_down(ts, mi_alpha).value;
            emit(c, Json{{"variant", mi_variant}, {"eps", mi_eps}, {"value_bits", value_json(v)}}, fmt(v) + "\n");
        } else if (*s_wc) {
            ThermoState ts = read_thermo(wc);
            WorkReport r;
            if (wc_mode == "convert") {
                StateArgs to = wc;
                if (!wc_to.state.empty()) {
                    to.state = wc_to.state;
                    to.dims.clear();
                }
                if (!wc_to.gamma.empty()) {
                    to.gamma = wc_to.gamma;
                    to.hamiltonian.clear();
                }
                ProtocolOptions po;
                po.smoothing = c.smoothing();
                r = w_convert_oneshot(ts, read_thermo(to), wc_eps, wc.beta_b, po);
            } else if (wc_method == "protocol") {
                ProtocolOptions po;
                po.smoothing = c.smoothing();
                r = w_protocol(ts, parse_work_direction(wc_mode), wc_eps, wc.beta_b, po);
            } else if (wc_mode == "prep") {
                r = w_prep_oneshot(ts, wc_eps, wc.beta_b, c.smoothing());
            } else {
                r = w_eras_oneshot(ts, wc_eps, wc.beta_b, c.smoothing());
            }
            emit(c, work_report_to_json(r), fmt(r.work_bits) + "\n");
        } else if (*s_pr) {
            ThermoState ts = read_thermo(pr);
            ProtocolOptions po;
            po.smoothing = c.smoothing();
            po.erasure_battery_out = pr_battery;
            Protocol p;
            VerificationReport vr;
            if (pr_mode == "prep") {
                p = build_preparation_protocol(ts, pr_eps, po);
                vr = verify_protocol(p, ThermoState(basis_projector(ts.dA(), 0), uniform_state(ts.dA()).mat()),
                                     ts.rho(), pr_eps);
            } else {
                p = build_erasure_protocol(ts, pr_eps, po);
                vr = verify_protocol(p, ts, DensityOperator(basis_projector(ts.dA(), 0)), pr_eps);
            }
            if (!pr_file.empty()) write_text_file(pr_file, protocol_to_json(p).dump() + "\n");
            Json j{{"verification", verification_to_json(vr)},
                   {"d_battery_in", p.d_battery_in()},
                   {"d_battery_out", p.d_battery_out()}};
            std::ostringstream h;
            h << "work_bits " << fmt(vr.work_bits) << " (integer " << fmt(vr.integer_work_bits) << ")\n"
              << "achieved_error " << fmt(vr.achieved_error) << "\ncovariance_residual " << fmt(vr.covariance_residual)
              << "\n" << (vr.pass ? "PASS" : "FAIL") << "\n";
            emit(c, j, h.str());
        } else if (*s_vc) {
            ChoiOperator ch = choi_from_json(read_json_file(vc_choi), vc_choi);
            const int dA = ch.in_dims()[0], dAo = ch.out_dims()[0];
            DensityOperator gin(vc_gin.empty() ? uniform_state(dA).mat() : load_operator(vc_gin));
            DensityOperator gout(vc_gout.empty() ? uniform_state(dAo).mat() : load_operator(vc_gout));
            ThermoOperation op(ch, gin, gout);
            auto cov = is_cond_thermal_covariant(op, c.tol_pred);
            auto gp = is_cond_gibbs_preserving(op, c.tol_pred);
            auto ns = is_nonsignaling_A_to_B(ch, c.tol_pred);
            auto gpns = is_gibbs_preserving_nonsignaling(op, c.tol_pred);
            auto rec = [](const PredicateResult& r) { return Json{{"holds", r.holds}, {"residual", r.residual}}; };
            Json j{{"cond_thermal_covariant", rec(cov)},
                   {"cond_gibbs_preserving", rec(gp)},
                   {"nonsignaling_A_to_B", rec(ns)},
                   {"gibbs_preserving_nonsignaling", rec(gpns)},
                   {"trace_preservation_defect", ch.trace_preservation_defect()}};
            std::ostringstream h;
            h << "cond_thermal_covariant " << cov.holds << " " << fmt(cov.residual) << "\n"
              << "cond_gibbs_preserving " << gp.holds << " " << fmt(gp.residual) << "\n"
              << "nonsignaling_A_to_B " << ns.holds << " " << fmt(ns.residual) << "\n"
              << "gibbs_preserving_nonsignaling " << gpns.holds << " " << fmt(gpns.residual) << "\n";
            emit(c, j, h.str());
        } else if (*s_ae) {
            ThermoState ts = read_thermo(ae);
            AepOptions ao;
            ao.classical_fast_path = !ae_quantum;
            ao.smoothing = c.smoothing();
            auto pts = aep_experiment(ts, ae_eps, ae_eps_prime < 0.0 ? ae_eps : ae_eps_prime, ae_n, ao);
            const std::string csv = aep_to_csv(pts);
            if (!c.out.empty()) write_text_file(c.out, csv);
            std::cout << (c.json ? aep_to_json(pts).dump(2) + "\n" : csv);
        } else if (*s_sw) {
            if (sw_kind == "sandwich") {
                SweepConfig sc;
                sc.seed = c.seed;
                sc.workers = c.workers;
                if (sw_samples > 0) sc.states_per_dims = sw_samples;
                SweepReport r = entropy_sandwich_sweep(sc);
                Json v = Json::array();
                for (const auto& x : r.violations) v.push_back(Json{{"what", x.what}, {"amount", x.amount}});
                Json j{{"samples", r.samples},
                       {"checks", r.checks},
                       {"violations", v},
                       {"special_state_max_error", r.special_state_max_error},
                       {"duality_samples", r.duality_samples},
                       {"duality_max_residual", r.duality_max_residual}};
                std::ostringstream h;
                h << "samples " << r.samples << ", checks " << r.checks << ", violations " << r.violations.size()
                  << "\nspecial-state max error " << fmt(r.special_state_max_error) << "\nduality max residual "
                  << fmt(r.duality_max_residual) << "\n";
                emit(c, j, h.str());
            } else {
                MonotonicityConfig mc;
                mc.seed = c.seed;
                mc.eps = sw_eps;
                if (sw_samples > 0) mc.samples = sw_samples;
                mc.smoothing.sdp.gap_tol = c.tol_gap;
                mc.smoothing.sdp.feas_tol = c.tol_feas;
                MonotonicityReport r = monotonicity_sweep(mc);
                Json j{{"samples", r.samples},
                       {"max_increase_max_up", r.max_increase_max_up},
                       {"max_increase_min_down", r.max_increase_min_down},
                       {"max_embedding_error", r.max_embedding_error},
                       {"pass", r.pass}};
                std::ostringstream h;
                h << "samples " << r.samples << "\nmax increase I_max^up " << fmt(r.max_increase_max_up)
                  << "\nmax increase I_min^down " << fmt(r.max_increase_min_down) << "\nembedding error "
                  << fmt(r.max_embedding_error) << "\n" << (r.pass ? "PASS" : "FAIL") << "\n";
                emit(c, j, h.str());
            }
        }
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
