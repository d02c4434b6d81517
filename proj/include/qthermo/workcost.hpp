#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "qthermo/classical.hpp"
#include "qthermo/protocols.hpp"

namespace qthermo {

enum class WorkMethod { closed_form, sdp, protocol };
std::string to_string(WorkMethod m);

// Work in units of kT ln 2 at battery inverse temperature beta_b (log2 quantities / beta_b).
struct WorkReport {
    double work_bits = 0.0;
    double beta_b = 1.0;
    double epsilon = 0.0;
    WorkMethod method = WorkMethod::closed_form;
    std::map<std::string, double> diagnostics;
};

enum class WorkDirection { prep, eras };
WorkDirection parse_work_direction(const std::string& s);

// (I_max^up,eps - log2|A|) / beta_b
WorkReport w_prep_oneshot(const ThermoState& ts, double eps, double beta_b, const SmoothingOptions& opt = {});
// (log2|A| - I_min^down,eps) / beta_b
WorkReport w_eras_oneshot(const ThermoState& ts, double eps, double beta_b, const SmoothingOptions& opt = {});
// Trivial Hamiltonian: -H_min^eps for preparation, H_max^eps for erasure.
WorkReport w_oneshot_uniform(const Mat& rho, int dA, int dB, WorkDirection dir, double eps, double beta_b,
                             const SmoothingOptions& opt = {});
// Work booked by the synthesized protocol, with verification data in the diagnostics.
WorkReport w_protocol(const ThermoState& ts, WorkDirection dir, double eps, double beta_b,
                      const ProtocolOptions& opt = {});

// Protocol turning rho into sigma: erasure of rho at eps/2 followed by preparation of sigma at
// eps/2. Identical inputs give the identity protocol.
Protocol conversion_protocol(const ThermoState& from, const ThermoState& to, double eps,
                             const ProtocolOptions& opt = {});
// Work of conversion_protocol, verified on `from`; an upper bound on the optimal one-shot cost.
WorkReport w_convert_oneshot(const ThermoState& from, const ThermoState& to, double eps, double beta_b,
                             const ProtocolOptions& opt = {});

// (I(sigma||gamma') - I(rho||gamma)) / beta_b
WorkReport w_asymptotic(const ThermoState& from, const ThermoState& to, double beta_b);
// I(rho||gamma) / I(sigma||gamma'); +inf when the target carries no resource.
double rate_asymptotic(const ThermoState& from, const ThermoState& to);
// (F(A'|B') - F(A')_gamma') - (F(A|B) - F(A)_gamma), with each gamma the Gibbs state of its Hamiltonian.
double w_asymptotic_helmholtz(const ThermoState& from, const Hamiltonian& h_from, const ThermoState& to,
                              const Hamiltonian& h_to, double beta_b);

// n-fold tensor power with the copies regrouped as A^n (x) B^n.
ThermoState thermo_power(const ThermoState& ts, int n);

struct AepPoint {
    int n = 0;
    double eps = 0.0;        // smoothing of the value: eps + eps'
    double value_bits = 0.0; // I_max^up,eps+eps' of the n-copy state, per copy
    double lower_bound = 0.0;  // I_max^down,eps+eps' per copy
    double upper_bound = std::numeric_limits<double>::infinity();  // (I_max^down,eps' + log2(2/eps^2)) per copy
    bool bounds_hold = false;
};

struct AepOptions {
    bool classical_fast_path = true;
    int max_quantum_dim = 64;
    int max_classical_n = 12;
    double bound_slack = 1e-6;
    SmoothingOptions smoothing{};
};

// One row per n = 1..n_max.
std::vector<AepPoint> aep_experiment(const ThermoState& ts, double eps, double eps_prime, int n_max,
                                     const AepOptions& opt = {});

struct SweepConfig {
    std::vector<Dims> dims{{2, 2}, {2, 3}, {3, 3}};
    int states_per_dims = 67;
    int pure_duality_samples = 100;
    Dims duality_dims{2, 2, 4};
    std::vector<double> sandwiched_alphas{0.5, 1.5, 2.0};
    std::vector<double> petz_alphas{0.5, 1.5};
    double tol = 1e-7;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct SweepViolation {
    std::string what;
    double amount = 0.0;
};

struct SweepReport {
    int samples = 0;
    int checks = 0;
    std::vector<SweepViolation> violations;
    double special_state_max_error = 0.0;  // items (i)-(iv) at |A| = 2, 3
    int duality_samples = 0;
    double duality_max_residual = 0.0;
};

// h_min <= {h_vn, Renyi variants} <= h_max over random states, the special-state table and
// min/max duality on random pure states.
SweepReport entropy_sandwich_sweep(const SweepConfig& cfg);

struct MonotonicityConfig {
    int samples = 100;
    FreeOperationDims dims{};
    double eps = 0.1;
    std::vector<int> embed_dims{2, 3};
    std::uint64_t seed = 1;
    double tol = 1e-5;
    SmoothingOptions smoothing{{1e-8, 1e-7, 150, 100.0, false}, 1e-6};  // finer bisection than the default
};

struct MonotonicityReport {
    int samples = 0;
    double max_increase_max_up = -std::numeric_limits<double>::infinity();
    double max_increase_min_down = -std::numeric_limits<double>::infinity();
    double max_embedding_error = 0.0;
    bool pass = false;
};

// I_max^up,eps and I_min^down,eps never increase under sampled free operations; appending a
// pure ancilla with a uniform Gibbs state adds exactly log2 of its dimension.
MonotonicityReport monotonicity_sweep(const MonotonicityConfig& cfg);

}  // namespace qthermo
