#pragma once

#include <string>

#include "qthermo/divergences.hpp"
#include "qthermo/states.hpp"

namespace qthermo {

enum class CondVariant { min_down, max_up, von_neumann, sandwiched_down, petz_up };
enum class InfoVariant { max_up, min_down, umegaki, max_down, petz_down };

std::string to_string(CondVariant v);
std::string to_string(InfoVariant v);

struct CondEntropyValue {
    double value = 0.0;
    CondVariant variant = CondVariant::von_neumann;
    double alpha = 1.0;
};

struct MutualInfoValue {
    double value = 0.0;
    bool infinite = false;
    InfoVariant variant = InfoVariant::umegaki;
    double alpha = 1.0;
    bool converged = true;
    int iterations = 0;
};

// Conditional entropies of rho on A (x) B with |A| = dA, |B| = dB.
CondEntropyValue h_min_cond(const Mat& rho, int dA, int dB);
CondEntropyValue h_max_cond(const Mat& rho, int dA, int dB);
CondEntropyValue h_vn_cond(const Mat& rho, int dA, int dB);
// -D_alpha(rho || 1 (x) rho_B), sandwiched family; alpha in [1/2,1) or (1,inf).
CondEntropyValue h_sandwiched_down(const Mat& rho, int dA, int dB, double alpha);
// Optimized Petz family, alpha in [0,1) or (1,2].
CondEntropyValue h_petz_up(const Mat& rho, int dA, int dB, double alpha);

MutualInfoValue i_max_up(const ThermoState& ts);
MutualInfoValue i_min_down(const ThermoState& ts);
MutualInfoValue i_umegaki(const ThermoState& ts);

struct PetzOptions {
    int max_iter = 20000;
    double grad_tol = 1e-8;
    int probes = 20;
    std::uint64_t probe_seed = 7;
};

// inf over sigma_B of the Petz divergence against gamma (x) sigma_B, alpha in [0,1).
MutualInfoValue i_petz_down(const ThermoState& ts, double alpha, const PetzOptions& opt = {});

// Tr[H rho_A] - H(A|B)/beta_b.
double helmholtz_cond(const ThermoState& ts, const Hamiltonian& h, double beta_b);
// Tr[H gamma] - S(gamma)/beta_b.
double helmholtz(const Mat& state, const Hamiltonian& h, double beta_b);

}  // namespace qthermo
