#pragma once

#include <vector>

#include "qthermo/smoothing.hpp"
#include "qthermo/states.hpp"

namespace qthermo {

// Commuting data: rho_AB = sum p(a,b) |ab><ab| with gamma_A = sum g(a) |a><a|.
// Rows that are identical up to relabelling are stored once with a multiplicity, which
// keeps n-copy inputs polynomial in n (one entry per joint type).
struct ClassicalEntry {
    double p = 0.0;      // probability of each a in the class
    double g = 0.0;      // gamma weight of each a in the class
    double mult = 1.0;   // number of a values in the class
};

struct ClassicalGroup {
    double mult = 1.0;   // number of b values sharing this row
    std::vector<ClassicalEntry> entries;
};

struct ClassicalInstance {
    std::vector<ClassicalGroup> groups;
    double log2_dA = 0.0;

    double total_mass() const;
};

// Requires diagonal rho and gamma (off-diagonal magnitude <= tol).
ClassicalInstance classical_instance(const ThermoState& ts, double tol = 1e-12);
// n-fold tensor power of a diagonal ThermoState, compressed to joint types.
ClassicalInstance classical_power(const ThermoState& ts, int n, double tol = 1e-12);

// Optimal values in bits. Exact up to floating point; the max-up quantity is a root of a
// monotone function and is located to ~1e-12 bits.
double classical_d_min_smoothed(const std::vector<ClassicalEntry>& pairs, double eps);  // entries hold (p, q)
double classical_i_min_down_smoothed(const ClassicalInstance& c, double eps);
double classical_h_max_cond_smoothed(const ClassicalInstance& c, double eps);  // ignores g
double classical_i_max_up_smoothed(const ClassicalInstance& c, double eps);
double classical_h_min_cond_smoothed(const ClassicalInstance& c, double eps);  // ignores g
double classical_i_max_down_smoothed(const ClassicalInstance& c, double eps);

// Largest mass a subnormalized tau <= rho can keep with tau <= t gamma (x) sigma_B and
// tau_B <= sigma_B; the ball distance is one minus this.
double classical_max_up_kept_mass(const ClassicalInstance& c, double t);

// Dispatch on kind for a diagonal ThermoState. For d_min the reference is gamma (x) rho_B.
double classical_oracle(SmoothedKind kind, const ThermoState& ts, double eps);

}  // namespace qthermo
