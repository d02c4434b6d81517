#pragma once

#include <string>

#include "qthermo/conditional.hpp"
#include "qthermo/sdp.hpp"
#include "qthermo/states.hpp"

namespace qthermo {

enum class SmoothedKind { d_min, i_min_down, h_max_up, i_max_up, h_min_down, i_max_down };
std::string to_string(SmoothedKind k);

// Optimal effect Lambda, or the (t, tau, sigma_B) triple, or the X operator.
struct SmoothedWitness {
    Mat lambda;
    double t = 0.0;
    Mat tau;
    Mat sigma;
    Mat x;
    double ball_distance = 0.0;
};

struct SmoothedValue {
    double value = 0.0;
    bool infinite = false;
    double eps = 0.0;
    SmoothedKind kind = SmoothedKind::d_min;
    SmoothedWitness witness;
    SdpSolution solver;       // last solve
    int solves = 0;
    double bracket_lo = 0.0;  // log2 t bracket of the bisection, when used
    double bracket_hi = 0.0;
};

struct SmoothingOptions {
    SdpOptions sdp{1e-8, 1e-7, 150, 100.0, false};
    double bisection_tol = 1e-4;   // bits
    double ball_slack = 1e-8;      // tolerance on the ball radius in per-t feasibility tests
    double bracket_floor = -40.0;  // log2 of the lowest t tried
};

// sup over 0 <= L <= 1 with Tr[L rho] >= 1 - eps of -log2 Tr[L sigma].
SmoothedValue d_min_smoothed(const Mat& rho, const Mat& sigma, double eps, const SmoothingOptions& opt = {});
SmoothedValue i_min_down_smoothed(const ThermoState& ts, double eps, const SmoothingOptions& opt = {});
SmoothedValue h_max_cond_smoothed(const Mat& rho, int dA, int dB, double eps, const SmoothingOptions& opt = {});
SmoothedValue i_max_up_smoothed(const ThermoState& ts, double eps, const SmoothingOptions& opt = {});
SmoothedValue h_min_cond_smoothed(const Mat& rho, int dA, int dB, double eps, const SmoothingOptions& opt = {});
SmoothedValue i_max_down_smoothed(const ThermoState& ts, double eps, const SmoothingOptions& opt = {});

// min Tr X subject to gamma (x) X >= rho; value log2 of the optimum.
MutualInfoValue i_max_down(const ThermoState& ts, const SdpOptions& opt = {1e-8, 1e-7, 150, 100.0, false});

// Smallest ball distance achievable with tau <= t gamma (x) sigma_B, tau_B <= sigma_B.
// Exposed for tests of the bisection oracle.
SmoothedWitness max_up_ball_distance(const ThermoState& ts, double t, const SmoothingOptions& opt = {});

}  // namespace qthermo
