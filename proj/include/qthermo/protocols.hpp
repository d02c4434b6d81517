#pragma once

#include <string>
#include <vector>

#include "qthermo/channels.hpp"
#include "qthermo/smoothing.hpp"

namespace qthermo {

// One operation acting on battery (x) A (x) B. The channel's A factor is the battery and
// Alice's system merged (battery first); gamma_in / gamma_out are pi (x) gamma on it.
struct ProtocolStage {
    ThermoOperation operation;
    std::string label;
    int d_battery_in = 1;
    int d_battery_out = 1;
    int dA_in = 1, dB_in = 1, dA_out = 1, dB_out = 1;
    Mat gamma_system_in, gamma_system_out;  // Gibbs states of A without the battery
    double ideal_work_bits = 0.0;    // real-valued battery dims
    double integer_work_bits = 0.0;  // log2 |A0| - log2 |A1| with the integer dims used
};

// Stages run in order, each with fresh batteries; spent output batteries stay aside.
struct Protocol {
    std::vector<ProtocolStage> stages;
    double target_error = 0.0;

    double ideal_work_bits() const;
    double integer_work_bits() const;
    int d_battery_in() const;   // product over stages
    int d_battery_out() const;
    const ThermoOperation& operation() const;  // single-stage protocols only
};

struct ProtocolOptions {
    SmoothingOptions smoothing{};
    int erasure_battery_out = 4;  // |A1| for erasure; the ideal work does not depend on it
    int max_battery_dim = 1 << 20;
};

// Measure-and-prepare channel A0 A -> A1 A B producing a state within eps of |0><0| (x) rho.
Protocol build_preparation_protocol(const ThermoState& ts, double eps, const ProtocolOptions& opt = {});
// Measure-and-prepare channel A0 A B -> A1 A producing a state within eps of |0><0| (x) |0><0|.
Protocol build_erasure_protocol(const ThermoState& ts, double eps, const ProtocolOptions& opt = {});
Protocol identity_protocol(const DensityOperator& gamma, int dB);
// p2 after p1; p1's output system must match p2's input system.
Protocol compose_protocols(const Protocol& p1, const Protocol& p2);
// Every stage's channel mixed with the completely depolarizing channel at weight w.
Protocol corrupt_protocol(const Protocol& p, double w);

// Runs |0><0|_batteries (x) input through all stages; the result has layout
// A' (x) B' (x) battery_out_1 (x) ... (x) battery_out_K.
Mat run_protocol(const Protocol& p, const Mat& input);

struct VerificationReport {
    double covariance_residual = 0.0;  // largest over stages
    double achieved_error = 0.0;
    double work_bits = 0.0;
    double integer_work_bits = 0.0;
    bool pass = false;
};

// Checks every stage for conditional thermalization covariance and measures the distance
// between the output and |0><0| (x) target.
VerificationReport verify_protocol(const Protocol& p, const ThermoState& input, const DensityOperator& target,
                                   double eps, double cov_tol = 1e-7, double err_slack = 1e-6);

}  // namespace qthermo
