#pragma once

#include <cstdint>
#include <functional>

#include "qthermo/states.hpp"

namespace qthermo {

// J = sum_ij |i><j| (x) N(|i><j|), input factor first. Subsystem dims are {A, B} on both
// sides for bipartite channels; a plain channel uses a single factor.
class ChoiOperator {
public:
    ChoiOperator() = default;
    ChoiOperator(Mat j, Dims in_dims, Dims out_dims, double tp_tol = 1e-8);

    const Mat& mat() const { return j_; }
    const Dims& in_dims() const { return in_; }
    const Dims& out_dims() const { return out_; }
    int d_in() const { return dims_product(in_); }
    int d_out() const { return dims_product(out_); }

    // Largest deviation of Tr_out J from the identity.
    double trace_preservation_defect() const;

private:
    Mat j_;
    Dims in_, out_;
};

// A channel together with the Gibbs states of Alice's input and output systems.
struct ThermoOperation {
    ChoiOperator channel;
    DensityOperator gamma_in;
    DensityOperator gamma_out;

    ThermoOperation() = default;
    ThermoOperation(ChoiOperator ch, DensityOperator g_in, DensityOperator g_out);
    int dA_in() const { return channel.in_dims()[0]; }
    int dB_in() const { return channel.in_dims().size() > 1 ? channel.in_dims()[1] : 1; }
    int dA_out() const { return channel.out_dims()[0]; }
    int dB_out() const { return channel.out_dims().size() > 1 ? channel.out_dims()[1] : 1; }
};

using LinearMap = std::function<Mat(const Mat&)>;

// Output of the channel on an arbitrary (not necessarily positive) operator.
Mat apply_choi(const ChoiOperator& ch, const Mat& x);
DensityOperator apply_channel(const ChoiOperator& ch, const DensityOperator& rho);
// Applies ch to the factors [first, first + k) of x, where those factors multiply to ch's
// input dimension; the output factors replace them in place.
Mat apply_on_factors(const ChoiOperator& ch, const Mat& x, const Dims& dims, int first, int count);

ChoiOperator choi_of_map(const LinearMap& f, const Dims& in_dims, const Dims& out_dims);
ChoiOperator identity_channel(const Dims& dims);
ChoiOperator thermalization_channel(const DensityOperator& gamma);
ChoiOperator compose(const ChoiOperator& second, const ChoiOperator& first);  // second after first
ChoiOperator tensor_channels(const ChoiOperator& a, const ChoiOperator& b);
ChoiOperator unitary_channel(const Mat& u, const Dims& dims);
// With probability w the input is replaced by the maximally mixed state.
ChoiOperator depolarize(const ChoiOperator& ch, double w);

struct PredicateResult {
    bool holds = false;
    double residual = 0.0;
};

// N o (R^gamma (x) id_B) = (R^gamma' (x) id_B') o N, compared as Choi operators in trace norm.
PredicateResult is_cond_thermal_covariant(const ThermoOperation& op, double tol = 1e-8);
// N[gamma (x) .] = gamma' (x) E[.] with E[.] = Tr_A' N[gamma (x) .].
PredicateResult is_cond_gibbs_preserving(const ThermoOperation& op, double tol = 1e-8);
// Tr_A' N[X] depends on X only through Tr_A X.
PredicateResult is_nonsignaling_A_to_B(const ChoiOperator& ch, double tol = 1e-8);
// Gibbs preserving and nonsignaling; the residual is the larger of the two.
PredicateResult is_gibbs_preserving_nonsignaling(const ThermoOperation& op, double tol = 1e-8);

struct FreeOperationDims {
    int dA = 2, dB = 2, dA_out = 2, dB_out = 2;
    int d_memory = 2;  // classical register passed from Bob's side to Alice's map
};

// Samples (F (x) id_B') o (id_A (x) E) with E: B -> B' M an arbitrary channel and
// F[X_AM] = sum_k G_k[<k|X|k>_M], each G_k mapping gamma_in to gamma_out.
ThermoOperation random_free_operation(const FreeOperationDims& dims, const DensityOperator& gamma_in,
                                      const DensityOperator& gamma_out, std::uint64_t seed);
// Haar-isometry Stinespring channel; generically not free.
ChoiOperator random_channel(const Dims& in_dims, const Dims& out_dims, Rng& rng, int d_env = 2);
// Gibbs-preserving channel on Alice's system alone: replacer, classical relabelling in the
// eigenbases and (when gamma_in == gamma_out) gamma-commuting unitaries, mixed at random.
ChoiOperator random_gibbs_preserving(const DensityOperator& gamma_in, const DensityOperator& gamma_out, Rng& rng);

}  // namespace qthermo
