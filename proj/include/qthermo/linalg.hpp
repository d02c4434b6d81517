#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qthermo {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Dims = std::vector<int>;

// Error taxonomy. The CLI maps these onto exit codes.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int dims_product(const Dims& d);

// Dense Hermitian matrix with optional subsystem structure (A-major).
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(Mat m, Dims dims = {}, double herm_tol = 1e-10);

    const Mat& mat() const { return m_; }
    operator const Mat&() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    const Dims& dims() const { return dims_; }

private:
    Mat m_;
    Dims dims_;
};

struct Eig {
    RVec values;  // descending
    Mat vectors;  // columns match values
};

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(const std::vector<Mat>& ms);
HermitianOperator tensor(const HermitianOperator& m, const HermitianOperator& n);

// Trace over every subsystem not listed in `keep`. Kept factors retain their order.
Mat partial_trace(const Mat& m, const Dims& dims, const std::vector<int>& keep);
HermitianOperator partial_trace(const HermitianOperator& m, const std::vector<int>& keep);
Mat trace_first(const Mat& m, int d1, int d2);   // Tr_1 on d1 x d2
Mat trace_second(const Mat& m, int d1, int d2);  // Tr_2 on d1 x d2

// Reorder tensor factors: output factor k is input factor perm[k].
Mat permute_subsystems(const Mat& m, const Dims& dims, const std::vector<int>& perm);

Mat hermitian_part(const Mat& m);
double hermiticity_defect(const Mat& m);

Eig eig_hermitian(const Mat& m);
Mat apply_spectral(const Mat& m, const std::function<double(double)>& f);
Mat from_spectrum(const Eig& e, const std::function<double(double)>& f);

// Threshold used to decide the support: relative to the largest |eigenvalue|.
double support_cutoff(const RVec& eigvals, double rank_tol);

Mat support_projector(const Mat& m, double rank_tol = 1e-9);
Mat pinv_sqrt(const Mat& m, double rank_tol = 1e-9);
// m^p on the support of m; eigenvalues below the cutoff map to 0.
Mat support_power(const Mat& m, double p, double rank_tol = 1e-9);
Mat sqrt_psd(const Mat& m);
int numerical_rank(const Mat& m, double rank_tol = 1e-9);

double op_norm(const Mat& m);
double trace_norm(const Mat& m);
double max_eigenvalue(const Mat& m);
double min_eigenvalue(const Mat& m);
double real_trace(const Mat& m);

// Inserts a |0><0| factor of dimension d_anc as subsystem number `position`.
Mat embed_with_pure_ancilla(const Mat& m, const Dims& dims, int d_anc, int position);
HermitianOperator embed_with_pure_ancilla(const HermitianOperator& m, int d_anc, int position);

Mat ket_bra(int d, int i, int j);
Mat basis_projector(int d, int i);

}  // namespace qthermo
