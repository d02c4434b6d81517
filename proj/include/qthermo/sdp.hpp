#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qthermo/linalg.hpp"

namespace qthermo {

enum class SdpStatus { optimal, infeasible, unbounded, max_iter, numerical_error };
std::string to_string(SdpStatus s);

struct SdpOptions {
    double gap_tol = 1e-7;
    double feas_tol = 1e-7;
    int max_iter = 150;
    double initial_scale = 100.0;
    bool verbose = false;
    // When the iteration breaks down, the best iterate is still reported as optimal if its
    // residuals and gap are within this factor of the tolerances.
    double fallback_factor = 10.0;
};

// Problem in the form
//   minimize  c^T x
//   s.t.      F0_k + sum_i x_i F_ik >= 0   (complex Hermitian LMIs)
//             a0_l + sum_i x_i a_il >= 0   (scalar inequalities)
// with real free variables x. A Hermitian variable of dimension d occupies d^2 real
// coordinates in the basis returned by hermitian_basis().
class SdpProblem {
public:
    struct HermVar {
        int offset = 0;
        int dim = 0;
    };
    struct LinearExpr {
        double constant = 0.0;
        std::vector<std::pair<int, double>> terms;
    };

    int add_scalar();
    HermVar add_hermitian(int dim);
    int num_vars() const { return nvars_; }

    void add_objective(int var, double coef);
    // Adds Re Tr[C V] to the objective.
    void add_objective(const HermVar& v, const Mat& c);

    int add_lmi(int dim);
    void lmi_constant(int lmi, const Mat& f0);
    void lmi_scalar(int lmi, int var, const Mat& coef);
    // Adds map(V) to the LMI, for a real-linear map applied to the basis of V.
    void lmi_map(int lmi, const HermVar& v, const std::function<Mat(const Mat&)>& map);
    void lmi_identity(int lmi, const HermVar& v, double scale = 1.0);

    // expr >= 0
    void add_inequality(const LinearExpr& expr);
    // Adds Re Tr[C V] to an expression.
    static void add_trace_term(LinearExpr& e, const HermVar& v, const Mat& c, double scale = 1.0);

    Mat value(const HermVar& v, const std::vector<double>& x) const;

    // Sparse text dump (SDPA sparse format of the realified problem).
    void write_sparse(std::ostream& os) const;

    struct LmiData {
        int dim = 0;
        Mat f0;
        std::vector<std::pair<int, Mat>> terms;
    };
    const std::vector<LmiData>& lmis() const { return lmis_; }
    const std::vector<LinearExpr>& inequalities() const { return ineqs_; }
    const std::vector<double>& objective() const { return c_; }

private:
    int nvars_ = 0;
    std::vector<double> c_;
    std::vector<LmiData> lmis_;
    std::vector<LinearExpr> ineqs_;
};

// Coordinate basis element k of d x d Hermitian matrices.
Mat hermitian_basis(int d, int k);

struct SdpSolution {
    SdpStatus status = SdpStatus::numerical_error;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;                // relative duality gap
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double max_violation = 0.0;      // largest negative eigenvalue / slack at x
    int iterations = 0;
    std::vector<double> x;
    std::string message;

    bool ok() const { return status == SdpStatus::optimal; }
};

SdpSolution sdp_solve(const SdpProblem& p, const SdpOptions& opt = {});

}  // namespace qthermo
