#pragma once

#include <limits>

#include "qthermo/linalg.hpp"

namespace qthermo {

// Value in bits, or +inf when the support condition fails.
struct DivergenceValue {
    double value = 0.0;
    bool infinite = false;
    bool support_violation = false;

    static DivergenceValue finite(double v) { return {v, false, false}; }
    static DivergenceValue inf(bool support = true) {
        return {std::numeric_limits<double>::infinity(), true, support};
    }
};

// True when supp(rho) lies inside supp(sigma).
bool support_contained(const Mat& rho, const Mat& sigma, double rank_tol = 1e-9);

DivergenceValue d_max(const Mat& rho, const Mat& sigma);
DivergenceValue d_min(const Mat& rho, const Mat& sigma);
DivergenceValue d_umegaki(const Mat& rho, const Mat& sigma);
DivergenceValue d_sandwiched(const Mat& rho, const Mat& sigma, double alpha);
DivergenceValue d_petz(const Mat& rho, const Mat& sigma, double alpha);

// -Tr[rho log2 rho] with 0 log 0 = 0.
double von_neumann_entropy(const Mat& rho);
double binary_entropy(double p);

}  // namespace qthermo
