#include "qthermo/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>

namespace qthermo {

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::infeasible: return "infeasible";
        case SdpStatus::unbounded: return "unbounded";
        case SdpStatus::max_iter: return "max_iter";
        case SdpStatus::numerical_error: return "numerical_error";
    }
    return "?";
}

Mat hermitian_basis(int d, int k) {
    Mat e = Mat::Zero(d, d);
    if (k < d) {
        e(k, k) = 1.0;
        return e;
    }
    int r = k - d;  // off-diagonal pairs, two coordinates each
    int pair = r / 2;
    bool imag = r % 2 == 1;
    int idx = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j, ++idx) {
            if (idx != pair) continue;
            if (imag) {
                e(i, j) = cd(0, 1);
                e(j, i) = cd(0, -1);
            } else {
                e(i, j) = 1.0;
                e(j, i) = 1.0;
            }
            return e;
        }
    }
    throw DimensionError("hermitian_basis: index out of range");
}

int SdpProblem::add_scalar() {
    c_.push_back(0.0);
    return nvars_++;
}

SdpProblem::HermVar SdpProblem::add_hermitian(int dim) {
    if (dim < 1) throw DimensionError("Hermitian variable dimension must be >= 1");
    HermVar v{nvars_, dim};
    nvars_ += dim * dim;
    c_.resize(nvars_, 0.0);
    return v;
}

void SdpProblem::add_objective(int var, double coef) { c_.at(var) += coef; }

void SdpProblem::add_objective(const HermVar& v, const Mat& c) {
    for (int k = 0; k < v.dim * v.dim; ++k) c_[v.offset + k] += (c * hermitian_basis(v.dim, k)).trace().real();
}

int SdpProblem::add_lmi(int dim) {
    LmiData l;
    l.dim = dim;
    l.f0 = Mat::Zero(dim, dim);
    lmis_.push_back(std::move(l));
    return static_cast<int>(lmis_.size()) - 1;
}

void SdpProblem::lmi_constant(int lmi, const Mat& f0) {
    auto& l = lmis_.at(lmi);
    if (f0.rows() != l.dim) throw DimensionError("LMI constant has wrong dimension");
    l.f0 += f0;
}

void SdpProblem::lmi_scalar(int lmi, int var, const Mat& coef) {
    auto& l = lmis_.at(lmi);
    if (coef.rows() != l.dim) throw DimensionError("LMI coefficient has wrong dimension");
    if (var < 0 || var >= nvars_) throw DimensionError("LMI variable out of range");
    l.terms.emplace_back(var, coef);
}

void SdpProblem::lmi_map(int lmi, const HermVar& v, const std::function<Mat(const Mat&)>& map) {
    for (int k = 0; k < v.dim * v.dim; ++k) lmi_scalar(lmi, v.offset + k, map(hermitian_basis(v.dim, k)));
}

void SdpProblem::lmi_identity(int lmi, const HermVar& v, double scale) {
    lmi_map(lmi, v, [scale](const Mat& e) { return Mat(scale * e); });
}

void SdpProblem::add_inequality(const LinearExpr& expr) {
    for (auto& t : expr.terms)
        if (t.first < 0 || t.first >= nvars_) throw DimensionError("inequality variable out of range");
    ineqs_.push_back(expr);
}

void SdpProblem::add_trace_term(LinearExpr& e, const HermVar& v, const Mat& c, double scale) {
    for (int k = 0; k < v.dim * v.dim; ++k) {
        double a = (c * hermitian_basis(v.dim, k)).trace().real();
        if (a != 0.0) e.terms.emplace_back(v.offset + k, scale * a);
    }
}

Mat SdpProblem::value(const HermVar& v, const std::vector<double>& x) const {
    Mat m = Mat::Zero(v.dim, v.dim);
    for (int k = 0; k < v.dim * v.dim; ++k) m += x.at(v.offset + k) * hermitian_basis(v.dim, k);
    return m;
}

namespace {

using RMat = Eigen::MatrixXd;

struct Entry {
    int p, q;
    double v;
};

// Realified problem in the convention  X = sum_i F_i x_i - F0 >= 0.
struct Compiled {
    int m = 0;
    std::vector<int> sizes;                          // dense symmetric blocks
    std::vector<RMat> f0;                            // per block
    std::vector<std::vector<std::vector<Entry>>> f;  // [block][var] sparse entries
    int nlp = 0;
    RVec lp0;
    RMat lpa;  // nlp x m
    RVec c;
};

RMat realify(const Mat& h) {
    const Eigen::Index d = h.rows();
    RMat r(2 * d, 2 * d);
    r.topLeftCorner(d, d) = h.real();
    r.bottomRightCorner(d, d) = h.real();
    r.topRightCorner(d, d) = -h.imag();
    r.bottomLeftCorner(d, d) = h.imag();
    return r;
}

Compiled compile(const SdpProblem& p) {
    Compiled c;
    c.m = p.num_vars();
    c.c = Eigen::Map<const RVec>(p.objective().data(), c.m);
    for (const auto& l : p.lmis()) {
        const int n = 2 * l.dim;
        c.sizes.push_back(n);
        c.f0.push_back(-realify(hermitian_part(l.f0)));
        std::map<int, RMat> acc;
        for (const auto& [var, coef] : l.terms) {
            auto it = acc.find(var);
            RMat r = realify(hermitian_part(coef));
            if (it == acc.end())
                acc.emplace(var, r);
            else
                it->second += r;
        }
        std::vector<std::vector<Entry>> blk(c.m);
        for (const auto& [var, r] : acc) {
            double scale = r.cwiseAbs().maxCoeff();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (r(i, j) != 0.0 && std::abs(r(i, j)) > 1e-15 * scale) blk[var].push_back({i, j, r(i, j)});
        }
        c.f.push_back(std::move(blk));
    }
    c.nlp = static_cast<int>(p.inequalities().size());
    c.lp0 = RVec::Zero(c.nlp);
    c.lpa = RMat::Zero(c.nlp, c.m);
    for (int l = 0; l < c.nlp; ++l) {
        const auto& e = p.inequalities()[l];
        c.lp0(l) = -e.constant;
        for (const auto& [var, a] : e.terms) c.lpa(l, var) += a;
    }
    return c;
}

struct BlockVec {
    std::vector<RMat> s;
    RVec l;
};

double inner(const BlockVec& a, const BlockVec& b) {
    double v = a.l.dot(b.l);
    for (size_t k = 0; k < a.s.size(); ++k) v += a.s[k].cwiseProduct(b.s[k]).sum();
    return v;
}

double frob(const BlockVec& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

// sum_i F_i x_i over all blocks
BlockVec apply_f(const Compiled& c, const RVec& x) {
    BlockVec out;
    for (size_t b = 0; b < c.sizes.size(); ++b) {
        RMat m = RMat::Zero(c.sizes[b], c.sizes[b]);
        for (int i = 0; i < c.m; ++i) {
            if (x(i) == 0.0) continue;
            for (const auto& e : c.f[b][i]) m(e.p, e.q) += e.v * x(i);
        }
        out.s.push_back(std::move(m));
    }
    out.l = c.lpa * x;
    return out;
}

// <F_i, M> for all i
RVec adjoint_f(const Compiled& c, const BlockVec& m) {
    RVec out = c.lpa.transpose() * m.l;
    for (size_t b = 0; b < c.sizes.size(); ++b)
        for (int i = 0; i < c.m; ++i)
            for (const auto& e : c.f[b][i]) out(i) += e.v * m.s[b](e.q, e.p);
    return out;
}

double max_step(const RMat& x, const RMat& dx) {
    Eigen::LLT<RMat> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    RMat linv = llt.matrixL().solve(RMat::Identity(x.rows(), x.cols()));
    RMat m = linv * dx * linv.transpose();
    m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es(m, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues()(0);
    if (lmin >= 0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

double max_step_lp(const RVec& x, const RVec& dx) {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
    return a;
}

double max_step(const BlockVec& x, const BlockVec& dx) {
    double a = max_step_lp(x.l, dx.l);
    for (size_t b = 0; b < x.s.size(); ++b) a = std::min(a, max_step(x.s[b], dx.s[b]));
    return a;
}

bool positive_definite(const BlockVec& x) {
    if ((x.l.array() <= 0).any()) return false;
    for (const auto& s : x.s) {
        Eigen::LLT<RMat> llt(s);
        if (llt.info() != Eigen::Success) return false;
    }
    return true;
}

}  // namespace

void SdpProblem::write_sparse(std::ostream& os) const {
    Compiled c = compile(*this);
    const int nblocks = static_cast<int>(c.sizes.size()) + (c.nlp > 0 ? 1 : 0);
    os << "* realified Hermitian SDP; blocks of size 2d, negative size = diagonal block\n";
    os << c.m << "\n" << nblocks << "\n";
    for (int s : c.sizes) os << s << " ";
    if (c.nlp > 0) os << -c.nlp;
    os << "\n";
    os << std::setprecision(17);
    for (int i = 0; i < c.m; ++i) os << c.c(i) << (i + 1 < c.m ? " " : "\n");
    if (c.m == 0) os << "\n";
    for (size_t b = 0; b < c.sizes.size(); ++b)
        for (int i = 0; i < c.sizes[b]; ++i)
            for (int j = i; j < c.sizes[b]; ++j)
                if (c.f0[b](i, j) != 0.0) os << 0 << " " << b + 1 << " " << i + 1 << " " << j + 1 << " " << c.f0[b](i, j) << "\n";
    for (int l = 0; l < c.nlp; ++l)
        if (c.lp0(l) != 0.0) os << 0 << " " << nblocks << " " << l + 1 << " " << l + 1 << " " << c.lp0(l) << "\n";
    for (int v = 0; v < c.m; ++v) {
        for (size_t b = 0; b < c.sizes.size(); ++b)
            for (const auto& e : c.f[b][v])
                if (e.p <= e.q) os << v + 1 << " " << b + 1 << " " << e.p + 1 << " " << e.q + 1 << " " << e.v << "\n";
        for (int l = 0; l < c.nlp; ++l)
            if (c.lpa(l, v) != 0.0) os << v + 1 << " " << nblocks << " " << l + 1 << " " << l + 1 << " " << c.lpa(l, v) << "\n";
    }
}

SdpSolution sdp_solve(const SdpProblem& p, const SdpOptions& opt) {
    const Compiled c = compile(p);
    const int m = c.m;
    const size_t nb = c.sizes.size();
    SdpSolution sol;
    if (m == 0) throw ValidationError("SDP has no variables");

    int ntot = c.nlp;
    for (int s : c.sizes) ntot += s;

    BlockVec f0;
    f0.s = c.f0;
    f0.l = c.lp0;
    const double f0norm = frob(f0);
    const double cnorm = c.c.norm();

    const double lam = opt.initial_scale;
    RVec x = RVec::Zero(m);
    BlockVec X, Y;
    for (int s : c.sizes) {
        X.s.push_back(lam * RMat::Identity(s, s));
        Y.s.push_back(lam * RMat::Identity(s, s));
    }
    X.l = RVec::Constant(c.nlp, lam);
    Y.l = RVec::Constant(c.nlp, lam);

    auto residuals = [&](BlockVec& P, RVec& D) {
        P = apply_f(c, x);
        for (size_t b = 0; b < nb; ++b) P.s[b] -= c.f0[b] + X.s[b];
        P.l -= c.lp0 + X.l;
        D = c.c - adjoint_f(c, Y);
    };

    int stall = 0;
    // best iterate seen so far, by worst ratio of residual to tolerance
    double best_merit = std::numeric_limits<double>::infinity();
    RVec best_x = x;
    SdpSolution best = sol;
    for (int it = 0; it <= opt.max_iter; ++it) {
        BlockVec P;
        RVec D;
        residuals(P, D);
        const double pobj = c.c.dot(x);
        const double dobj = inner(f0, Y);
        const double mu = inner(X, Y) / ntot;
        sol.primal_infeasibility = frob(P) / (1.0 + f0norm);
        sol.dual_infeasibility = D.norm() / (1.0 + cnorm);
        sol.primal_value = pobj;
        sol.dual_value = dobj;
        sol.gap = std::abs(pobj - dobj) / std::max(1.0, 0.5 * (std::abs(pobj) + std::abs(dobj)));
        sol.iterations = it;
        if (opt.verbose)
            std::cerr << "it " << it << " pobj " << pobj << " dobj " << dobj << " pinf " << sol.primal_infeasibility
                      << " dinf " << sol.dual_infeasibility << " mu " << mu << "\n";

        const double merit = std::max({sol.primal_infeasibility / opt.feas_tol,
                                       sol.dual_infeasibility / opt.feas_tol, sol.gap / opt.gap_tol});
        if (merit < best_merit) {
            best_merit = merit;
            best_x = x;
            best = sol;
        }
        const bool pfeas = sol.primal_infeasibility <= opt.feas_tol;
        const bool dfeas = sol.dual_infeasibility <= opt.feas_tol;
        const double compl_rel = mu * ntot / std::max(1.0, 0.5 * (std::abs(pobj) + std::abs(dobj)));
        if (pfeas && dfeas && sol.gap <= opt.gap_tol && compl_rel <= 10 * opt.gap_tol) {
            sol.status = SdpStatus::optimal;
            break;
        }
        double xnorm = frob(X), ynorm = frob(Y);
        if (dfeas && dobj > 1e8 * (1.0 + std::abs(pobj)) && ynorm > 1e8) {
            sol.status = SdpStatus::infeasible;
            sol.message = "dual objective diverges: primal infeasible";
            break;
        }
        if (pfeas && pobj < -1e8 * (1.0 + std::abs(dobj)) && xnorm > 1e8) {
            sol.status = SdpStatus::unbounded;
            sol.message = "primal objective diverges";
            break;
        }
        if (ynorm > 1e14 && !pfeas) {
            sol.status = SdpStatus::infeasible;
            sol.message = "dual iterates diverge: primal infeasible";
            break;
        }
        if (xnorm > 1e14 && !dfeas) {
            sol.status = SdpStatus::unbounded;
            sol.message = "primal iterates diverge: dual infeasible";
            break;
        }
        if (it == opt.max_iter) {
            sol.status = SdpStatus::max_iter;
            sol.message = "iteration limit reached";
            break;
        }

        // X^{-1}
        std::vector<RMat> xinv(nb);
        bool bad = false;
        for (size_t b = 0; b < nb; ++b) {
            Eigen::LLT<RMat> llt(X.s[b]);
            if (llt.info() != Eigen::Success) {
                bad = true;
                break;
            }
            xinv[b] = llt.solve(RMat::Identity(c.sizes[b], c.sizes[b]));
            xinv[b] = 0.5 * (xinv[b] + xinv[b].transpose());
        }
        if (bad || (X.l.array() <= 0).any()) {
            sol.status = SdpStatus::numerical_error;
            sol.message = "primal slack lost definiteness";
            break;
        }

        // Schur complement B_ij = Tr(F_i X^-1 F_j Y)
        RMat B = c.lpa.transpose() * (Y.l.cwiseQuotient(X.l)).asDiagonal() * c.lpa;
        for (size_t b = 0; b < nb; ++b) {
            const auto& fb = c.f[b];
            const RMat& xi = xinv[b];
            const RMat& yb = Y.s[b];
            for (int i = 0; i < m; ++i) {
                if (fb[i].empty()) continue;
                for (int j = i; j < m; ++j) {
                    if (fb[j].empty()) continue;
                    double s = 0.0;
                    for (const auto& ei : fb[i])
                        for (const auto& ej : fb[j]) s += ei.v * ej.v * xi(ei.q, ej.p) * yb(ej.q, ei.p);
                    B(i, j) += s;
                    if (j != i) B(j, i) += s;
                }
            }
        }
        B = 0.5 * (B + B.transpose());
        Eigen::LLT<RMat> bllt(B);
        Eigen::LDLT<RMat> bldlt;
        bool use_llt = bllt.info() == Eigen::Success;
        if (!use_llt) bldlt.compute(B);

        auto direction = [&](const BlockVec& R, RVec& dx, BlockVec& dX, BlockVec& dY) {
            // rhs_i = <F_i, X^-1 (R - P Y)> - D_i
            BlockVec M;
            for (size_t b = 0; b < nb; ++b) M.s.push_back(xinv[b] * (R.s[b] - P.s[b] * Y.s[b]));
            M.l = (R.l - P.l.cwiseProduct(Y.l)).cwiseQuotient(X.l);
            RVec rhs = adjoint_f(c, M) - D;
            dx = use_llt ? RVec(bllt.solve(rhs)) : RVec(bldlt.solve(rhs));
            dX = apply_f(c, dx);
            for (size_t b = 0; b < nb; ++b) dX.s[b] += P.s[b];
            dX.l += P.l;
            dY.s.clear();
            for (size_t b = 0; b < nb; ++b) {
                RMat d = xinv[b] * (R.s[b] - dX.s[b] * Y.s[b]);
                dY.s.push_back(0.5 * (d + d.transpose()));
            }
            dY.l = (R.l - dX.l.cwiseProduct(Y.l)).cwiseQuotient(X.l);
        };

        // predictor
        BlockVec R;
        for (size_t b = 0; b < nb; ++b) R.s.push_back(-X.s[b] * Y.s[b]);
        R.l = -X.l.cwiseProduct(Y.l);
        RVec dx;
        BlockVec dX, dY;
        direction(R, dx, dX, dY);
        double ap = std::min(1.0, max_step(X, dX));
        double ad = std::min(1.0, max_step(Y, dY));
        BlockVec Xa = X, Ya = Y;
        for (size_t b = 0; b < nb; ++b) {
            Xa.s[b] += ap * dX.s[b];
            Ya.s[b] += ad * dY.s[b];
        }
        Xa.l += ap * dX.l;
        Ya.l += ad * dY.l;
        double mu_aff = inner(Xa, Ya) / ntot;
        double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);
        if (!pfeas || !dfeas) sigma = std::max(sigma, 0.1);

        // corrector
        for (size_t b = 0; b < nb; ++b) {
            R.s[b] = sigma * mu * RMat::Identity(c.sizes[b], c.sizes[b]) - X.s[b] * Y.s[b] - dX.s[b] * dY.s[b];
        }
        R.l = RVec::Constant(c.nlp, sigma * mu) - X.l.cwiseProduct(Y.l) - dX.l.cwiseProduct(dY.l);
        direction(R, dx, dX, dY);
        const double frac = 0.95;
        ap = std::min(1.0, frac * max_step(X, dX));
        ad = std::min(1.0, frac * max_step(Y, dY));
        if (!(ap > 0) || !(ad > 0) || !std::isfinite(dx.norm())) {
            sol.status = SdpStatus::numerical_error;
            sol.message = "no admissible step";
            break;
        }
        // round-off can push a step past the boundary; shrink until both slacks factor
        BlockVec Xn, Yn;
        for (int tries = 0;; ++tries) {
            Xn = X;
            Yn = Y;
            for (size_t b = 0; b < nb; ++b) {
                Xn.s[b] += ap * dX.s[b];
                Xn.s[b] = 0.5 * (Xn.s[b] + Xn.s[b].transpose());
                Yn.s[b] += ad * dY.s[b];
                Yn.s[b] = 0.5 * (Yn.s[b] + Yn.s[b].transpose());
            }
            Xn.l += ap * dX.l;
            Yn.l += ad * dY.l;
            if (positive_definite(Xn) && positive_definite(Yn)) break;
            if (tries == 30) {
                ap = ad = 0.0;
                break;
            }
            ap *= 0.5;
            ad *= 0.5;
        }
        if (ap == 0.0) {
            sol.status = SdpStatus::numerical_error;
            sol.message = "slack lost definiteness";
            break;
        }
        x += ap * dx;
        X = std::move(Xn);
        Y = std::move(Yn);
        if (ap < 1e-8 && ad < 1e-8) {
            if (++stall >= 5) {
                sol.status = SdpStatus::numerical_error;
                sol.message = "step length stalled";
                break;
            }
        } else {
            stall = 0;
        }
    }

    if (sol.status == SdpStatus::numerical_error || sol.status == SdpStatus::max_iter) {
        // report the best iterate instead of the one that broke down
        SdpStatus st = sol.status;
        std::string msg = sol.message;
        int its = sol.iterations;
        sol = best;
        sol.status = st;
        sol.message = msg;
        sol.iterations = its;
        x = best_x;
        if (best_merit <= opt.fallback_factor) {
            sol.status = SdpStatus::optimal;
            sol.message = "accepted best iterate at reduced accuracy after: " + msg;
        }
    }
    sol.x.assign(x.data(), x.data() + m);
    // constraint violation at x
    BlockVec S = apply_f(c, x);
    double viol = 0.0;
    for (size_t b = 0; b < nb; ++b) {
        RMat s = S.s[b] - c.f0[b];
        Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
        viol = std::max(viol, -es.eigenvalues()(0));
    }
    for (int l = 0; l < c.nlp; ++l) viol = std::max(viol, -(S.l(l) - c.lp0(l)));
    sol.max_violation = viol;
    return sol;
}

}  // namespace qthermo
