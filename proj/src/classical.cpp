#include "qthermo/classical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace qthermo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Segment {
    double len;
    double slope;
};

void check_eps(double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps must lie in [0,1)");
}

void check_diagonal(const Mat& m, double tol, const char* what) {
    Mat off = m;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > tol) throw ValidationError(std::string(what) + " is not diagonal");
}

double multinomial(int n, const std::vector<int>& k) {
    double r = std::lgamma(n + 1.0);
    for (int x : k) r -= std::lgamma(x + 1.0);
    return std::round(std::exp(r));
}

// All compositions of n into d nonnegative parts.
void compositions(int n, int d, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f) {
    if (static_cast<int>(cur.size()) == d - 1) {
        cur.push_back(n);
        f(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= n; ++k) {
        cur.push_back(k);
        compositions(n - k, d, cur, f);
        cur.pop_back();
    }
}

// Largest total (in p) under a total weight budget, items taken fractionally; returns the
// piecewise-linear curve as its breakpoints in weight.
std::vector<Segment> knapsack_curve(const std::vector<ClassicalEntry>& es, const std::function<double(const ClassicalEntry&)>& w) {
    std::vector<const ClassicalEntry*> items;
    for (const auto& e : es)
        if (e.p > 0 && e.mult > 0) items.push_back(&e);
    std::sort(items.begin(), items.end(),
              [&](const ClassicalEntry* x, const ClassicalEntry* y) { return x->p * w(*y) > y->p * w(*x); });
    std::vector<Segment> segs;
    for (const auto* e : items) segs.push_back({e->mult * w(*e), e->p / w(*e)});
    return segs;
}

// Concave curve s -> sum_a mult * min(p, rate * g * s), as segments in s.
std::vector<Segment> saturation_curve(const std::vector<ClassicalEntry>& es, double rate) {
    std::vector<const ClassicalEntry*> items;
    double slope = 0.0;
    for (const auto& e : es)
        if (e.p > 0 && e.mult > 0) {
            items.push_back(&e);
            slope += rate * e.mult * e.g;
        }
    std::sort(items.begin(), items.end(),
              [](const ClassicalEntry* x, const ClassicalEntry* y) { return x->p * y->g < y->p * x->g; });
    std::vector<Segment> segs;
    double s = 0.0;
    for (const auto* e : items) {
        double bp = e->p / (rate * e->g);
        if (bp > s) {
            segs.push_back({bp - s, slope});
            s = bp;
        }
        slope -= rate * e->mult * e->g;
    }
    return segs;
}

// Greedy over concave pieces: spend a budget on the steepest pieces first.
double fill_budget(std::vector<Segment> segs, double budget) {
    std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.slope > b.slope; });
    double gain = 0.0;
    for (const auto& s : segs) {
        if (budget <= 0) break;
        double take = std::min(s.len, budget);
        gain += take * s.slope;
        budget -= take;
    }
    return gain;
}

// Cheapest budget reaching a gain target over concave pieces.
double reach_target(std::vector<Segment> segs, double target) {
    std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.slope > b.slope; });
    double cost = 0.0;
    for (const auto& s : segs) {
        if (target <= 0) break;
        if (s.slope <= 0) continue;
        double full = s.len * s.slope;
        if (full >= target) {
            cost += target / s.slope;
            target = 0;
            break;
        }
        cost += s.len;
        target -= full;
    }
    if (target > 1e-12) throw SolverError("classical oracle: target mass not reachable");
    return cost;
}

// min t with sum_b mult_b K_b(t) >= target, K_b the fractional knapsack of row b with capacity t.
double hypothesis_threshold(const ClassicalInstance& c, double target,
                            const std::function<double(const ClassicalEntry&)>& w) {
    std::vector<std::vector<Segment>> curves;
    std::vector<double> bps{0.0};
    for (const auto& gr : c.groups) {
        curves.push_back(knapsack_curve(gr.entries, w));
        double acc = 0.0;
        for (const auto& s : curves.back()) bps.push_back(acc += s.len);
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    auto total = [&](double t) {
        double v = 0.0;
        for (size_t i = 0; i < c.groups.size(); ++i) {
            double cap = t, k = 0.0;
            for (const auto& s : curves[i]) {
                double take = std::min(cap, s.len);
                k += take * s.slope;
                cap -= take;
                if (cap <= 0) break;
            }
            v += c.groups[i].mult * k;
        }
        return v;
    };
    double prev_t = 0.0, prev_v = 0.0;
    for (double t : bps) {
        double v = total(t);
        // rounding can leave the full-capacity total a hair below a target of 1
        if (v >= target - 1e-12) {
            if (v <= target) return t;
            if (v <= prev_v) return t;
            return prev_t + (target - prev_v) * (t - prev_t) / (v - prev_v);
        }
        prev_t = t;
        prev_v = v;
    }
    throw SolverError("classical oracle: acceptance target not reachable");
}

ClassicalInstance uniformized(const ClassicalInstance& c) {
    ClassicalInstance u = c;
    const double g = std::exp2(-c.log2_dA);
    for (auto& gr : u.groups)
        for (auto& e : gr.entries) e.g = g;
    return u;
}

}  // namespace

double ClassicalInstance::total_mass() const {
    double m = 0.0;
    for (const auto& gr : groups)
        for (const auto& e : gr.entries) m += gr.mult * e.mult * e.p;
    return m;
}

ClassicalInstance classical_instance(const ThermoState& ts, double tol) {
    return classical_power(ts, 1, tol);
}

ClassicalInstance classical_power(const ThermoState& ts, int n, double tol) {
    if (n < 1) throw ValidationError("number of copies must be positive");
    check_diagonal(ts.rho().mat(), tol, "rho_AB");
    check_diagonal(ts.gamma().mat(), tol, "gamma_A");
    const int dA = ts.dA(), dB = ts.dB();
    std::vector<std::vector<double>> p(dA, std::vector<double>(dB));
    std::vector<double> g(dA);
    for (int a = 0; a < dA; ++a) {
        g[a] = ts.gamma().mat()(a, a).real();
        for (int b = 0; b < dB; ++b) p[a][b] = std::max(0.0, ts.rho().mat()(a * dB + b, a * dB + b).real());
    }
    ClassicalInstance out;
    out.log2_dA = n * std::log2(static_cast<double>(dA));
    std::vector<int> cur;
    compositions(n, dB, cur, [&](const std::vector<int>& nb) {
        ClassicalGroup gr;
        gr.mult = multinomial(n, nb);
        // one a-composition per b symbol; entries are their products
        std::vector<ClassicalEntry> acc{{1.0, 1.0, 1.0}};
        for (int b = 0; b < dB; ++b) {
            std::vector<ClassicalEntry> next;
            std::vector<int> ca;
            compositions(nb[b], dA, ca, [&](const std::vector<int>& ka) {
                double pp = 1.0, gg = 1.0;
                for (int a = 0; a < dA; ++a) {
                    pp *= std::pow(p[a][b], ka[a]);
                    gg *= std::pow(g[a], ka[a]);
                }
                double m = multinomial(nb[b], ka);
                for (const auto& e : acc) next.push_back({e.p * pp, e.g * gg, e.mult * m});
            });
            acc = std::move(next);
        }
        gr.entries = std::move(acc);
        out.groups.push_back(std::move(gr));
    });
    return out;
}

double classical_d_min_smoothed(const std::vector<ClassicalEntry>& pairs, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in [0,1]");
    if (eps >= 1.0) return kInf;
    // here g holds the second distribution
    std::vector<const ClassicalEntry*> items;
    for (const auto& e : pairs)
        if (e.p > 0 && e.mult > 0) items.push_back(&e);
    std::sort(items.begin(), items.end(),
              [](const ClassicalEntry* x, const ClassicalEntry* y) { return x->g * y->p < y->g * x->p; });
    double need = 1.0 - eps, cost = 0.0;
    for (const auto* e : items) {
        if (need <= 0) break;
        double f = std::min(1.0, need / (e->mult * e->p));
        cost += f * e->mult * e->g;
        need -= f * e->mult * e->p;
    }
    if (need > 1e-12) throw SolverError("classical oracle: acceptance target not reachable");
    return cost <= 0 ? kInf : -std::log2(cost);
}

double classical_i_min_down_smoothed(const ClassicalInstance& c, double eps) {
    check_eps(eps);
    return -std::log2(hypothesis_threshold(c, 1.0 - eps, [](const ClassicalEntry& e) { return e.g; }));
}

double classical_h_max_cond_smoothed(const ClassicalInstance& c, double eps) {
    check_eps(eps);
    return std::log2(hypothesis_threshold(c, 1.0 - eps, [](const ClassicalEntry&) { return 1.0; }));
}

double classical_max_up_kept_mass(const ClassicalInstance& c, double t) {
    std::vector<Segment> all;
    for (const auto& gr : c.groups) {
        // kept(s) = min(s, h(s)) with h the saturation curve at rate t
        std::vector<Segment> h = saturation_curve(gr.entries, t);
        double total = 0.0;
        for (const auto& e : gr.entries) total += e.mult * std::max(0.0, e.p);
        std::vector<Segment> kept;
        double s = 0.0, hv = 0.0;
        bool crossed = false;
        for (const auto& seg : h) {
            if (crossed) {
                kept.push_back(seg);
                continue;
            }
            double hs_end = hv + seg.len * seg.slope, s_end = s + seg.len;
            if (hs_end >= s_end) {
                s = s_end;
                hv = hs_end;
                continue;
            }
            // h drops below the diagonal inside this segment
            double cross = s + (hv - s) / (1.0 - seg.slope);
            kept.push_back({cross, 1.0});
            kept.push_back({s_end - cross, seg.slope});
            crossed = true;
        }
        if (!crossed) kept.push_back({total, 1.0});  // crossing on the final flat part
        for (auto& k : kept) all.push_back({gr.mult * k.len, k.slope});
    }
    return fill_budget(all, 1.0);
}

double classical_i_max_up_smoothed(const ClassicalInstance& c, double eps) {
    check_eps(eps);
    const double target = 1.0 - eps;
    // at t_max every row fits: tau = rho with sigma_B = rho_B
    double tmax = 0.0;
    for (const auto& gr : c.groups) {
        double pb = 0.0;
        for (const auto& e : gr.entries) pb += e.mult * e.p;
        for (const auto& e : gr.entries)
            if (e.p > 0) tmax = std::max(tmax, e.p / (e.g * pb));
    }
    double hi = std::log2(tmax) + 1e-9, lo = -200.0;
    if (classical_max_up_kept_mass(c, std::exp2(hi)) < target - 1e-12)
        throw SolverError("classical oracle: upper bracket infeasible");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        if (classical_max_up_kept_mass(c, std::exp2(mid)) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double classical_h_min_cond_smoothed(const ClassicalInstance& c, double eps) {
    return c.log2_dA - classical_i_max_up_smoothed(uniformized(c), eps);
}

double classical_i_max_down_smoothed(const ClassicalInstance& c, double eps) {
    check_eps(eps);
    std::vector<Segment> all;
    for (const auto& gr : c.groups)
        for (const auto& s : saturation_curve(gr.entries, 1.0)) all.push_back({gr.mult * s.len, s.slope});
    return std::log2(reach_target(all, 1.0 - eps));
}

double classical_oracle(SmoothedKind kind, const ThermoState& ts, double eps) {
    ClassicalInstance c = classical_instance(ts);
    switch (kind) {
        case SmoothedKind::d_min: {
            std::vector<ClassicalEntry> pairs;
            const int dA = ts.dA(), dB = ts.dB();
            Mat rb = ts.rho_B();
            for (int a = 0; a < dA; ++a)
                for (int b = 0; b < dB; ++b)
                    pairs.push_back({ts.rho().mat()(a * dB + b, a * dB + b).real(),
                                     ts.gamma().mat()(a, a).real() * rb(b, b).real(), 1.0});
            return classical_d_min_smoothed(pairs, eps);
        }
        case SmoothedKind::i_min_down: return classical_i_min_down_smoothed(c, eps);
        case SmoothedKind::h_max_up: return classical_h_max_cond_smoothed(c, eps);
        case SmoothedKind::i_max_up: return classical_i_max_up_smoothed(c, eps);
        case SmoothedKind::h_min_down: return classical_h_min_cond_smoothed(c, eps);
        case SmoothedKind::i_max_down: return classical_i_max_down_smoothed(c, eps);
    }
    throw ValidationError("unknown smoothed quantity");
}

}  // namespace qthermo
