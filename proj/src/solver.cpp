#include "wpcn/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "wpcn/io.hpp"
#include "wpcn/optim.hpp"

namespace wpcn {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr int kGradientIterCap = 120;   // before the time-scan refinement
constexpr int kArmijoHalvings = 60;
constexpr double kTieBand = 1e-9;       // relative band for tight-causality set
constexpr double kBoundBand = 1e-9;     // within this of a box face counts as on it
constexpr double kKktNoise = 16.0;      // summation-noise safety factor

// Measurement floor of the KKT residual: cap-normalized coordinates stretch
// the time direction by cap/e ~ t_cap, so the float noise of the stationarity
// balance sum(e g) = q shows up scaled by q t_cap. Below this level the
// residual reads arithmetic noise, not distance from optimality.
double kkt_floor(double q, double tol) {
    return std::max(tol,
                    kKktNoise * q * kTCap * std::numeric_limits<double>::epsilon());
}

double link_gain(const Instance& inst, int m, int n) {
    return m == n ? inst.g_direct[n] : inst.g_cross[m][n];
}

// Received power level at receiver n: all transmitters plus noise.
double w_level(std::span<const double> p, const Instance& inst, int n) {
    double s = inst.params.noise_power;
    for (int m = 0; m < inst.num_pairs(); ++m) s += p[m] * link_gain(inst, m, n);
    return s;
}

// Interference-plus-noise level at receiver n.
double v_level(std::span<const double> p, const Instance& inst, int n) {
    double s = inst.params.noise_power;
    for (int m = 0; m < inst.num_pairs(); ++m)
        if (m != n) s += p[m] * inst.g_cross[m][n];
    return s;
}

// Causality ratio 1 + (p_n + p_c)/e_n; 1 when nothing is consumed.
double t_needed(double p, double e, double p_c) {
    const double spend = p + p_c;
    if (spend <= 0.0) return 1.0;
    return 1.0 + spend / e;  // e == 0 gives +inf, which is the right answer
}

// State shared by the subproblem inner loops: the surrogate's linear part is
// frozen at p_ref, so only sum_n w_n(p) - <c0, p> + K0 - q t(p) varies.
struct SurrogateObjective {
    const Instance* inst;
    double q;
    std::vector<double> c0;   // summed v-gradients (the interference penalty)
    double K0;                // constants from the linearization

    double phi(std::span<const double> p) const {
        double s = K0;
        for (int n = 0; n < inst->num_pairs(); ++n) s += std::log2(w_level(p, *inst, n));
        for (std::size_t l = 0; l < c0.size(); ++l) s -= c0[l] * p[l];
        return s - q * t_of_p(p, *inst);
    }

    // Gradient of the smooth part (everything except -q t(p)).
    void smooth_grad(std::span<const double> p, std::vector<double>& g) const {
        const int N = inst->num_pairs();
        for (int l = 0; l < N; ++l) g[l] = -c0[l];
        for (int n = 0; n < N; ++n) {
            const double den = kLn2 * w_level(p, *inst, n);
            for (int l = 0; l < N; ++l) g[l] += link_gain(*inst, l, n) / den;
        }
    }
};

SurrogateObjective make_objective(const Instance& inst, double q,
                                  std::span<const double> p_ref) {
    SurrogateObjective obj;
    obj.inst = &inst;
    obj.q = q;
    const int N = inst.num_pairs();
    obj.c0.assign(N, 0.0);
    obj.K0 = 0.0;
    for (int n = 0; n < N; ++n) {
        obj.K0 -= v_term(p_ref, inst, n);
        const std::vector<double> gv = grad_v(p_ref, inst, n);
        for (int l = 0; l < N; ++l) obj.c0[l] += gv[l];
    }
    for (int l = 0; l < N; ++l) obj.K0 += obj.c0[l] * p_ref[l];
    return obj;
}

// Users whose causality ratio sits at the max within a relative band; these
// hold the eliminated t and receive a share of its subgradient.
std::vector<int> tie_set(std::span<const double> p, const Instance& inst,
                         const std::vector<double>& caps, double t) {
    std::vector<int> tie;
    if (t <= 1.0) return tie;
    const double floor_s = t * (1.0 - kTieBand);
    for (int n = 0; n < inst.num_pairs(); ++n) {
        if (caps[n] <= 0.0) continue;
        if (t_needed(p[n], inst.harvest_rate[n], inst.params.circuit_power) >= floor_s)
            tie.push_back(n);
    }
    return tie;
}

// KKT residual of the reduced problem in normalized coordinates x = p/cap:
// the smallest sup-norm of the projected gradient achievable over simplex
// weights mu splitting -q dt among the tight users, one-sided at the box
// bounds (a tight user parked at a bound absorbs slack of the clamped sign
// for free). Whether a candidate residual z is achievable reduces to one
// weight interval per tight user, so the minimum is a bisection on z.
double kkt_residual(std::span<const double> p, const SurrogateObjective& obj,
                    const std::vector<double>& caps,
                    const std::vector<double>& smooth_g,
                    const std::vector<int>& tie) {
    const Instance& inst = *obj.inst;
    const int N = inst.num_pairs();
    std::vector<char> tied(N, 0);
    double res = 0.0;
    if (!tie.empty() && obj.q > 0.0) {
        for (int l : tie) tied[l] = 1;
        auto clamped = [&](int l, double r) {
            const double x = p[l] / caps[l];
            if (x <= kBoundBand) return std::max(0.0, r);
            if (x >= 1.0 - kBoundBand) return -std::min(0.0, r);
            return std::abs(r);
        };
        auto feasible = [&](double z) {
            double lo_sum = 0.0, hi_sum = 0.0;
            bool open_ended = false;
            for (int l : tie) {
                const double e = inst.harvest_rate[l];
                const double c = caps[l];
                const double x = p[l] / c;
                const double m_lo =
                    x >= 1.0 - kBoundBand
                        ? 0.0
                        : std::max(0.0, e * (c * smooth_g[l] - z) /
                                            (c * obj.q));
                if (x <= kBoundBand) {  // at the floor: extra weight is free
                    lo_sum += m_lo;
                    open_ended = true;
                    continue;
                }
                const double m_hi = e * (c * smooth_g[l] + z) / (c * obj.q);
                if (m_hi < m_lo) return false;
                lo_sum += m_lo;
                hi_sum += m_hi;
            }
            return lo_sum <= 1.0 && (open_ended || hi_sum >= 1.0);
        };
        // the equal split witnesses some residual, so bisect downward from it
        double z_hi = 0.0;
        const double share = 1.0 / static_cast<double>(tie.size());
        for (int l : tie)
            z_hi = std::max(
                z_hi, clamped(l, caps[l] * (smooth_g[l] -
                                            obj.q * share /
                                                inst.harvest_rate[l])));
        if (feasible(0.0)) {
            z_hi = 0.0;
        } else {
            double z_lo = 0.0;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (z_lo + z_hi);
                (feasible(mid) ? z_hi : z_lo) = mid;
            }
        }
        res = z_hi;
    }
    for (int l = 0; l < N; ++l) {
        if (caps[l] <= 0.0 || tied[l]) continue;
        double r = smooth_g[l] * caps[l];
        const double x = p[l] / caps[l];
        // within dust of a face, the blocked direction is worth only the
        // remaining travel |g| dp, not the cap-normalized gradient
        if (x <= kBoundBand) {
            if (r < 0.0) r *= x;
        } else if (x >= 1.0 - kBoundBand) {
            if (r > 0.0) r *= 1.0 - x;
        }
        res = std::max(res, std::abs(r));
    }
    return res;
}

// Box-constrained maximization of the smooth part (everything but -q t) over
// the listed users. Cyclic coordinate ascent with an exact 1-D bisection per
// coordinate: the partial derivative sum_n a_n/(ln2 (b_n + a_n x)) - c0_l is
// monotone decreasing, so each update is a root find, immune to the orders-
// of-magnitude gradient disparity between users near and far from the noise
// floor.
void maximize_free_users(const SurrogateObjective& obj, std::vector<double>& p,
                         const std::vector<int>& free_users,
                         const std::vector<double>& ub) {
    if (free_users.empty()) return;
    const Instance& inst = *obj.inst;
    const int N = inst.num_pairs();
    std::vector<double> base(N);
    for (int sweep = 0; sweep < 60; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < free_users.size(); ++i) {
            const int l = free_users[i];
            const double u = ub[i];
            if (u <= 0.0) {
                p[l] = 0.0;
                continue;
            }
            for (int n = 0; n < N; ++n) {
                base[n] = inst.params.noise_power;
                for (int m = 0; m < N; ++m)
                    if (m != l) base[n] += p[m] * link_gain(inst, m, n);
            }
            auto deriv = [&](double x) {
                double s = -obj.c0[l];
                for (int n = 0; n < N; ++n) {
                    const double a = link_gain(inst, l, n);
                    if (a > 0.0) s += a / (kLn2 * (base[n] + a * x));
                }
                return s;
            };
            const double old = p[l];
            double nx;
            if (deriv(0.0) <= 0.0) nx = 0.0;
            else if (deriv(u) >= 0.0) nx = u;
            else {
                double lo = 0.0, hi = u;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (deriv(mid) > 0.0 ? lo : hi) = mid;
                }
                nx = 0.5 * (lo + hi);
            }
            p[l] = nx;
            moved = std::max(moved, std::abs(nx - old));
        }
        // run to the exact float fixpoint: curvatures are steep enough that a
        // couple of ulps in p already shows up in the KKT residual
        if (moved == 0.0) break;
    }
}

// Refinement: scan the eliminated variable. The region {0 <= p <= cap,
// p_n <= (t-1) e_n - p_c} is jointly convex in (p, t) and smooth(p) - q t is
// concave, so its partial maximum over p at fixed t is concave in t. Golden
// section over t with a warm-started box ascent per evaluation locates the
// peak; a derivative-sign bisection then pins the stationary t to machine
// precision (envelope theorem: the slope is the sum of e_n dphi/dp_n over
// users parked on the causality line, minus q).
struct ScanResult {
    std::vector<double> p;
    double value;
};

ScanResult scan_over_t(const SurrogateObjective& obj,
                       const std::vector<double>& p_start,
                       const std::vector<double>& caps, double t_hint) {
    const Instance& inst = *obj.inst;
    const int N = inst.num_pairs();
    const double p_c = inst.params.circuit_power;
    std::vector<int> active;
    // every active user owes its circuit power even at p_n = 0, so t below
    // the worst zero-power causality line is infeasible outright
    double t_lo = 1.0;
    for (int n = 0; n < N; ++n) {
        if (caps[n] <= 0.0) continue;
        active.push_back(n);
        t_lo = std::max(t_lo, t_needed(0.0, inst.harvest_rate[n], p_c));
    }

    std::vector<double> p_work = p_start;
    std::vector<double> ub(active.size());
    auto smooth_at = [&](double t) {
        for (std::size_t i = 0; i < active.size(); ++i) {
            const int l = active[i];
            ub[i] = std::clamp((t - 1.0) * inst.harvest_rate[l] - p_c, 0.0,
                               caps[l]);
            p_work[l] = std::min(p_work[l], ub[i]);
        }
        maximize_free_users(obj, p_work, active, ub);
        return obj.phi(p_work) + obj.q * t_of_p(p_work, inst);
    };
    auto value_at = [&](double t) { return smooth_at(t) - obj.q * t; };

    std::vector<double> grad(N);
    auto slope_at = [&](double t) {
        value_at(t);
        obj.smooth_grad(p_work, grad);
        double d = -obj.q;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const int l = active[i];
            // a user parked on its causality cap (including a zero-width one
            // at t_lo) gains e_l per unit of extra t, weighted by its
            // nonnegative cap multiplier
            if (ub[i] < caps[l] && p_work[l] >= ub[i] * (1.0 - kTieBand))
                d += std::max(0.0, grad[l]) * inst.harvest_rate[l];
        }
        return d;
    };
    auto expand_and_bisect = [&](double lo, double hi, double& t_out) {
        for (int r = 0; r < 40 && slope_at(lo) < 0.0 && lo > t_lo; ++r)
            lo = std::max(t_lo, lo - 4.0 * (hi - lo));
        for (int r = 0; r < 40 && slope_at(hi) > 0.0 && hi < kTCap; ++r)
            hi = std::min(kTCap, hi + 4.0 * (hi - lo));
        if (!(slope_at(lo) >= 0.0 && slope_at(hi) <= 0.0)) return false;
        for (int it = 0; it < 90; ++it) {
            const double mid = 0.5 * (lo + hi);
            (slope_at(mid) >= 0.0 ? lo : hi) = mid;
        }
        t_out = 0.5 * (lo + hi);
        return true;
    };

    double t_star = t_lo;
    bool pinned = false;
    if (slope_at(t_lo) <= 0.0) {
        pinned = true;  // concave and falling from the left edge: boundary max
    } else if (t_hint >= t_lo && t_hint <= kTCap) {
        pinned = expand_and_bisect(std::max(t_lo, t_hint * (1.0 - 1e-3)),
                                   std::min(kTCap, t_hint * (1.0 + 1e-3)),
                                   t_star);
    }

    double v_best;
    std::vector<double> p_best;
    if (pinned) {
        v_best = value_at(t_star);
        p_best = p_work;
    } else {
        const GoldenResult g =
            golden_section_max(value_at, t_lo, kTCap, 1e-10, 400);
        v_best = value_at(g.x);
        p_best = p_work;
        if (expand_and_bisect(std::max(t_lo, g.x * (1.0 - 1e-6)),
                              std::min(kTCap, g.x * (1.0 + 1e-6)), t_star)) {
            const double val = value_at(t_star);
            // stationarity wins ties inside the value-noise band
            if (val >= v_best - 1e-13 * (1.0 + std::abs(v_best))) {
                v_best = val;
                p_best = p_work;
            }
        }
    }
    ScanResult out;
    out.p = std::move(p_best);
    out.value = obj.phi(out.p);  // t re-eliminated: never worse than scanned t
    return out;
}

void check_causality(const Allocation& alloc, const Instance& inst,
                     const std::vector<double>& caps) {
    const double p_c = inst.params.circuit_power;
    for (int n = 0; n < inst.num_pairs(); ++n) {
        if (caps[n] <= 0.0) continue;  // excluded: powered off entirely
        const double spend = alloc.p[n] + p_c;
        const double harvest = (alloc.t - 1.0) * inst.harvest_rate[n];
        if (spend - harvest > 1e-9 * std::max({spend, harvest, 1e-300}))
            throw std::logic_error("energy causality violated in recovered allocation");
    }
}

}  // namespace

void SolverOptions::validate() const {
    if (!(q_init > 0.0)) throw std::invalid_argument("q_init must be > 0");
    if (!(outer_tol > 0.0) || !(inner_tol > 0.0) || !(subproblem_tol > 0.0))
        throw std::invalid_argument("tolerances must be > 0");
    if (max_outer < 1 || max_inner < 1)
        throw std::invalid_argument("iteration caps must be >= 1");
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_outer: return "max_outer";
        case Termination::max_inner: return "max_inner";
        case Termination::infeasible: return "infeasible";
    }
    return "unknown";
}

const char* to_string(InitRule r) {
    return r == InitRule::equal_split ? "equal-split" : "zero-plus-epsilon";
}

std::vector<double> power_caps(const Instance& inst) {
    std::vector<double> caps(inst.num_pairs());
    for (int n = 0; n < inst.num_pairs(); ++n)
        caps[n] = (kTCap - 1.0) * inst.harvest_rate[n] - inst.params.circuit_power;
    return caps;
}

double w_term(std::span<const double> p, const Instance& inst, int n) {
    return std::log2(w_level(p, inst, n));
}

double v_term(std::span<const double> p, const Instance& inst, int n) {
    return std::log2(v_level(p, inst, n));
}

double t_of_p(std::span<const double> p, const Instance& inst) {
    double t = 1.0;
    for (int n = 0; n < inst.num_pairs(); ++n)
        t = std::max(t, t_needed(p[n], inst.harvest_rate[n],
                                 inst.params.circuit_power));
    return t;
}

double f_true(double t, double q, std::span<const double> p, const Instance& inst) {
    double rate = 0.0;
    for (int n = 0; n < inst.num_pairs(); ++n)
        rate += w_term(p, inst, n) - v_term(p, inst, n);
    return rate - q * t;
}

std::vector<double> grad_v(std::span<const double> p_ref, const Instance& inst, int n) {
    const int N = inst.num_pairs();
    std::vector<double> g(N, 0.0);
    const double den = kLn2 * v_level(p_ref, inst, n);
    for (int l = 0; l < N; ++l)
        if (l != n) g[l] = inst.g_cross[l][n] / den;
    return g;
}

double surrogate_value(std::span<const double> p, double t, double q,
                       std::span<const double> p_ref, const Instance& inst) {
    // grouped exactly like f_true so the bound is bitwise-tight at p == p_ref
    double rate = 0.0;
    for (int n = 0; n < inst.num_pairs(); ++n) {
        double lin = v_term(p_ref, inst, n);
        const std::vector<double> gv = grad_v(p_ref, inst, n);
        for (int l = 0; l < inst.num_pairs(); ++l)
            lin += gv[l] * (p[l] - p_ref[l]);
        rate += w_term(p, inst, n) - lin;
    }
    return rate - q * t;
}

SubproblemResult convex_subproblem(const Instance& inst, double q,
                                   std::span<const double> p_ref,
                                   const SolverOptions& opts) {
    const int N = inst.num_pairs();
    const std::vector<double> caps = power_caps(inst);
    SurrogateObjective obj = make_objective(inst, q, p_ref);

    SubproblemResult out;
    out.p.assign(N, 0.0);
    for (int l = 0; l < N; ++l)
        if (caps[l] > 0.0) out.p[l] = std::clamp(p_ref[l], 0.0, caps[l]);

    bool any_active = false;
    for (int l = 0; l < N; ++l) any_active |= caps[l] > 0.0;
    if (!any_active) {
        out.t = std::min(t_of_p(out.p, inst), kTCap);
        out.value = obj.phi(out.p);
        return out;
    }

    std::vector<double> g(N), d(N), trial(N);
    double f_cur = obj.phi(out.p);
    double step = 1e-2;
    bool line_search_failed = false;
    int stall = 0;
    double f_checkpoint = f_cur;

    // Phase 1: projected (sub)gradient ascent on the reduced objective, the
    // t-kink handled by an averaged subgradient over the tight users.
    for (int it = 0; it < kGradientIterCap; ++it) {
        ++out.iters;
        if (it % 30 == 29) {  // creeping? the scan handles it far better
            if (f_cur - f_checkpoint < 1e-9 * (1.0 + std::abs(f_cur))) break;
            f_checkpoint = f_cur;
        }
        obj.smooth_grad(out.p, g);
        const double t = t_of_p(out.p, inst);
        const std::vector<int> tie = tie_set(out.p, inst, caps, t);
        out.kkt_residual = kkt_residual(out.p, obj, caps, g, tie);
        if (out.kkt_residual <= kkt_floor(q, opts.subproblem_tol)) {
            out.t = t_of_p(out.p, inst);
            out.value = f_cur;
            return out;
        }
        for (int l = 0; l < N; ++l) {
            d[l] = g[l];
            if (caps[l] <= 0.0) { d[l] = 0.0; continue; }
            if (!tie.empty() &&
                std::find(tie.begin(), tie.end(), l) != tie.end())
                d[l] -= q / (inst.harvest_rate[l] * static_cast<double>(tie.size()));
            d[l] *= caps[l] * caps[l];  // ascent in normalized coordinates
        }
        bool accepted = false;
        bool movable = false;
        double alpha = std::min(step * 2.0, 1e6);
        for (int h = 0; h <= kArmijoHalvings; ++h, alpha *= 0.5) {
            double gain_lin = 0.0;
            for (int l = 0; l < N; ++l) {
                trial[l] = caps[l] > 0.0
                               ? std::clamp(out.p[l] + alpha * d[l], 0.0, caps[l])
                               : 0.0;
                const double gl = caps[l] > 0.0 ? d[l] / (caps[l] * caps[l]) : 0.0;
                gain_lin += gl * (trial[l] - out.p[l]);
            }
            // projection never flips a component against d, so gain_lin == 0
            // means the direction is null at every smaller step too
            if (gain_lin <= 0.0) break;
            movable = true;
            const double f_new = obj.phi(trial);
            if (f_new >= f_cur + 1e-4 * gain_lin) {
                if (f_new - f_cur < 1e-15 * (1.0 + std::abs(f_cur))) ++stall;
                else stall = 0;
                out.p = trial;
                f_cur = f_new;
                step = alpha;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            line_search_failed = movable;  // null step = box-stationary, not a failure
            break;
        }
        if (stall >= 8) break;
    }

    // Phase 2: one-dimensional scan over the eliminated time variable.
    const ScanResult scan = scan_over_t(obj, out.p, caps, t_of_p(out.p, inst));
    if (scan.value >= f_cur - 1e-13 * (1.0 + std::abs(f_cur))) {
        out.p = scan.p;
        f_cur = scan.value;
    }

    obj.smooth_grad(out.p, g);
    out.kkt_residual = kkt_residual(
        out.p, obj, caps, g, tie_set(out.p, inst, caps, t_of_p(out.p, inst)));
    out.t = std::min(t_of_p(out.p, inst), kTCap);
    out.value = f_cur;
    out.flagged =
        line_search_failed && out.kkt_residual > kkt_floor(q, opts.subproblem_tol);
    return out;
}

DcResult dc_inner_solve(const Instance& inst, double q,
                        std::span<const double> p_init,
                        const SolverOptions& opts) {
    const int N = inst.num_pairs();
    const std::vector<double> caps = power_caps(inst);
    DcResult res;
    res.p.assign(N, 0.0);
    for (int l = 0; l < N; ++l)
        if (caps[l] > 0.0) res.p[l] = std::clamp(p_init[l], 0.0, caps[l]);

    double f_prev = f_true(t_of_p(res.p, inst), q, res.p, inst);
    res.report.trajectory.push_back(f_prev);
    std::vector<double> p_ray(N);
    for (int l = 1; l <= opts.max_inner; ++l) {
        const SubproblemResult sub = convex_subproblem(inst, q, res.p, opts);
        res.report.subproblem_iters += sub.iters;
        res.report.flagged |= sub.flagged;
        res.report.last_kkt = sub.kkt_residual;
        double f_new = f_true(sub.t, q, sub.p, inst);
        if (f_new < f_prev) {  // roundoff guard; candidate discarded
            res.report.converged = true;
            break;
        }
        std::vector<double> p_new = sub.p;
        // Ray extrapolation: the surrogate is tight at the previous iterate,
        // so overshooting the accepted step often keeps gaining where chained
        // relinearizations would crawl the same path one bound at a time.
        for (const double beta : {2.0, 4.0, 8.0, 16.0, 32.0}) {
            for (int n = 0; n < N; ++n)
                p_ray[n] = std::clamp(res.p[n] + beta * (sub.p[n] - res.p[n]),
                                      0.0, std::max(caps[n], 0.0));
            const double f_ray = f_true(t_of_p(p_ray, inst), q, p_ray, inst);
            if (f_ray <= f_new) break;
            f_new = f_ray;
            p_new = p_ray;
        }
        res.p = std::move(p_new);
        res.report.trajectory.push_back(f_new);
        res.report.iters = l;
        if (f_new - f_prev < opts.inner_tol) {
            res.report.converged = true;
            break;
        }
        f_prev = f_new;
    }
    res.t = t_of_p(res.p, inst);
    return res;
}

FResult dinkelbach_F(const Instance& inst, double q,
                     std::span<const double> p_warm, const SolverOptions& opts) {
    DcResult dc = dc_inner_solve(inst, q, p_warm, opts);
    FResult out;
    out.t = dc.t;
    out.p = std::move(dc.p);
    out.inner = std::move(dc.report);
    out.F = f_true(out.t, q, out.p, inst);
    return out;
}

Allocation recover_allocation(double t, std::vector<double> p) {
    if (t < 1.0) {
        if (t > 1.0 - 1e-12) t = 1.0;
        else throw std::invalid_argument("t must be >= 1");
    }
    Allocation a;
    a.t = t;
    a.tau1 = 1.0 / t;
    a.tau0 = 1.0 - a.tau1;
    a.p = std::move(p);
    return a;
}

std::vector<double> init_powers(const Instance& inst, InitRule rule) {
    const int N = inst.num_pairs();
    const double p_c = inst.params.circuit_power;
    const std::vector<double> caps = power_caps(inst);
    std::vector<double> p(N, 0.0);
    if (rule == InitRule::zero_plus_epsilon) {
        for (int n = 0; n < N; ++n) p[n] = 1e-6 * std::max(caps[n], 0.0);
        return p;
    }
    // Energy-balanced split: a nominal half-cap power at t = 2 sets the
    // harvest/transmit time ratio, then powers take half their cap at that t.
    double spend = 0.0, harvest = 0.0;
    for (int n = 0; n < N; ++n) {
        spend += 0.5 * std::max(0.0, inst.harvest_rate[n] - p_c);
        harvest += inst.harvest_rate[n];
    }
    double tau0 = spend + harvest > 0.0 ? spend / (spend + harvest) : 0.5;
    const double t0 = std::clamp(1.0 / (1.0 - tau0), 1.0, kTCap);
    for (int n = 0; n < N; ++n)
        p[n] = 0.5 * std::clamp((t0 - 1.0) * inst.harvest_rate[n] - p_c, 0.0,
                                std::max(caps[n], 0.0));
    return p;
}

std::pair<Allocation, SolverReport> solve(const Instance& inst,
                                          const SolverOptions& opts) {
    opts.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const int N = inst.num_pairs();
    SolverReport rep;

    const std::vector<double> caps_full = power_caps(inst);
    std::vector<int> active;
    for (int n = 0; n < N; ++n) {
        if (caps_full[n] > 0.0) active.push_back(n);
        else rep.excluded_users.push_back(n);
    }
    if (active.empty()) {
        rep.termination = Termination::infeasible;
        rep.wall_time = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t_start).count();
        return {Allocation{0.0, 1.0, 1.0, std::vector<double>(N, 0.0)}, rep};
    }

    const bool restricted = static_cast<int>(active.size()) != N;
    const Instance sub_inst = restricted ? inst.restricted(active) : inst;
    const Instance& work = restricted ? sub_inst : inst;

    std::vector<double> p = init_powers(work, opts.p_init_rule);
    double q = opts.q_init;
    double t = 1.0;
    rep.termination = Termination::max_outer;
    for (int k = 1; k <= opts.max_outer; ++k) {
        const FResult fr = dinkelbach_F(work, q, p, opts);
        rep.q_trajectory.push_back(q);
        rep.F_values.push_back(fr.F);
        rep.inner_objective_trajectories.push_back(fr.inner.trajectory);
        rep.inner_iters_per_outer.push_back(fr.inner.iters);
        rep.total_inner_iters += fr.inner.iters;
        rep.flagged_subproblems += fr.inner.flagged ? 1 : 0;
        rep.final_kkt_residual = fr.inner.last_kkt;
        rep.outer_iters = k;
        p = fr.p;
        t = fr.t;
        if (std::abs(fr.F) <= opts.outer_tol) {
            rep.termination = Termination::converged;
            break;
        }
        if (!fr.inner.converged) {
            rep.termination = Termination::max_inner;
            break;
        }
        const double rate = f_true(t, 0.0, p, work);  // sum rate alone
        if (rate <= 0.0) break;                       // nothing transmits; stop
        q = rate / t;
    }

    std::vector<double> p_full(N, 0.0);
    for (std::size_t i = 0; i < active.size(); ++i) p_full[active[i]] = p[i];
    Allocation alloc = recover_allocation(t, std::move(p_full));
    check_causality(alloc, inst, caps_full);

    rep.complexity_proxy = static_cast<double>(std::max(rep.total_inner_iters, 1)) *
                           std::pow(static_cast<double>(N) + 1.0, 3);
    rep.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start).count();
    return {std::move(alloc), rep};
}

std::string report_to_text(const SolverReport& rep) {
    std::ostringstream os;
    os << "termination = " << to_string(rep.termination) << "\n";
    os << "outer_iters = " << rep.outer_iters << "\n";
    os << "total_inner_iters = " << rep.total_inner_iters << "\n";
    os << "wall_time_s = " << format_double(rep.wall_time) << "\n";
    os << "complexity_proxy = " << format_double(rep.complexity_proxy) << "\n";
    os << "final_kkt_residual = " << format_double(rep.final_kkt_residual) << "\n";
    os << "flagged_subproblems = " << rep.flagged_subproblems << "\n";
    os << "excluded_users =";
    for (int n : rep.excluded_users) os << " " << n;
    os << "\n";
    for (std::size_t k = 0; k < rep.q_trajectory.size(); ++k) {
        os << "q[" << k << "] = " << format_double(rep.q_trajectory[k]) << "\n";
        os << "F[" << k << "] = " << format_double(rep.F_values[k]) << "\n";
    }
    return os.str();
}

std::string report_trajectory_csv(const SolverReport& rep) {
    std::ostringstream os;
    os << "outer_iter,q,F,inner_iters\n";
    for (std::size_t k = 0; k < rep.q_trajectory.size(); ++k) {
        os << (k + 1) << "," << format_double(rep.q_trajectory[k]) << ","
           << format_double(rep.F_values[k]) << ","
           << rep.inner_iters_per_outer[k] << "\n";
    }
    return os.str();
}

}  // namespace wpcn
