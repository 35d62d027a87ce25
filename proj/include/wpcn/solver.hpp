#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wpcn/allocation.hpp"
#include "wpcn/model.hpp"

namespace wpcn {

// Feasible-set cap: tau1 never drops below this floor, so the reformulated
// time variable t = 1/tau1 stays bounded. Any optimum of interest has an
// active causality constraint far below the cap; it exists only to keep the
// projected-gradient iterates well-defined.
inline constexpr double kTau1Min = 1e-4;
inline constexpr double kTCap = 1.0 / kTau1Min;

enum class InitRule { equal_split, zero_plus_epsilon };
enum class Termination { converged, max_outer, max_inner, infeasible };

const char* to_string(Termination t);
const char* to_string(InitRule r);

struct SolverOptions {
    double q_init = 1.0;
    double outer_tol = 1e-6;        // eps_q, convergence threshold on F(q)
    double inner_tol = 1e-8;        // eps_dc, on the objective increase per pass
    int max_outer = 50;
    int max_inner = 200;
    double subproblem_tol = 1e-10;  // KKT residual target, normalized coords
    InitRule p_init_rule = InitRule::equal_split;

    void validate() const;          // throws std::invalid_argument
};

// One inner (successive-approximation) run at fixed q.
struct DcReport {
    std::vector<double> trajectory;  // objective at the initial point and each
                                     // accepted iterate; nondecreasing
    int iters = 0;                   // accepted subproblem solves
    bool converged = false;          // increase fell below inner_tol
    bool flagged = false;            // some subproblem ended above its KKT target
    int subproblem_iters = 0;        // gradient steps across all subproblems
    double last_kkt = 0.0;           // KKT residual of the last subproblem
};

struct SolverReport {
    std::vector<double> q_trajectory;                       // q per outer pass
    std::vector<double> F_values;                           // F(q) per outer pass
    std::vector<std::vector<double>> inner_objective_trajectories;
    std::vector<int> inner_iters_per_outer;
    int outer_iters = 0;
    int total_inner_iters = 0;
    Termination termination = Termination::converged;
    double wall_time = 0.0;          // seconds
    std::vector<int> excluded_users; // cannot cover circuit power at any tau1
    double complexity_proxy = 0.0;   // total_inner * (N+1)^3 operation estimate
    double final_kkt_residual = 0.0; // of the last convex subproblem
    int flagged_subproblems = 0;
};

// Per-user power ceiling (t_cap - 1) e_n - p_c. Nonpositive means the user
// cannot cover circuit power within any admissible transmit fraction.
std::vector<double> power_caps(const Instance& inst);

// The two halves of the difference-of-concave split of the sum rate:
// w_n - v_n = R_n. Both are log2 of received power levels in watts.
double w_term(std::span<const double> p, const Instance& inst, int n);
double v_term(std::span<const double> p, const Instance& inst, int n);

// Smallest t satisfying every causality constraint at powers p (and >= 1).
double t_of_p(std::span<const double> p, const Instance& inst);

// Reformulated objective f(t, q, p) = sum_n R_n(p) - q t, computed through
// the w/v split so it cancels exactly against surrogate_value at p = p_ref.
double f_true(double t, double q, std::span<const double> p, const Instance& inst);

// Gradient of v_n at p_ref. Component n is zero: v_n does not depend on p_n.
std::vector<double> grad_v(std::span<const double> p_ref, const Instance& inst, int n);

// Linearized lower bound on f(t, q, p) around p_ref; tight at p = p_ref.
double surrogate_value(std::span<const double> p, double t, double q,
                       std::span<const double> p_ref, const Instance& inst);

struct SubproblemResult {
    std::vector<double> p;
    double t = 1.0;
    double value = 0.0;         // surrogate objective at (t, p)
    double kkt_residual = 0.0;  // projected-gradient norm, normalized coords
    int iters = 0;
    bool flagged = false;       // finished above the KKT target
};

// Maximizes the surrogate at p_ref over the causality/cap constraints.
// t is eliminated through t_of_p (the surrogate strictly decreases in t),
// and the reduced concave problem over the power box is solved by projected
// gradient ascent with backtracking, then an active-set refinement of the
// tight-causality users.
SubproblemResult convex_subproblem(const Instance& inst, double q,
                                   std::span<const double> p_ref,
                                   const SolverOptions& opts);

struct DcResult {
    double t = 1.0;
    std::vector<double> p;
    DcReport report;
};

// Successive approximation at fixed q from p_init (projected if infeasible).
DcResult dc_inner_solve(const Instance& inst, double q,
                        std::span<const double> p_init,
                        const SolverOptions& opts);

struct FResult {
    double F = 0.0;   // sum_n R_n(p) - q t at the returned point
    double t = 1.0;
    std::vector<double> p;
    DcReport inner;
};

FResult dinkelbach_F(const Instance& inst, double q,
                     std::span<const double> p_warm, const SolverOptions& opts);

// tau1 = 1/t, tau0 = 1 - tau1; the pair sums to 1 exactly in doubles.
Allocation recover_allocation(double t, std::vector<double> p);

// Starting powers for the inner loop under the chosen rule.
std::vector<double> init_powers(const Instance& inst, InitRule rule);

// Full pipeline: exclusion of users that cannot cover circuit power,
// fractional-programming outer loop, allocation recovery and a causality
// audit of the result (std::logic_error on violation — indicates a bug).
std::pair<Allocation, SolverReport> solve(const Instance& inst,
                                          const SolverOptions& opts = {});

// Flat text dump of a report, and per-outer-pass CSV
// (outer_iter,q,F,inner_iters) for convergence plots.
std::string report_to_text(const SolverReport& rep);
std::string report_trajectory_csv(const SolverReport& rep);

}  // namespace wpcn
