#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpcn/allocation.hpp"
#include "wpcn/model.hpp"

namespace wpcn {

enum class GridScale { linear, log };

// Brute-force grid resolution. The grid has tau1_points slot fractions and,
// per user, power_points_per_user levels between the noise-relative floor
// and the global cap (plus 0 and the per-tau1 cap).
struct GridSpec {
    int tau1_points = 200;
    int power_points_per_user = 200;
    GridScale scale = GridScale::log;
    double eval_budget = 1e8;

    // throws std::invalid_argument when the grid would exceed the budget
    void validate(int num_users) const;
};

struct OracleN1Result {
    double t = 1.0;
    double p = 0.0;
    double value = 0.0;       // bits/s/Hz
    bool unimodal = true;     // derivative-sign scan found a single peak
    double scan_value = 0.0;  // refined-scan estimate, independent of golden
};

// Closed-form reference for a single pair: causality is tight at the
// optimum, so p(t) = (t-1) e - p_c and the problem is one-dimensional in t.
// Golden section over [1 + p_c/e, t_cap], cross-checked by an iteratively
// refined uniform scan (1e4 points per pass).
OracleN1Result oracle_n1(const Instance& inst);

struct GridResult {
    Allocation alloc;
    double value = 0.0;
    double modulus = 0.0;  // certified bound: true optimum <= value + modulus
    std::uint64_t evaluated = 0;
};

// Exhaustive search over the (tau1, p) grid. Users that cannot cover
// circuit power at any admissible tau1 are powered off (as the solver does);
// for the rest the causality cap is enforced at every tau1. The modulus is a
// rigorous bound on how far the true optimum can sit above the best grid
// point, from the tau1 spacing and the geometric power-step ratio.
GridResult oracle_grid(const Instance& inst, const GridSpec& spec);

// Golden record: the oracle's verdict on a fixed instance, committed next to
// the fixture file and compared bit-exactly (values round-trip via %.17g).
struct GoldenRecord {
    std::uint64_t instance_hash = 0;
    GridSpec spec;
    double value = 0.0;
    double tau1 = 0.0;
    std::vector<double> p;
    double modulus = 0.0;
};

std::string golden_to_text(const GoldenRecord& rec);
GoldenRecord golden_from_text(const std::string& text);
void save_golden(const GoldenRecord& rec, const std::string& path);
GoldenRecord load_golden(const std::string& path);

// Runs the grid oracle on a fixture instance and assembles the record.
GoldenRecord make_golden(const Instance& inst, const GridSpec& spec);

}  // namespace wpcn
