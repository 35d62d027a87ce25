#pragma once

#include <vector>

#include "wpcn/allocation.hpp"
#include "wpcn/model.hpp"
#include "wpcn/solver.hpp"

namespace wpcn {

// Harvest-then-transmit with exclusive information slots: tau0 of harvesting,
// then user n transmits alone for tau_n. Circuit power runs for the whole
// WIT phase on every powered device, as in the simultaneous scheme, so the
// per-user energy budget is tau_n p_n + (1 - tau0) p_c <= tau0 e_n.
struct TdmaAllocation {
    double tau0 = 0.0;
    std::vector<double> tau;  // slot fractions, sum <= 1 - tau0
    std::vector<double> p;    // per-user powers during their own slot
};

struct TdmaResult {
    TdmaAllocation alloc;
    double value = 0.0;   // bits/s/Hz
    int outer_evals = 0;  // slope evaluations of the 1-D search over tau1
};

// Maximizes sum_n tau_n log2(1 + p_n g_nn / sigma^2) with every budget fully
// spent. At fixed tau1 the optimal slots equalize received SNR, reducing the
// problem to a concave 1-D search over tau1, solved by slope bisection.
TdmaResult tdma_solve(const Instance& inst);

// Same instance but with the harvest rates an omnidirectional transmitter
// would deliver: equal per-antenna power with incoherent phases, so the
// expected combining gain is |h_n|^2 / M. Link gains are untouched.
Instance build_oet_instance(const ChannelState& channels,
                            const SystemParams& params);

struct OetResult {
    Allocation alloc;
    double value = 0.0;
    SolverReport report;
};

OetResult oet_solve(const ChannelState& channels, const SystemParams& params,
                    const SolverOptions& opts = {});

}  // namespace wpcn
