#include "wpcn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wpcn {

namespace {

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

TdmaResult tdma_solve(const Instance& inst) {
    const int N = inst.num_pairs();
    const double p_c = inst.params.circuit_power;
    const double noise = inst.params.noise_power;

    TdmaResult out;
    out.alloc.tau.assign(N, 0.0);
    out.alloc.p.assign(N, 0.0);

    // Every powered user keeps its electronics on for the whole WIT phase,
    // exactly as in the simultaneous scheme, so the comparison isolates the
    // access method. User n's slot-signal energy is then tau0 e_n - tau1 p_c.
    double e_min = std::numeric_limits<double>::infinity();
    double sum_eg = 0.0;  // sum_n e_n g_nn / sigma^2
    double sum_g = 0.0;   // sum_n g_nn / sigma^2
    bool any = false;
    for (int n = 0; n < N; ++n) {
        const double e = inst.harvest_rate[n];
        if (e <= 0.0) continue;  // unservable: mirrors the solver's exclusion
        any = true;
        e_min = std::min(e_min, e);
        sum_eg += e * inst.g_direct[n] / noise;
        sum_g += inst.g_direct[n] / noise;
    }
    if (!any || sum_eg <= 0.0) return out;

    // Feasibility of the silent users' circuit draw caps the WIT length.
    const double tau1_max = p_c > 0.0 ? e_min / (p_c + e_min) : 1.0;

    // Pooled rate mass A(tau1) = sum_n (tau0 e_n - tau1 p_c) g_nn / sigma^2.
    // At fixed tau1 the optimal slots equalize the received SNR at A/tau1
    // (slot length proportional to each user's share of A), collapsing the
    // schedule to tau1 log2(1 + A/tau1), concave in tau1.
    const double drain = sum_eg + p_c * sum_g;  // -dA/dtau1
    auto slope = [&](double tau1) {
        ++out.outer_evals;
        const double lvl = 1.0 + sum_eg / tau1 - drain;
        return std::log2(lvl) - sum_eg / (tau1 * lvl * kLn2);
    };

    double tau1 = tau1_max;
    if (slope(tau1_max) < 0.0) {
        double lo = tau1_max * 0x1p-60, hi = tau1_max;
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            (slope(mid) > 0.0 ? lo : hi) = mid;
        }
        tau1 = 0.5 * (lo + hi);
    }

    const double mass = sum_eg - tau1 * drain;  // A at the chosen tau1
    if (mass <= 0.0) return out;
    const double snr = mass / tau1;  // common received SNR in every slot
    out.alloc.tau0 = 1.0 - tau1;
    double v = 0.0;
    for (int n = 0; n < N; ++n) {
        const double e = inst.harvest_rate[n];
        const double g = inst.g_direct[n];
        if (e <= 0.0 || g <= 0.0) continue;
        const double budget = out.alloc.tau0 * e - tau1 * p_c;
        if (budget <= 0.0) continue;  // the weakest user, pinned at tau1_max
        out.alloc.p[n] = snr * noise / g;
        out.alloc.tau[n] = budget / out.alloc.p[n];
        v += out.alloc.tau[n] * std::log1p(out.alloc.p[n] * g / noise) / kLn2;
    }
    out.value = v;
    return out;
}

Instance build_oet_instance(const ChannelState& channels,
                            const SystemParams& params) {
    // Beamformed harvest rates first (for the shared g matrices and layout),
    // then overwrite e_n with the omnidirectional combining gain |h_n|^2 / M.
    Beamformer w = energy_beamformer(channels);
    Instance inst = build_instance(channels, w, params);
    const int M = params.num_antennas;
    for (int n = 0; n < inst.num_pairs(); ++n) {
        double h2 = 0.0;
        for (const auto& c : channels.h[n]) h2 += std::norm(c);
        inst.harvest_rate[n] =
            params.conversion_eff * params.ps_power * h2 / M;
    }
    inst.zero_harvest_users.clear();
    for (int n = 0; n < inst.num_pairs(); ++n)
        if (inst.harvest_rate[n] <= 0.0) inst.zero_harvest_users.push_back(n);
    return inst;
}

OetResult oet_solve(const ChannelState& channels, const SystemParams& params,
                    const SolverOptions& opts) {
    const Instance inst = build_oet_instance(channels, params);
    OetResult out;
    auto [alloc, rep] = solve(inst, opts);
    out.value = sum_throughput(alloc, inst);
    out.alloc = std::move(alloc);
    out.report = std::move(rep);
    return out;
}

}  // namespace wpcn
