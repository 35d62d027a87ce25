#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "wpcn/allocation.hpp"

namespace wpcn {

// Physical constants of one network configuration. All powers are in watts
// internally; dBm conversions happen at the config boundary only.
struct SystemParams {
    int num_antennas = 10;            // M, antennas at the power station
    int num_pairs = 3;                // N, D2D pairs
    double ps_power = 1.0;            // transmit power of the PS, W
    double conversion_eff = 0.5;      // eta, in (0,1)
    double circuit_power = 1e-7;      // p_c, W
    double noise_power = 1e-14;       // sigma^2, W (-170 dBm/Hz over 1 MHz)
    double path_loss_exp = 3.0;       // alpha
    double path_loss_const = 1e-3;    // the 10^-3 factor of the gain model
    double area_side = 50.0;          // square side, m
    double max_pair_dist = 10.0;      // D, max Tx-Rx separation, m
    double bandwidth_hz = 1e6;        // reporting only; rates are bits/s/Hz

    void validate() const;            // throws std::invalid_argument
};

// sigma^2 in watts from a noise power spectral density in dBm/Hz.
double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point& a, const Point& b);

// Node placement for one realization: N transmitters, their receivers, and
// the power station. All coordinates in meters inside [0, area_side]^2.
struct Topology {
    std::vector<Point> tx;
    std::vector<Point> rx;
    Point ps;
};

// One channel realization. h[n] is the M-dim PS->Tx_n vector with
// E|entry|^2 = path_loss_const * d^-alpha. g_cross[m][n] is the scalar power
// gain from Tx_m to Rx_n; the diagonal is unused (direct gains live in
// g_direct).
struct ChannelState {
    std::vector<std::vector<std::complex<double>>> h;
    std::vector<double> g_direct;
    std::vector<std::vector<double>> g_cross;

    int num_pairs() const { return static_cast<int>(g_direct.size()); }
};

struct Beamformer {
    std::vector<std::complex<double>> w;  // unit 2-norm
};

// Everything a solver needs: harvest rates e_n = eta*p_PS*|h_n^H w|^2
// (watts harvested per unit WET time) plus the information-link gains.
struct Instance {
    SystemParams params;
    std::vector<double> harvest_rate;          // e_n, W
    std::vector<double> g_direct;
    std::vector<std::vector<double>> g_cross;
    std::vector<int> zero_harvest_users;       // warning: e_n ~ 0, can never cover p_c

    int num_pairs() const { return static_cast<int>(harvest_rate.size()); }

    // Sub-instance over a subset of users (for active-set solving).
    Instance restricted(const std::vector<int>& users) const;
};

// Scalar link power gain g = c * rho2 * d^-alpha.
double path_gain(double dist_m, double rho2, const SystemParams& params);

// Tx uniform on the square, Rx uniform on the disk of radius D around its
// Tx (resampled until inside the square), PS at the square center.
Topology generate_topology(const SystemParams& params, std::uint64_t seed);

// Scalar gains with rho2 ~ Exp(1) per link; vector channels i.i.d.
// circularly-symmetric Gaussian per antenna matching the scalar power model.
ChannelState sample_channels(const Topology& topo, const SystemParams& params,
                             std::uint64_t seed);

// Equal-weight energy beamformer w = sum_n sqrt(1/N) h_n/|h_n|, renormalized
// to unit norm. The weighted overload is a config hook; only equal weights
// are exercised.
Beamformer energy_beamformer(const ChannelState& channels);
Beamformer energy_beamformer(const ChannelState& channels,
                             std::span<const double> weights);

Instance build_instance(const ChannelState& channels, const Beamformer& beam,
                        const SystemParams& params);

// SINR at receiver n for the simultaneous-transmission power vector p.
double sinr(std::span<const double> p, const Instance& inst, int n);

// tau1 * sum_n log2(1 + sinr_n), bits/s/Hz.
double sum_throughput(const Allocation& alloc, const Instance& inst);

}  // namespace wpcn
