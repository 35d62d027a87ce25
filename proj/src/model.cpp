#include "wpcn/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wpcn/rng.hpp"

namespace wpcn {

void SystemParams::validate() const {
    if (num_antennas < 1) throw std::invalid_argument("num_antennas must be >= 1");
    if (num_pairs < 1) throw std::invalid_argument("num_pairs must be >= 1");
    if (!(ps_power > 0.0)) throw std::invalid_argument("ps_power must be > 0");
    if (!(conversion_eff > 0.0 && conversion_eff < 1.0))
        throw std::invalid_argument("conversion_eff must be in (0,1)");
    if (!(circuit_power >= 0.0)) throw std::invalid_argument("circuit_power must be >= 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise_power must be > 0");
    if (!(path_loss_exp > 0.0)) throw std::invalid_argument("path_loss_exp must be > 0");
    if (!(path_loss_const > 0.0)) throw std::invalid_argument("path_loss_const must be > 0");
    if (!(area_side > 0.0)) throw std::invalid_argument("area_side must be > 0");
    if (!(max_pair_dist >= 0.0)) throw std::invalid_argument("max_pair_dist must be >= 0");
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be > 0");
}

double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz) {
    const double total_dbm = psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz);
    return std::pow(10.0, total_dbm / 10.0) * 1e-3;
}

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double path_gain(double dist_m, double rho2, const SystemParams& params) {
    if (dist_m == 0.0) throw std::domain_error("degenerate geometry: zero link distance");
    return params.path_loss_const * rho2 * std::pow(dist_m, -params.path_loss_exp);
}

Topology generate_topology(const SystemParams& params, std::uint64_t seed) {
    params.validate();
    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const double side = params.area_side;
    const double d_max = params.max_pair_dist;
    const int n = params.num_pairs;

    Topology topo;
    topo.tx.resize(n);
    topo.rx.resize(n);
    topo.ps = Point{side / 2.0, side / 2.0};

    for (auto& t : topo.tx) {
        t.x = unif(eng) * side;
        t.y = unif(eng) * side;
    }
    for (int i = 0; i < n; ++i) {
        for (;;) {
            const double r = d_max * std::sqrt(unif(eng));
            const double phi = 2.0 * std::numbers::pi * unif(eng);
            const Point cand{topo.tx[i].x + r * std::cos(phi),
                             topo.tx[i].y + r * std::sin(phi)};
            if (cand.x >= 0.0 && cand.x <= side && cand.y >= 0.0 && cand.y <= side) {
                topo.rx[i] = cand;
                break;
            }
        }
    }
    return topo;
}

ChannelState sample_channels(const Topology& topo, const SystemParams& params,
                             std::uint64_t seed) {
    const int n = static_cast<int>(topo.tx.size());
    const int m = params.num_antennas;

    ChannelState cs;
    cs.h.assign(n, std::vector<std::complex<double>>(m));
    cs.g_direct.assign(n, 0.0);
    cs.g_cross.assign(n, std::vector<double>(n, 0.0));

    // One substream per user for the PS array: growing the array only appends
    // antenna coefficients, so larger arrays share the smaller arrays' draws
    // and antenna-count sweeps compare against common fading.
    for (int i = 0; i < n; ++i) {
        const double d = distance(topo.ps, topo.tx[i]);
        if (d == 0.0) throw std::domain_error("degenerate geometry: PS coincides with a Tx");
        // Per-antenna variance so E|entry|^2 matches the scalar gain model.
        const double var = params.path_loss_const * std::pow(d, -params.path_loss_exp);
        const double s = std::sqrt(var / 2.0);
        auto eng = make_engine(derive_seed(seed, 1 + i));
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int a = 0; a < m; ++a)
            cs.h[i][a] = std::complex<double>(s * gauss(eng), s * gauss(eng));
    }
    auto eng = make_engine(derive_seed(seed, 0));
    std::exponential_distribution<double> expo(1.0);
    for (int i = 0; i < n; ++i) {
        const double d = distance(topo.tx[i], topo.rx[i]);
        cs.g_direct[i] = path_gain(d, expo(eng), params);
    }
    for (int src = 0; src < n; ++src) {
        for (int dst = 0; dst < n; ++dst) {
            if (src == dst) continue;
            const double d = distance(topo.tx[src], topo.rx[dst]);
            cs.g_cross[src][dst] = path_gain(d, expo(eng), params);
        }
    }
    return cs;
}

namespace {

double norm2(const std::vector<std::complex<double>>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace

Beamformer energy_beamformer(const ChannelState& channels) {
    const int n = channels.num_pairs();
    std::vector<double> weights(n, 1.0 / n);
    return energy_beamformer(channels, weights);
}

Beamformer energy_beamformer(const ChannelState& channels,
                             std::span<const double> weights) {
    const int n = channels.num_pairs();
    if (n < 1 || static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("weights must have one entry per pair");
    const int m = static_cast<int>(channels.h.front().size());

    std::vector<std::complex<double>> w(m, {0.0, 0.0});
    for (int i = 0; i < n; ++i) {
        const double hn = norm2(channels.h[i]);
        if (hn == 0.0) throw std::invalid_argument("zero energy channel vector");
        const double c = std::sqrt(weights[i]) / hn;
        for (int a = 0; a < m; ++a) w[a] += c * channels.h[i][a];
    }
    double wn = 0.0;
    for (const auto& z : w) wn += std::norm(z);
    wn = std::sqrt(wn);
    if (wn == 0.0) throw std::runtime_error("cancelling channels: beamformer has zero norm");
    for (auto& z : w) z /= wn;
    return Beamformer{std::move(w)};
}

Instance build_instance(const ChannelState& channels, const Beamformer& beam,
                        const SystemParams& params) {
    const int n = channels.num_pairs();
    const int m = static_cast<int>(beam.w.size());
    Instance inst;
    inst.params = params;
    inst.harvest_rate.resize(n);
    inst.g_direct = channels.g_direct;
    inst.g_cross = channels.g_cross;

    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(channels.h[i].size()) != m)
            throw std::invalid_argument("channel/beamformer dimension mismatch");
        std::complex<double> dot{0.0, 0.0};
        for (int a = 0; a < m; ++a) dot += std::conj(channels.h[i][a]) * beam.w[a];
        inst.harvest_rate[i] =
            params.conversion_eff * params.ps_power * std::norm(dot);
        if (inst.harvest_rate[i] <= params.circuit_power * eps)
            inst.zero_harvest_users.push_back(i);
    }
    return inst;
}

Instance Instance::restricted(const std::vector<int>& users) const {
    Instance sub;
    sub.params = params;
    sub.params.num_pairs = static_cast<int>(users.size());
    const int k = static_cast<int>(users.size());
    sub.harvest_rate.resize(k);
    sub.g_direct.resize(k);
    sub.g_cross.assign(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i) {
        sub.harvest_rate[i] = harvest_rate[users[i]];
        sub.g_direct[i] = g_direct[users[i]];
        for (int j = 0; j < k; ++j)
            if (i != j) sub.g_cross[i][j] = g_cross[users[i]][users[j]];
    }
    return sub;
}

double sinr(std::span<const double> p, const Instance& inst, int n) {
    const int np = inst.num_pairs();
    double interference = 0.0;
    for (int m = 0; m < np; ++m)
        if (m != n) interference += p[m] * inst.g_cross[m][n];
    return p[n] * inst.g_direct[n] / (interference + inst.params.noise_power);
}

double sum_throughput(const Allocation& alloc, const Instance& inst) {
    const int np = inst.num_pairs();
    double rates = 0.0;
    for (int n = 0; n < np; ++n)
        rates += std::log1p(sinr(alloc.p, inst, n)) / std::numbers::ln2;
    return alloc.tau1 * rates;
}

}  // namespace wpcn
