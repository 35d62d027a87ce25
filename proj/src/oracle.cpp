#include "wpcn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wpcn/io.hpp"
#include "wpcn/optim.hpp"
#include "wpcn/solver.hpp"

namespace wpcn {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr int kScanPoints = 10000;

double rate_n1(double t, double e, double p_c, double g, double noise) {
    const double p = (t - 1.0) * e - p_c;
    if (p <= 0.0) return 0.0;
    return std::log1p(p * g / noise) / (kLn2 * t);
}

// One uniform-scan pass; returns the argmax index.
int scan_argmax(const std::vector<double>& vals) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(vals.size()); ++i)
        if (vals[i] > vals[best]) best = i;
    return best;
}

// Derivative-sign check on a sampled curve: a single +…+-…- pattern (or a
// monotone one) counts as unimodal; wobbles below noise are ignored.
bool single_peak(const std::vector<double>& vals) {
    double scale = 0.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    const double eps = 1e-12 * std::max(scale, 1e-300);
    int sign = 1;  // expecting rises first
    for (std::size_t i = 1; i < vals.size(); ++i) {
        const double d = vals[i] - vals[i - 1];
        if (std::abs(d) <= eps) continue;
        if (d > 0.0) {
            if (sign < 0) return false;  // rise after the descent began
        } else {
            sign = -1;
        }
    }
    return true;
}

std::vector<double> linear_grid(double lo, double hi, int k) {
    std::vector<double> g(k);
    for (int i = 0; i < k; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(k - 1);
        g[i] = lo + (hi - lo) * f;
    }
    return g;
}

// log-lerped so that doubling the resolution keeps every existing point
// bit-identical (fractions i/(k-1) are preserved exactly under k -> 2k-1).
std::vector<double> geometric_grid(double lo, double hi, int k) {
    std::vector<double> g(k);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < k; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(k - 1);
        g[i] = std::exp(llo + (lhi - llo) * f);
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

}  // namespace

void GridSpec::validate(int num_users) const {
    if (tau1_points < 2 || power_points_per_user < 2)
        throw std::invalid_argument("grid needs at least 2 points per axis");
    double total = tau1_points;
    for (int n = 0; n < num_users; ++n) total *= power_points_per_user;
    if (total > eval_budget)
        throw std::invalid_argument("grid budget exceeded: " +
                                    std::to_string(total) + " > " +
                                    std::to_string(eval_budget));
}

OracleN1Result oracle_n1(const Instance& inst) {
    if (inst.num_pairs() != 1)
        throw std::invalid_argument("oracle_n1 requires a single pair");
    const double e = inst.harvest_rate[0];
    const double p_c = inst.params.circuit_power;
    const double g = inst.g_direct[0];
    const double noise = inst.params.noise_power;

    OracleN1Result out;
    if ((kTCap - 1.0) * e <= p_c) return out;  // can never cover circuit power

    const double t_lo = 1.0 + p_c / e;
    auto value = [&](double t) { return rate_n1(t, e, p_c, g, noise); };

    // Coarse scan: unimodality audit, then iteratively refined so it stands
    // as a reference independent of the golden-section bracketing.
    double scan_t = t_lo;
    {
        const std::vector<double> ts = linear_grid(t_lo, kTCap, kScanPoints);
        std::vector<double> vals(kScanPoints);
        for (int i = 0; i < kScanPoints; ++i) vals[i] = value(ts[i]);
        out.unimodal = single_peak(vals);
        const int best = scan_argmax(vals);
        double lo = ts[std::max(0, best - 1)];
        double hi = ts[std::min(kScanPoints - 1, best + 1)];
        while (hi - lo > 1e-10 * std::max(1.0, lo)) {
            const std::vector<double> sub = linear_grid(lo, hi, 1000);
            std::vector<double> sv(sub.size());
            for (std::size_t i = 0; i < sub.size(); ++i) sv[i] = value(sub[i]);
            const int b = scan_argmax(sv);
            lo = sub[std::max(0, b - 1)];
            hi = sub[std::min(static_cast<int>(sub.size()) - 1, b + 1)];
        }
        scan_t = 0.5 * (lo + hi);
        out.scan_value = value(scan_t);
    }

    // Both estimates lower-bound the true optimum; keep the better one (they
    // agree to ~1e-10 whenever the unimodality audit passes).
    const GoldenResult gr = golden_section_max(value, t_lo, kTCap, 1e-10, 400);
    if (gr.value >= out.scan_value) {
        out.t = gr.x;
        out.value = gr.value;
    } else {
        out.t = scan_t;
        out.value = out.scan_value;
    }
    out.p = std::max(0.0, (out.t - 1.0) * e - p_c);
    return out;
}

GridResult oracle_grid(const Instance& inst, const GridSpec& spec) {
    const int N = inst.num_pairs();
    spec.validate(N);

    const double p_c = inst.params.circuit_power;
    const double noise = inst.params.noise_power;

    // Mirror the solver's exclusion rule so both explore the same problem.
    std::vector<double> cap_max(N);
    std::vector<bool> active(N);
    bool any_active = false;
    for (int n = 0; n < N; ++n) {
        cap_max[n] = (kTCap - 1.0) * inst.harvest_rate[n] - p_c;
        active[n] = cap_max[n] > 0.0;
        any_active |= active[n];
    }

    GridResult out;
    out.alloc.tau0 = 0.0;
    out.alloc.tau1 = 1.0;
    out.alloc.t = 1.0;
    out.alloc.p.assign(N, 0.0);
    if (!any_active) return out;

    // Per-user base power levels (before the per-tau1 cap): 0, a geometric
    // ladder from one percent of noise-equivalent power up to the global cap.
    std::vector<std::vector<double>> base(N);
    std::vector<double> step_ratio_log(N, 0.0);
    for (int n = 0; n < N; ++n) {
        if (!active[n]) { base[n] = {0.0}; continue; }
        const double p_min =
            std::min(0.01 * noise / inst.g_direct[n], cap_max[n]);
        base[n].push_back(0.0);
        if (spec.scale == GridScale::log) {
            const std::vector<double> ladder =
                geometric_grid(p_min, cap_max[n], spec.power_points_per_user);
            base[n].insert(base[n].end(), ladder.begin(), ladder.end());
            step_ratio_log[n] = (std::log(cap_max[n]) - std::log(p_min)) /
                                (spec.power_points_per_user - 1);
        } else {
            const std::vector<double> ladder =
                linear_grid(0.0, cap_max[n], spec.power_points_per_user);
            base[n].insert(base[n].end(), ladder.begin() + 1, ladder.end());
        }
    }

    const std::vector<double> tau_grid =
        linear_grid(kTau1Min, 1.0, spec.tau1_points);

    std::vector<std::vector<double>> levels(N);
    std::vector<std::size_t> idx(N);
    std::vector<double> p(N), best_p(N, 0.0);
    double best_value = 0.0, best_tau1 = 1.0;
    bool found = false;

    for (double tau1 : tau_grid) {
        const double grow = (1.0 / tau1 - 1.0);
        bool feasible = true;
        for (int n = 0; n < N && feasible; ++n) {
            if (!active[n]) { levels[n] = {0.0}; continue; }
            const double cap = grow * inst.harvest_rate[n] - p_c;
            if (cap < 0.0) { feasible = false; break; }
            levels[n].clear();
            for (double v : base[n])
                if (v <= cap) levels[n].push_back(v);
            if (levels[n].empty() || levels[n].back() < cap)
                levels[n].push_back(cap);
        }
        if (!feasible) continue;

        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (int n = 0; n < N; ++n) p[n] = levels[n][idx[n]];
            ++out.evaluated;
            double rate = 0.0;
            for (int n = 0; n < N; ++n) {
                if (p[n] <= 0.0) continue;
                double den = noise;
                for (int m = 0; m < N; ++m)
                    if (m != n) den += p[m] * inst.g_cross[m][n];
                rate += std::log1p(p[n] * inst.g_direct[n] / den) / kLn2;
            }
            const double val = tau1 * rate;
            if (!found || val > best_value) {
                found = true;
                best_value = val;
                best_tau1 = tau1;
                best_p = p;
            }
            int carry = N - 1;
            while (carry >= 0 && ++idx[carry] == levels[carry].size())
                idx[carry--] = 0;
            if (carry < 0) break;
        }
    }

    if (found) {
        out.alloc.tau1 = best_tau1;
        out.alloc.tau0 = 1.0 - best_tau1;
        out.alloc.t = 1.0 / best_tau1;
        out.alloc.p = best_p;
        out.value = sum_throughput(out.alloc, inst);
    }

    // Certified gap. Rounding tau1 down to a grid point loses at most
    // dtau * (interference-free max rate); rounding each power down to its
    // grid neighbour loses at most the step ratio in rate for that user
    // (other users only gain when one power decreases), and powers below the
    // ladder floor lose at most the floor's own rate.
    const double dtau =
        (1.0 - kTau1Min) / static_cast<double>(spec.tau1_points - 1);
    double rate_bound = 0.0, power_loss = 0.0;
    for (int n = 0; n < N; ++n) {
        if (!active[n]) continue;
        rate_bound +=
            std::log1p(cap_max[n] * inst.g_direct[n] / noise) / kLn2;
        double step_loss;
        if (spec.scale == GridScale::log) {
            step_loss = step_ratio_log[n] / kLn2;            // log2 of the ratio
        } else {
            // linear grid: one step of cap/(K-1) power, worst case from the floor
            step_loss = std::log1p(cap_max[n] /
                                   (spec.power_points_per_user - 1) *
                                   inst.g_direct[n] / noise) / kLn2;
        }
        const double floor_loss = std::log1p(0.01) / kLn2;   // p_min = 1% of noise
        power_loss += std::max(step_loss, floor_loss);
    }
    out.modulus = dtau * rate_bound + power_loss;
    return out;
}

std::string golden_to_text(const GoldenRecord& rec) {
    std::ostringstream os;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(rec.instance_hash));
    os << "instance_hash = " << hash << "\n";
    os << "tau1_points = " << rec.spec.tau1_points << "\n";
    os << "power_points_per_user = " << rec.spec.power_points_per_user << "\n";
    os << "scale = " << (rec.spec.scale == GridScale::log ? "log" : "linear")
       << "\n";
    os << "value = " << format_double(rec.value) << "\n";
    os << "modulus = " << format_double(rec.modulus) << "\n";
    os << "tau1 = " << format_double(rec.tau1) << "\n";
    for (std::size_t n = 0; n < rec.p.size(); ++n)
        os << "p[" << n << "] = " << format_double(rec.p[n]) << "\n";
    return os.str();
}

GoldenRecord golden_from_text(const std::string& text) {
    GoldenRecord rec;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        if (key == "instance_hash")
            rec.instance_hash = std::stoull(val, nullptr, 16);
        else if (key == "tau1_points")
            rec.spec.tau1_points = std::stoi(val);
        else if (key == "power_points_per_user")
            rec.spec.power_points_per_user = std::stoi(val);
        else if (key == "scale")
            rec.spec.scale = val == "log" ? GridScale::log : GridScale::linear;
        else if (key == "value")
            rec.value = std::stod(val);
        else if (key == "modulus")
            rec.modulus = std::stod(val);
        else if (key == "tau1")
            rec.tau1 = std::stod(val);
        else if (key.rfind("p[", 0) == 0) {
            const std::size_t i = std::stoul(key.substr(2));
            if (rec.p.size() <= i) rec.p.resize(i + 1, 0.0);
            rec.p[i] = std::stod(val);
        }
    }
    return rec;
}

void save_golden(const GoldenRecord& rec, const std::string& path) {
    write_file(path, golden_to_text(rec));
}

GoldenRecord load_golden(const std::string& path) {
    return golden_from_text(read_file(path));
}

GoldenRecord make_golden(const Instance& inst, const GridSpec& spec) {
    const GridResult res = oracle_grid(inst, spec);
    GoldenRecord rec;
    rec.instance_hash = instance_hash(inst);
    rec.spec = spec;
    rec.value = res.value;
    rec.modulus = res.modulus;
    rec.tau1 = res.alloc.tau1;
    rec.p = res.alloc.p;
    return rec;
}

}  // namespace wpcn
