#include "wpcn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "wpcn/baselines.hpp"
#include "wpcn/io.hpp"
#include "wpcn/oracle.hpp"
#include "wpcn/rng.hpp"

namespace wpcn {

namespace {

using nlohmann::json;

SystemParams params_for(const ExperimentConfig& cfg, double value) {
    SystemParams p = cfg.base;
    switch (cfg.sweep_var) {
        case SweepVar::ps_power: p.ps_power = value; break;
        case SweepVar::circuit_power: p.circuit_power = value; break;
        case SweepVar::num_antennas:
            p.num_antennas = static_cast<int>(std::llround(value));
            break;
        case SweepVar::num_pairs:
            p.num_pairs = static_cast<int>(std::llround(value));
            break;
    }
    return p;
}

void run_one(const ExperimentConfig& cfg, std::size_t task,
             std::vector<RecordRow>& rows) {
    const std::size_t R = static_cast<std::size_t>(cfg.realizations);
    const std::size_t vi = task / R;
    const std::size_t ri = task % R;
    const double value = cfg.sweep_values[vi];
    const std::uint64_t child = splitmix64(cfg.master_seed + task + 1);

    const SystemParams params = params_for(cfg, value);
    const Topology topo = generate_topology(params, derive_seed(child, 1));
    const ChannelState chans =
        sample_channels(topo, params, derive_seed(child, 2));
    const Beamformer beam = energy_beamformer(chans);
    const Instance inst = build_instance(chans, beam, params);
    const std::uint64_t ihash = instance_hash(inst);

    for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
        RecordRow& row = rows[task * cfg.schemes.size() + si];
        row.scheme = cfg.schemes[si];
        row.sweep_var = cfg.sweep_var;
        row.sweep_value = value;
        row.realization = static_cast<int>(ri);
        row.seed = child;
        row.instance_hash = ihash;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            switch (row.scheme) {
                case Scheme::proposed: {
                    auto [alloc, rep] = solve(inst, cfg.solver);
                    row.throughput = sum_throughput(alloc, inst);
                    row.tau0 = alloc.tau0;
                    row.tau1 = alloc.tau1;
                    row.outer_iters = rep.outer_iters;
                    row.inner_iters = rep.total_inner_iters;
                    row.termination = to_string(rep.termination);
                    break;
                }
                case Scheme::tdma: {
                    const TdmaResult res = tdma_solve(inst);
                    row.throughput = res.value;
                    row.tau0 = res.alloc.tau0;
                    double used = 0.0;
                    for (double t : res.alloc.tau) used += t;
                    row.tau1 = used;
                    row.outer_iters = res.outer_evals;
                    row.inner_iters = 0;
                    row.termination = res.value > 0.0 ? "converged" : "infeasible";
                    break;
                }
                case Scheme::oet: {
                    const OetResult res = oet_solve(chans, params, cfg.solver);
                    row.throughput = res.value;
                    row.tau0 = res.alloc.tau0;
                    row.tau1 = res.alloc.tau1;
                    row.outer_iters = res.report.outer_iters;
                    row.inner_iters = res.report.total_inner_iters;
                    row.termination = to_string(res.report.termination);
                    break;
                }
            }
        } catch (const std::exception&) {
            // a failed solve must not abort the sweep; the row records it
            row.termination = "error";
        }
        row.wall_time = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    }
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::proposed: return "proposed";
        case Scheme::tdma: return "tdma";
        case Scheme::oet: return "oet";
    }
    return "unknown";
}

const char* to_string(SweepVar v) {
    switch (v) {
        case SweepVar::ps_power: return "ps_power";
        case SweepVar::circuit_power: return "circuit_power";
        case SweepVar::num_antennas: return "num_antennas";
        case SweepVar::num_pairs: return "num_pairs";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "proposed") return Scheme::proposed;
    if (s == "tdma") return Scheme::tdma;
    if (s == "oet") return Scheme::oet;
    throw std::invalid_argument("unknown scheme: " + s);
}

SweepVar sweep_var_from_string(const std::string& s) {
    if (s == "ps_power") return SweepVar::ps_power;
    if (s == "circuit_power") return SweepVar::circuit_power;
    if (s == "num_antennas") return SweepVar::num_antennas;
    if (s == "num_pairs") return SweepVar::num_pairs;
    throw std::invalid_argument("unknown sweep_var: " + s);
}

void ExperimentConfig::validate() const {
    if (realizations < 1)
        throw std::invalid_argument("realizations must be >= 1");
    if (sweep_values.empty())
        throw std::invalid_argument("sweep_values must be nonempty");
    if (schemes.empty()) throw std::invalid_argument("schemes must be nonempty");
    if (threads < 0) throw std::invalid_argument("threads must be >= 0");
    solver.validate();
    for (double v : sweep_values) params_for(*this, v).validate();
}

std::vector<RecordRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t tasks =
        cfg.sweep_values.size() * static_cast<std::size_t>(cfg.realizations);
    std::vector<RecordRow> rows(tasks * cfg.schemes.size());

    unsigned n_threads = cfg.threads > 0
                             ? static_cast<unsigned>(cfg.threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, tasks);

    if (n_threads <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_one(cfg, t, rows);
        return rows;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < tasks;
             t = next.fetch_add(1))
            run_one(cfg, t, rows);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

std::string rows_to_csv(const std::vector<RecordRow>& rows,
                        bool record_wall_time) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const RecordRow& r : rows) {
        os << to_string(r.scheme) << ',' << to_string(r.sweep_var) << ','
           << format_double(r.sweep_value) << ',' << r.realization << ','
           << r.seed << ',' << format_double(r.throughput) << ','
           << format_double(r.tau0) << ',' << format_double(r.tau1) << ','
           << r.outer_iters << ',' << r.inner_iters << ','
           << (record_wall_time ? format_double(r.wall_time) : std::string("0"))
           << ',' << r.termination << "\n";
    }
    return os.str();
}

void save_csv(const std::vector<RecordRow>& rows, const std::string& path,
              bool record_wall_time) {
    write_file(path, rows_to_csv(rows, record_wall_time));
}

std::vector<SummaryRow> summarize(const std::vector<RecordRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("no rows to summarize");
    std::vector<SummaryRow> out;
    std::vector<std::pair<Scheme, double>> keys;
    for (const RecordRow& r : rows) {
        const std::pair<Scheme, double> key{r.scheme, r.sweep_value};
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            keys.push_back(key);
    }
    for (const auto& [scheme, value] : keys) {
        std::vector<double> tp, tau1;
        for (const RecordRow& r : rows)
            if (r.scheme == scheme && r.sweep_value == value) {
                tp.push_back(r.throughput);
                tau1.push_back(r.tau1);
            }
        SummaryRow s;
        s.scheme = scheme;
        s.sweep_value = value;
        s.count = static_cast<int>(tp.size());
        s.mean_throughput = mean_of(tp);
        s.stderr_throughput = stderr_of(tp, s.mean_throughput);
        s.min_throughput = *std::min_element(tp.begin(), tp.end());
        s.max_throughput = *std::max_element(tp.begin(), tp.end());
        s.mean_tau1 = mean_of(tau1);
        s.stderr_tau1 = stderr_of(tau1, s.mean_tau1);
        s.min_tau1 = *std::min_element(tau1.begin(), tau1.end());
        s.max_tau1 = *std::max_element(tau1.begin(), tau1.end());
        out.push_back(s);
    }
    return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << "scheme,sweep_value,count,mean_throughput,stderr_throughput,"
          "min_throughput,max_throughput,mean_tau1,stderr_tau1,min_tau1,"
          "max_tau1\n";
    for (const SummaryRow& s : rows) {
        os << to_string(s.scheme) << ',' << format_double(s.sweep_value) << ','
           << s.count << ',' << format_double(s.mean_throughput) << ','
           << format_double(s.stderr_throughput) << ','
           << format_double(s.min_throughput) << ','
           << format_double(s.max_throughput) << ','
           << format_double(s.mean_tau1) << ','
           << format_double(s.stderr_tau1) << ','
           << format_double(s.min_tau1) << ','
           << format_double(s.max_tau1) << "\n";
    }
    return os.str();
}

std::string summary_plot_script(const std::vector<SummaryRow>& rows,
                                SweepVar var, const std::string& stem) {
    std::vector<Scheme> schemes;
    for (const SummaryRow& s : rows)
        if (std::find(schemes.begin(), schemes.end(), s.scheme) == schemes.end())
            schemes.push_back(s.scheme);

    std::ostringstream os;
    os << "# mean throughput vs " << to_string(var)
       << "; error bars are one standard error\n";
    os << "set terminal pngcairo size 900,600\n";
    os << "set output \"" << stem << ".png\"\n";
    os << "set xlabel \"" << to_string(var) << "\"\n";
    os << "set ylabel \"throughput (bits/s/Hz)\"\n";
    os << "set key top left\n";
    os << "set grid\n";
    if (var == SweepVar::circuit_power) os << "set logscale x\n";
    for (Scheme sch : schemes) {
        os << "$" << to_string(sch) << " << EOD\n";
        for (const SummaryRow& s : rows)
            if (s.scheme == sch)
                os << format_double_short(s.sweep_value) << " "
                   << format_double_short(s.mean_throughput) << " "
                   << format_double_short(s.stderr_throughput) << "\n";
        os << "EOD\n";
    }
    os << "plot";
    for (std::size_t i = 0; i < schemes.size(); ++i)
        os << (i ? ", " : " ") << "$" << to_string(schemes[i])
           << " using 1:2:3 with yerrorlines title \""
           << to_string(schemes[i]) << "\"";
    os << "\n";
    return os.str();
}

namespace {

void parse_params(const json& j, SystemParams& p) {
    for (const auto& [key, val] : j.items()) {
        if (key == "num_antennas") p.num_antennas = val.get<int>();
        else if (key == "num_pairs") p.num_pairs = val.get<int>();
        else if (key == "ps_power") p.ps_power = val.get<double>();
        else if (key == "conversion_eff") p.conversion_eff = val.get<double>();
        else if (key == "circuit_power") p.circuit_power = val.get<double>();
        else if (key == "noise_power") p.noise_power = val.get<double>();
        else if (key == "path_loss_exp") p.path_loss_exp = val.get<double>();
        else if (key == "path_loss_const") p.path_loss_const = val.get<double>();
        else if (key == "area_side") p.area_side = val.get<double>();
        else if (key == "max_pair_dist") p.max_pair_dist = val.get<double>();
        else if (key == "bandwidth_hz") p.bandwidth_hz = val.get<double>();
        else throw std::invalid_argument("unknown params key: " + key);
    }
}

void parse_solver(const json& j, SolverOptions& s) {
    for (const auto& [key, val] : j.items()) {
        if (key == "q_init") s.q_init = val.get<double>();
        else if (key == "outer_tol") s.outer_tol = val.get<double>();
        else if (key == "inner_tol") s.inner_tol = val.get<double>();
        else if (key == "max_outer") s.max_outer = val.get<int>();
        else if (key == "max_inner") s.max_inner = val.get<int>();
        else if (key == "subproblem_tol") s.subproblem_tol = val.get<double>();
        else if (key == "p_init_rule") {
            const std::string r = val.get<std::string>();
            if (r == "equal-split") s.p_init_rule = InitRule::equal_split;
            else if (r == "zero-plus-epsilon")
                s.p_init_rule = InitRule::zero_plus_epsilon;
            else throw std::invalid_argument("unknown p_init_rule: " + r);
        } else {
            throw std::invalid_argument("unknown solver key: " + key);
        }
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") +
                                    e.what());
    }
    ExperimentConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (key == "sweep_var")
            cfg.sweep_var = sweep_var_from_string(val.get<std::string>());
        else if (key == "sweep_values")
            cfg.sweep_values = val.get<std::vector<double>>();
        else if (key == "realizations")
            cfg.realizations = val.get<int>();
        else if (key == "schemes") {
            cfg.schemes.clear();
            for (const auto& s : val)
                cfg.schemes.push_back(scheme_from_string(s.get<std::string>()));
        } else if (key == "master_seed")
            cfg.master_seed = val.get<std::uint64_t>();
        else if (key == "threads")
            cfg.threads = val.get<int>();
        else if (key == "params")
            parse_params(val, cfg.base);
        else if (key == "solver")
            parse_solver(val, cfg.solver);
        else
            throw std::invalid_argument("unknown config key: " + key);
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["sweep_var"] = to_string(cfg.sweep_var);
    j["sweep_values"] = cfg.sweep_values;
    j["realizations"] = cfg.realizations;
    json schemes = json::array();
    for (Scheme s : cfg.schemes) schemes.push_back(to_string(s));
    j["schemes"] = schemes;
    j["master_seed"] = cfg.master_seed;
    j["threads"] = cfg.threads;
    j["params"] = {{"num_antennas", cfg.base.num_antennas},
                   {"num_pairs", cfg.base.num_pairs},
                   {"ps_power", cfg.base.ps_power},
                   {"conversion_eff", cfg.base.conversion_eff},
                   {"circuit_power", cfg.base.circuit_power},
                   {"noise_power", cfg.base.noise_power},
                   {"path_loss_exp", cfg.base.path_loss_exp},
                   {"path_loss_const", cfg.base.path_loss_const},
                   {"area_side", cfg.base.area_side},
                   {"max_pair_dist", cfg.base.max_pair_dist},
                   {"bandwidth_hz", cfg.base.bandwidth_hz}};
    j["solver"] = {{"q_init", cfg.solver.q_init},
                   {"outer_tol", cfg.solver.outer_tol},
                   {"inner_tol", cfg.solver.inner_tol},
                   {"max_outer", cfg.solver.max_outer},
                   {"max_inner", cfg.solver.max_inner},
                   {"subproblem_tol", cfg.solver.subproblem_tol},
                   {"p_init_rule", to_string(cfg.solver.p_init_rule)}};
    return j.dump(2);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string val = assignment.substr(eq + 1);

    auto split_list = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };

    json leaf;
    if (key == "sweep_var" || key == "solver.p_init_rule")
        leaf = val;
    else if (key == "schemes" || key == "sweep_values") {
        leaf = json::array();
        for (const std::string& s : split_list(val))
            if (key == "schemes") leaf.push_back(s);
            else leaf.push_back(std::stod(s));
    } else {
        try {
            leaf = json::parse(val);  // numbers and booleans
        } catch (const json::parse_error&) {
            leaf = val;
        }
    }

    json patch;
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
        patch[key] = leaf;
    } else {
        patch[key.substr(0, dot)][key.substr(dot + 1)] = leaf;
    }

    // reuse the strict parser so unknown keys get the same diagnostics;
    // carry over the fields that live outside the config file
    const bool keep_timing = cfg.record_wall_time;
    json full = json::parse(config_to_json(cfg));
    full.merge_patch(patch);
    cfg = parse_experiment_config(full.dump());
    cfg.record_wall_time = keep_timing;
}

}  // namespace wpcn
