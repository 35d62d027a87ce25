#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpcn/baselines.hpp"
#include "wpcn/harness.hpp"
#include "wpcn/io.hpp"
#include "wpcn/model.hpp"
#include "wpcn/oracle.hpp"
#include "wpcn/rng.hpp"
#include "wpcn/solver.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wpcn;

constexpr int kExitBadConfig = 2;
constexpr int kExitInfeasible = 3;

Instance generate_instance(const SystemParams& params, std::uint64_t seed) {
    const Topology topo = generate_topology(params, derive_seed(seed, 1));
    const ChannelState chans =
        sample_channels(topo, params, derive_seed(seed, 2));
    return build_instance(chans, energy_beamformer(chans), params);
}

void print_allocation(const Allocation& alloc, const Instance& inst) {
    std::cout << "tau0 = " << format_double(alloc.tau0) << "\n";
    std::cout << "tau1 = " << format_double(alloc.tau1) << "\n";
    std::cout << "t = " << format_double(alloc.t) << "\n";
    for (std::size_t n = 0; n < alloc.p.size(); ++n)
        std::cout << "p[" << n << "] = " << format_double(alloc.p[n]) << "\n";
    std::cout << "throughput_bps_hz = "
              << format_double(sum_throughput(alloc, inst)) << "\n";
}

struct CommonArgs {
    std::string config_path;
    std::string output_dir = "out";
    std::string fixture;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int realizations = 0;  // 0 = keep config value
    int grid = 200;
    int n_pairs = 0;       // 0 = keep params value
    int threads = 0;       // 0 = keep config / hardware
    int verbosity = 0;
    bool strict = false;
    bool timing = false;
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--config", a.config_path, "JSON experiment config");
    sub->add_option("--output", a.output_dir, "output directory");
    sub->add_option("--fixture", a.fixture, "instance fixture file");
    sub->add_option("--set", a.overrides,
                    "config override key=value (repeatable)");
    sub->add_option("--seed", a.seed, "master seed")
        ->each([&a](const std::string&) { a.seed_given = true; });
    sub->add_option("--realizations", a.realizations,
                    "channel realizations per sweep value");
    sub->add_option("--grid", a.grid, "oracle grid points per axis");
    sub->add_option("--n", a.n_pairs, "number of D2D pairs");
    sub->add_option("--threads", a.threads, "worker threads (0 = all cores)");
    sub->add_option("--verbosity", a.verbosity, "0 quiet, 1 echo config");
    sub->add_flag("--strict", a.strict, "exit 3 on infeasible results");
    sub->add_flag("--timing", a.timing,
                  "record wall times in the CSV (breaks byte reproducibility)");
}

ExperimentConfig load_config(const CommonArgs& a) {
    ExperimentConfig cfg;
    if (!a.config_path.empty())
        cfg = parse_experiment_config(read_file(a.config_path));
    for (const std::string& ov : a.overrides) apply_override(cfg, ov);
    if (a.seed_given) cfg.master_seed = a.seed;
    if (a.realizations > 0) cfg.realizations = a.realizations;
    if (a.n_pairs > 0) cfg.base.num_pairs = a.n_pairs;
    if (a.threads > 0) cfg.threads = a.threads;
    cfg.record_wall_time = a.timing;
    return cfg;
}

void echo_config(const ExperimentConfig& cfg, int verbosity) {
    if (verbosity >= 1) std::cout << config_to_json(cfg) << "\n";
}

bool any_infeasible(const std::vector<RecordRow>& rows) {
    for (const RecordRow& r : rows)
        if (r.termination == "infeasible" || r.termination == "error")
            return true;
    return false;
}

int run_solve(const CommonArgs& a) {
    ExperimentConfig cfg = load_config(a);
    echo_config(cfg, a.verbosity);
    const Instance inst =
        a.fixture.empty() ? generate_instance(cfg.base, cfg.master_seed)
                          : load_instance(a.fixture);
    const auto [alloc, rep] = solve(inst, cfg.solver);
    print_allocation(alloc, inst);
    std::cout << report_to_text(rep);
    if (a.strict && rep.termination == Termination::infeasible)
        return kExitInfeasible;
    return 0;
}

int run_sweep(ExperimentConfig cfg, const CommonArgs& a,
              const std::string& csv_name) {
    echo_config(cfg, a.verbosity);
    const std::vector<RecordRow> rows = run_experiment(cfg);
    const fs::path dir(a.output_dir);
    save_csv(rows, (dir / csv_name).string(), cfg.record_wall_time);
    const std::vector<SummaryRow> sums = summarize(rows);
    const std::string base = fs::path(csv_name).stem().string();
    write_file((dir / (base + "_summary.csv")).string(), summary_to_csv(sums));
    write_file((dir / (base + "_plot.gp")).string(),
               summary_plot_script(sums, cfg.sweep_var, base));
    for (const SummaryRow& s : sums)
        std::cout << to_string(s.scheme) << " " << to_string(cfg.sweep_var)
                  << "=" << format_double_short(s.sweep_value)
                  << " mean_throughput=" << format_double_short(s.mean_throughput)
                  << " mean_tau1=" << format_double_short(s.mean_tau1) << "\n";
    if (a.strict && any_infeasible(rows)) return kExitInfeasible;
    return 0;
}

int run_table1(const CommonArgs& a) {
    int rc = 0;
    for (int n : {3, 6, 9}) {
        ExperimentConfig cfg = load_config(a);
        cfg.sweep_var = SweepVar::num_antennas;
        cfg.sweep_values = {1, 2, 3, 5, 10, 15};
        cfg.base.num_pairs = n;
        cfg.schemes = {Scheme::proposed};
        std::cout << "# N = " << n << "\n";
        rc = std::max(rc, run_sweep(cfg, a,
                                    "table1_n" + std::to_string(n) + ".csv"));
    }
    return rc;
}

int run_table2(const CommonArgs& a) {
    ExperimentConfig cfg = load_config(a);
    cfg.sweep_var = SweepVar::ps_power;
    cfg.sweep_values = {1, 2, 3, 4, 5, 6};
    if (a.n_pairs == 0) cfg.base.num_pairs = 3;
    cfg.schemes = {Scheme::proposed};
    return run_sweep(cfg, a, "table2.csv");
}

int run_oracle(const CommonArgs& a) {
    if (a.fixture.empty())
        throw std::invalid_argument("oracle requires --fixture");
    const Instance inst = load_instance(a.fixture);
    GridSpec spec;
    spec.tau1_points = a.grid;
    spec.power_points_per_user = a.grid;
    const GoldenRecord rec = make_golden(inst, spec);
    std::cout << golden_to_text(rec);
    if (inst.num_pairs() == 1) {
        const OracleN1Result r1 = oracle_n1(inst);
        std::cout << "n1_value = " << format_double(r1.value) << "\n";
        std::cout << "n1_t = " << format_double(r1.t) << "\n";
    }
    if (!a.output_dir.empty()) {
        const fs::path dir(a.output_dir);
        const std::string stem = fs::path(a.fixture).stem().string();
        save_golden(rec, (dir / (stem + "_golden.txt")).string());
    }
    return 0;
}

// The two committed miniature instances and their oracle verdicts. Fixed
// seeds; regenerating must reproduce the repository files byte for byte.
int run_fixtures(const CommonArgs& a) {
    struct FixtureDef {
        const char* name;
        int pairs;
        int antennas;
        std::uint64_t seed;
    };
    for (const FixtureDef def :
         {FixtureDef{"n1_small", 1, 2, 7}, FixtureDef{"n2_small", 2, 3, 9}}) {
        SystemParams params;
        params.num_pairs = def.pairs;
        params.num_antennas = def.antennas;
        const Instance inst = generate_instance(params, def.seed);
        const fs::path dir(a.output_dir);
        save_instance((dir / (std::string(def.name) + ".txt")).string(), inst);
        GridSpec spec;
        spec.tau1_points = a.grid;
        spec.power_points_per_user = a.grid;
        save_golden(make_golden(inst, spec),
                    (dir / (std::string(def.name) + "_golden.txt")).string());
        std::cout << def.name << " written\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint time/power optimizer for wireless-powered D2D networks"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* c_solve = app.add_subcommand("solve", "solve one instance");
    CLI::App* c_sweep = app.add_subcommand("sweep", "run a configured sweep");
    CLI::App* c_t1 = app.add_subcommand(
        "table1", "throughput vs antennas, N in {3,6,9}");
    CLI::App* c_t2 =
        app.add_subcommand("table2", "transmit-time fraction vs source power");
    CLI::App* c_oracle =
        app.add_subcommand("oracle", "brute-force reference on a fixture");
    CLI::App* c_fix =
        app.add_subcommand("fixtures", "emit the miniature fixture instances");
    for (CLI::App* sub : {c_solve, c_sweep, c_t1, c_t2, c_oracle, c_fix})
        add_common(sub, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadConfig;
    }

    try {
        if (c_solve->parsed()) return run_solve(args);
        if (c_sweep->parsed()) return run_sweep(load_config(args), args, "sweep.csv");
        if (c_t1->parsed()) return run_table1(args);
        if (c_t2->parsed()) return run_table2(args);
        if (c_oracle->parsed()) return run_oracle(args);
        if (c_fix->parsed()) return run_fixtures(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    return 0;
}
