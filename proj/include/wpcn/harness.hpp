#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpcn/model.hpp"
#include "wpcn/solver.hpp"

namespace wpcn {

enum class Scheme { proposed, tdma, oet };
enum class SweepVar { ps_power, circuit_power, num_antennas, num_pairs };

const char* to_string(Scheme s);
const char* to_string(SweepVar v);
Scheme scheme_from_string(const std::string& s);
SweepVar sweep_var_from_string(const std::string& s);

struct ExperimentConfig {
    SweepVar sweep_var = SweepVar::ps_power;
    std::vector<double> sweep_values;
    int realizations = 100;
    SystemParams base;
    std::vector<Scheme> schemes = {Scheme::proposed, Scheme::tdma, Scheme::oet};
    std::uint64_t master_seed = 1;
    int threads = 1;                // 0 = hardware concurrency
    bool record_wall_time = false;  // keep CSV byte-reproducible by default
    SolverOptions solver;

    void validate() const;  // throws std::invalid_argument
};

struct RecordRow {
    Scheme scheme = Scheme::proposed;
    SweepVar sweep_var = SweepVar::ps_power;
    double sweep_value = 0.0;
    int realization = 0;
    std::uint64_t seed = 0;
    double throughput = 0.0;  // bits/s/Hz
    double tau0 = 0.0;
    double tau1 = 0.0;
    int outer_iters = 0;
    int inner_iters = 0;
    double wall_time = 0.0;  // always measured; only written out on request
    std::string termination;
    std::uint64_t instance_hash = 0;  // channel-draw witness, not in the CSV
};

// One topology+channel draw per (sweep value, realization), derived
// deterministically from the master seed; every requested scheme runs on
// that same draw. Realizations run concurrently; each row lands in a
// preassigned slot, so the output order never depends on scheduling.
std::vector<RecordRow> run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "scheme,sweep_var,sweep_value,realization,seed,throughput_bps_hz,tau0,"
    "tau1,outer_iters,inner_iters,wall_time_s,termination";

std::string rows_to_csv(const std::vector<RecordRow>& rows,
                        bool record_wall_time);
void save_csv(const std::vector<RecordRow>& rows, const std::string& path,
              bool record_wall_time);

struct SummaryRow {
    Scheme scheme = Scheme::proposed;
    double sweep_value = 0.0;
    int count = 0;
    double mean_throughput = 0.0;
    double stderr_throughput = 0.0;
    double min_throughput = 0.0;
    double max_throughput = 0.0;
    double mean_tau1 = 0.0;
    double stderr_tau1 = 0.0;
    double min_tau1 = 0.0;
    double max_tau1 = 0.0;
};

// Per (scheme, sweep value) aggregates, in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<RecordRow>& rows);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

// Self-contained gnuplot script of mean throughput (with standard-error
// bars) against the sweep variable, one series per scheme. The data is
// inlined, so the script needs no CSV next to it.
std::string summary_plot_script(const std::vector<SummaryRow>& rows,
                                SweepVar var, const std::string& stem);

// JSON config file mirroring ExperimentConfig; unknown keys are rejected
// with the offending key named in the exception message.
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);

// Dotted-path override (e.g. "realizations=50", "params.ps_power=2",
// "sweep_values=1,2,3"); throws std::invalid_argument on unknown keys.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

}  // namespace wpcn
