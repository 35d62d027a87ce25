#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = WPCN_CLI_PATH;
const fs::path kFixtures = WPCN_FIXTURE_DIR;

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        res.out.append(buf, n);
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// value printed after "key = " on its own line
std::string field(const std::string& text, const std::string& key) {
    const std::string tag = key + " = ";
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
    return {};
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir =
        fs::temp_directory_path() / ("wpcn_cli_" + tag + "_" +
                                     std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("solve prints a complete allocation") {
    const RunResult res = run_cli("solve --n 1 --seed 1");
    REQUIRE(res.status == 0);
    const double tau0 = std::stod(field(res.out, "tau0"));
    const double tau1 = std::stod(field(res.out, "tau1"));
    CHECK(tau0 + tau1 == 1.0);
    CHECK(tau0 > 0.0);
    CHECK(std::stod(field(res.out, "throughput_bps_hz")) > 0.0);
    CHECK(field(res.out, "termination") == "converged");
    CHECK(!field(res.out, "p[0]").empty());
}

TEST_CASE("bad invocations exit with the config error code") {
    CHECK(run_cli("frobnicate").status == 2);
    CHECK(run_cli("solve --config /nonexistent/cfg.json").status == 2);
    CHECK(run_cli("sweep --set params.bogus=1").status == 2);
    CHECK(run_cli("sweep --set schemes=laser").status == 2);
    CHECK(run_cli("").status == 2);  // a subcommand is required
}

TEST_CASE("strict mode signals infeasibility") {
    const RunResult res =
        run_cli("solve --n 1 --seed 1 --set params.circuit_power=10 --strict");
    CHECK(res.status == 3);
    CHECK(field(res.out, "termination") == "infeasible");
}

TEST_CASE("oracle reproduces the committed verdict") {
    const std::string fixture = (kFixtures / "n2_small.txt").string();
    const RunResult res =
        run_cli("oracle --fixture \"" + fixture + "\" --grid 200");
    REQUIRE(res.status == 0);
    const std::string committed = slurp(kFixtures / "n2_small_golden.txt");
    CHECK(res.out.rfind(committed, 0) == 0);  // stdout begins with the record

    // the single-pair fixture also reports the closed-form reference
    const std::string f1 = (kFixtures / "n1_small.txt").string();
    const RunResult r1 = run_cli("oracle --fixture \"" + f1 + "\" --grid 200");
    REQUIRE(r1.status == 0);
    CHECK(!field(r1.out, "n1_value").empty());
    const double grid_value = std::stod(field(r1.out, "value"));
    const double exact = std::stod(field(r1.out, "n1_value"));
    const double modulus = std::stod(field(r1.out, "modulus"));
    CHECK(grid_value <= exact + 1e-12);
    CHECK(exact <= grid_value + modulus);
}

TEST_CASE("fixture generation is byte-stable") {
    const fs::path dir = fresh_dir("fixtures");
    const RunResult res =
        run_cli("fixtures --output \"" + dir.string() + "\" --grid 200");
    REQUIRE(res.status == 0);
    for (const std::string name :
         {"n1_small.txt", "n1_small_golden.txt", "n2_small.txt",
          "n2_small_golden.txt"}) {
        CAPTURE(name);
        CHECK(slurp(dir / name) == slurp(kFixtures / name));
    }
    fs::remove_all(dir);
}

TEST_CASE("sweep writes rows, summary and plot script") {
    const fs::path dir = fresh_dir("sweep");
    const RunResult res = run_cli(
        "sweep --set sweep_values=1,2 --realizations 2 --n 2"
        " --set params.num_antennas=2 --seed 5 --output \"" +
        dir.string() + "\"");
    REQUIRE(res.status == 0);
    CHECK(res.out.find("proposed ps_power=1 mean_throughput=") !=
          std::string::npos);
    CHECK(res.out.find("oet ps_power=2 ") != std::string::npos);

    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("scheme,sweep_var,sweep_value,realization,seed,"
                    "throughput_bps_hz,tau0,tau1,outer_iters,inner_iters,"
                    "wall_time_s,termination\n",
                    0) == 0);
    // 2 values x 2 realizations x 3 schemes + header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);

    const std::string summary = slurp(dir / "sweep_summary.csv");
    CHECK(summary.rfind("scheme,sweep_value,count,", 0) == 0);

    const std::string plot = slurp(dir / "sweep_plot.gp");
    CHECK(plot.find("$proposed << EOD") != std::string::npos);
    CHECK(plot.find("yerrorlines") != std::string::npos);
    CHECK(plot.find("set xlabel \"ps_power\"") != std::string::npos);

    // identical invocation, identical bytes
    const fs::path dir2 = fresh_dir("sweep_again");
    const RunResult res2 = run_cli(
        "sweep --set sweep_values=1,2 --realizations 2 --n 2"
        " --set params.num_antennas=2 --seed 5 --threads 4 --output \"" +
        dir2.string() + "\"");
    REQUIRE(res2.status == 0);
    CHECK(slurp(dir2 / "sweep.csv") == csv);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("strict sweeps fail when nothing can transmit") {
    const fs::path dir = fresh_dir("strict");
    const RunResult res = run_cli(
        "sweep --set sweep_values=1 --realizations 1 --n 2"
        " --set params.num_antennas=2 --set params.circuit_power=10"
        " --strict --output \"" +
        dir.string() + "\"");
    CHECK(res.status == 3);
    fs::remove_all(dir);
}
