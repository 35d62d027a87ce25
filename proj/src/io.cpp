#include "wpcn/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wpcn {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_double_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string instance_to_text(const Instance& inst) {
    std::ostringstream os;
    const auto& p = inst.params;
    os << "# wpcn instance v1\n";
    os << "params.num_antennas = " << p.num_antennas << "\n";
    os << "params.num_pairs = " << p.num_pairs << "\n";
    os << "params.ps_power = " << format_double(p.ps_power) << "\n";
    os << "params.conversion_eff = " << format_double(p.conversion_eff) << "\n";
    os << "params.circuit_power = " << format_double(p.circuit_power) << "\n";
    os << "params.noise_power = " << format_double(p.noise_power) << "\n";
    os << "params.path_loss_exp = " << format_double(p.path_loss_exp) << "\n";
    os << "params.path_loss_const = " << format_double(p.path_loss_const) << "\n";
    os << "params.area_side = " << format_double(p.area_side) << "\n";
    os << "params.max_pair_dist = " << format_double(p.max_pair_dist) << "\n";
    os << "params.bandwidth = " << format_double(p.bandwidth_hz) << "\n";
    const int n = inst.num_pairs();
    for (int i = 0; i < n; ++i)
        os << "e[" << i << "] = " << format_double(inst.harvest_rate[i]) << "\n";
    for (int i = 0; i < n; ++i)
        os << "g_direct[" << i << "] = " << format_double(inst.g_direct[i]) << "\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                os << "g_cross[" << i << "][" << j << "] = "
                   << format_double(inst.g_cross[i][j]) << "\n";
    return os.str();
}

namespace {

std::map<std::string, std::string, std::less<>> parse_kv(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

double require_double(const std::map<std::string, std::string, std::less<>>& kv,
                      const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("instance file missing key: " + key);
    return std::stod(it->second);
}

}  // namespace

Instance instance_from_text(std::string_view text) {
    const auto kv = parse_kv(text);
    Instance inst;
    auto& p = inst.params;
    p.num_antennas = static_cast<int>(require_double(kv, "params.num_antennas"));
    p.num_pairs = static_cast<int>(require_double(kv, "params.num_pairs"));
    p.ps_power = require_double(kv, "params.ps_power");
    p.conversion_eff = require_double(kv, "params.conversion_eff");
    p.circuit_power = require_double(kv, "params.circuit_power");
    p.noise_power = require_double(kv, "params.noise_power");
    p.path_loss_exp = require_double(kv, "params.path_loss_exp");
    p.path_loss_const = require_double(kv, "params.path_loss_const");
    p.area_side = require_double(kv, "params.area_side");
    p.max_pair_dist = require_double(kv, "params.max_pair_dist");
    p.bandwidth_hz = require_double(kv, "params.bandwidth");
    const int n = p.num_pairs;
    if (n < 1) throw std::runtime_error("instance file: num_pairs must be >= 1");
    inst.harvest_rate.resize(n);
    inst.g_direct.resize(n);
    inst.g_cross.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        inst.harvest_rate[i] = require_double(kv, "e[" + std::to_string(i) + "]");
        inst.g_direct[i] = require_double(kv, "g_direct[" + std::to_string(i) + "]");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                inst.g_cross[i][j] = require_double(
                    kv, "g_cross[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < n; ++i)
        if (inst.harvest_rate[i] <= p.circuit_power * eps)
            inst.zero_harvest_users.push_back(i);
    return inst;
}

void save_instance(const std::filesystem::path& path, const Instance& inst) {
    write_file(path, instance_to_text(inst));
}

Instance load_instance(const std::filesystem::path& path) {
    return instance_from_text(read_file(path));
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t instance_hash(const Instance& inst) {
    return fnv1a64(instance_to_text(inst));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write file: " + path.string());
    os << content;
}

}  // namespace wpcn
