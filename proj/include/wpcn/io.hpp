#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "wpcn/model.hpp"

namespace wpcn {

// Flat key = value text format for fixing instances on disk, so the oracle
// and the solver can be driven on identical inputs. Doubles are written with
// 17 significant digits and round-trip bit-exactly.
std::string instance_to_text(const Instance& inst);
Instance instance_from_text(std::string_view text);

void save_instance(const std::filesystem::path& path, const Instance& inst);
Instance load_instance(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data);

// Hash of the canonical serialization; used to verify paired comparisons and
// to stamp golden files.
std::uint64_t instance_hash(const Instance& inst);

// Canonical numeric formatting shared by all text outputs.
std::string format_double(double v);       // %.17g, round-trips
std::string format_double_short(double v); // %.10g, for CSV data columns

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace wpcn
