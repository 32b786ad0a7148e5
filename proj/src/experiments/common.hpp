#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pfmc/experiments.hpp"

namespace pfmc::experiments::detail {

/// Reads "seed" and "threads".
void read_run(ConfigReader& reader, RunSettings& run);
void write_run(json& j, const RunSettings& run);

/// Throws ConfigError unless value >= lo.
void require_at_least(const char* key, double value, double lo);

/// Column c of a replicate matrix.
std::vector<double> column_of(const std::vector<std::vector<double>>& rows, std::size_t c);

}  // namespace pfmc::experiments::detail
