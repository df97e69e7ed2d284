#pragma once

#include "errdens/montecarlo.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace errdens {

enum class RunMode { Estimate, Rate, Gap, Normality, Supnorm };

//! A fully parsed run request. Produced by resolve_config() from flat
//! key=value pairs (config file plus command-line overrides); every field
//! that was "auto" in the input is still resolved lazily inside run(), and
//! the final numbers are echoed into the output metadata.
struct RunConfig {
  RunMode mode = RunMode::Estimate;
  std::string input_path;  // estimate mode
  std::string output_path; // prefix for <output>.csv and <output>.meta.json
  std::uint64_t seed = 1;

  ModelSpec model;          // simulation modes
  std::vector<int> n_grid;  // rate/gap/supnorm
  int n = 0;                // normality
  int reps = 0;
  double eps0 = 0.0;

  BandwidthRule bandwidths;
  GridSpec grid;
  std::optional<TrimRegion> trim; // nullopt = auto

  //! The raw key=value view this config was built from, in resolution order.
  std::vector<std::pair<std::string, std::string>> raw;
};

//! Parses a flat key=value config file ('#' starts a comment). Later keys
//! override earlier ones. Throws Io / InvalidArgument.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

//! Builds a RunConfig from ordered key=value pairs (file entries first,
//! then overrides). Unknown keys and malformed values throw InvalidArgument.
RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& entries);

const char* run_mode_name(RunMode mode);

} // namespace errdens
