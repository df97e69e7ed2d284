#include "errdens/config.hpp"

#include "errdens/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace errdens {

namespace {

std::string trim_ws(const std::string& s)
{
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos)
    return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value)
{
  std::size_t consumed = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &consumed);
  } catch (const std::exception&) {
    throw_error(ErrorCode::InvalidArgument, "config: " + key + " is not a number: " + value);
  }
  require(consumed == value.size() && std::isfinite(out), ErrorCode::InvalidArgument,
          "config: " + key + " is not a finite number: " + value);
  return out;
}

long long to_int(const std::string& key, const std::string& value)
{
  std::size_t consumed = 0;
  long long out = 0;
  try {
    out = std::stoll(value, &consumed);
  } catch (const std::exception&) {
    throw_error(ErrorCode::InvalidArgument, "config: " + key + " is not an integer: " + value);
  }
  require(consumed == value.size(), ErrorCode::InvalidArgument,
          "config: " + key + " is not an integer: " + value);
  return out;
}

std::vector<std::string> split_list(const std::string& value)
{
  std::vector<std::string> parts;
  std::string part;
  std::stringstream ss(value);
  while (std::getline(ss, part, ','))
    parts.push_back(trim_ws(part));
  return parts;
}

MeanFamily parse_mean_family(const std::string& value)
{
  if (value == "constant") return MeanFamily::Constant;
  if (value == "linear") return MeanFamily::Linear;
  if (value == "sine_product") return MeanFamily::SineProduct;
  throw_error(ErrorCode::InvalidArgument, "config: unknown m_family: " + value);
}

CovariateFamily parse_covariate_family(const std::string& value)
{
  if (value == "uniform_box") return CovariateFamily::UniformBox;
  if (value == "truncated_normal") return CovariateFamily::TruncatedNormal;
  throw_error(ErrorCode::InvalidArgument, "config: unknown g_family: " + value);
}

ErrorFamily parse_error_family(const std::string& value)
{
  if (value == "std_normal") return ErrorFamily::StdNormal;
  if (value == "mixture_two_normals") return ErrorFamily::MixtureTwoNormals;
  if (value == "scaled_student_t8") return ErrorFamily::ScaledStudentT8;
  throw_error(ErrorCode::InvalidArgument, "config: unknown f_family: " + value);
}

RunMode parse_mode(const std::string& value)
{
  if (value == "estimate") return RunMode::Estimate;
  if (value == "rate") return RunMode::Rate;
  if (value == "gap") return RunMode::Gap;
  if (value == "normality") return RunMode::Normality;
  if (value == "supnorm") return RunMode::Supnorm;
  throw_error(ErrorCode::InvalidArgument, "config: unknown mode: " + value);
}

const std::set<std::string>& known_keys()
{
  static const std::set<std::string> keys = {
    "mode", "input", "output", "seed",
    "d", "m_family", "g_family", "f_family", "noise_scale",
    "n", "n_grid", "reps", "eps0",
    "bandwidths", "b0", "b1", "c0", "c1",
    "grid_min", "grid_max", "grid_count",
    "trim_lower", "trim_upper",
  };
  return keys;
}

} // namespace

const char* run_mode_name(RunMode mode)
{
  switch (mode) {
    case RunMode::Estimate: return "estimate";
    case RunMode::Rate: return "rate";
    case RunMode::Gap: return "gap";
    case RunMode::Normality: return "normality";
    case RunMode::Supnorm: return "supnorm";
  }
  return "unknown";
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path)
{
  std::ifstream file(path);
  require(file.good(), ErrorCode::Io, "cannot open config file " + path);

  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos)
      line = line.substr(0, comment);
    line = trim_ws(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::InvalidArgument,
            path + ": line " + std::to_string(line_no) + " is not key=value");
    const std::string key = trim_ws(line.substr(0, eq));
    const std::string value = trim_ws(line.substr(eq + 1));
    require(!key.empty(), ErrorCode::InvalidArgument,
            path + ": line " + std::to_string(line_no) + " has an empty key");
    entries.emplace_back(key, value);
  }
  return entries;
}

RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& entries)
{
  // later entries win; overrides are appended after file entries
  std::vector<std::pair<std::string, std::string>> effective;
  for (const auto& [key, value] : entries) {
    require(known_keys().count(key) != 0, ErrorCode::InvalidArgument,
            "config: unknown key: " + key);
    bool replaced = false;
    for (auto& existing : effective) {
      if (existing.first == key) {
        existing.second = value;
        replaced = true;
        break;
      }
    }
    if (!replaced)
      effective.emplace_back(key, value);
  }

  const auto find = [&](const std::string& key) -> const std::string* {
    for (const auto& [k, v] : effective) {
      if (k == key)
        return &v;
    }
    return nullptr;
  };

  RunConfig config;
  config.raw = effective;

  const std::string* mode = find("mode");
  require(mode != nullptr, ErrorCode::InvalidArgument, "config: mode is required");
  config.mode = parse_mode(*mode);

  const std::string* output = find("output");
  require(output != nullptr && !output->empty(), ErrorCode::InvalidArgument,
          "config: output is required");
  config.output_path = *output;

  if (const auto* v = find("seed")) {
    const long long s = to_int("seed", *v);
    require(s >= 0, ErrorCode::InvalidArgument, "config: seed must be >= 0");
    config.seed = static_cast<std::uint64_t>(s);
  }
  config.model.seed = config.seed;

  if (const auto* v = find("d")) {
    const long long d = to_int("d", *v);
    require(d >= 1 && d <= 16, ErrorCode::InvalidArgument, "config: d must be in [1, 16]");
    config.model.d = static_cast<int>(d);
  }
  if (const auto* v = find("m_family"))
    config.model.m_family = parse_mean_family(*v);
  if (const auto* v = find("g_family"))
    config.model.g_family = parse_covariate_family(*v);
  if (const auto* v = find("f_family"))
    config.model.f_family = parse_error_family(*v);
  if (const auto* v = find("noise_scale")) {
    config.model.noise_scale = to_double("noise_scale", *v);
    require(config.model.noise_scale >= 0.0, ErrorCode::InvalidArgument,
            "config: noise_scale must be >= 0");
  }

  if (const auto* v = find("n")) {
    const long long n = to_int("n", *v);
    require(n >= 2, ErrorCode::InvalidArgument, "config: n must be >= 2");
    config.n = static_cast<int>(n);
  }
  if (const auto* v = find("n_grid")) {
    for (const auto& part : split_list(*v)) {
      const long long n = to_int("n_grid", part);
      require(n >= 2, ErrorCode::InvalidArgument, "config: n_grid entries must be >= 2");
      config.n_grid.push_back(static_cast<int>(n));
    }
    require(!config.n_grid.empty(), ErrorCode::InvalidArgument, "config: n_grid is empty");
  }
  if (const auto* v = find("reps")) {
    const long long r = to_int("reps", *v);
    require(r >= 1, ErrorCode::InvalidArgument, "config: reps must be >= 1");
    config.reps = static_cast<int>(r);
  }
  if (const auto* v = find("eps0"))
    config.eps0 = to_double("eps0", *v);

  // bandwidths: auto (plug-in), auto_rate, or manual b0/b1
  const std::string* bw = find("bandwidths");
  const std::string* b0 = find("b0");
  const std::string* b1 = find("b1");
  if (const auto* v = find("c0"))
    config.bandwidths.c0 = to_double("c0", *v);
  if (const auto* v = find("c1"))
    config.bandwidths.c1 = to_double("c1", *v);
  require(config.bandwidths.c0 > 0.0 && config.bandwidths.c1 > 0.0,
          ErrorCode::InvalidArgument, "config: c0 and c1 must be positive");

  std::string bw_kind = bw ? *bw : ((b0 && b1) ? "manual" : "auto");
  if (bw_kind == "auto" || bw_kind == "auto_plugin") {
    config.bandwidths.mode = BandwidthRule::Mode::AutoPlugin;
  } else if (bw_kind == "auto_rate") {
    config.bandwidths.mode = BandwidthRule::Mode::AutoRate;
  } else if (bw_kind == "manual") {
    require(b0 != nullptr && b1 != nullptr, ErrorCode::InvalidArgument,
            "config: manual bandwidths need both b0 and b1");
    config.bandwidths.mode = BandwidthRule::Mode::Manual;
    config.bandwidths.b0 = to_double("b0", *b0);
    config.bandwidths.b1 = to_double("b1", *b1);
    require(config.bandwidths.b0 > 0.0 && config.bandwidths.b1 > 0.0,
            ErrorCode::InvalidArgument, "config: manual bandwidths must be positive");
  } else {
    throw_error(ErrorCode::InvalidArgument, "config: unknown bandwidths value: " + bw_kind);
  }

  const std::string* grid_min = find("grid_min");
  const std::string* grid_max = find("grid_max");
  const std::string* grid_count = find("grid_count");
  const bool any_grid = grid_min || grid_max || grid_count;
  const auto is_auto = [](const std::string* v) { return v == nullptr || *v == "auto"; };
  if (any_grid && !(is_auto(grid_min) && is_auto(grid_max) && is_auto(grid_count))) {
    require(grid_min && grid_max && grid_count, ErrorCode::InvalidArgument,
            "config: grid_min, grid_max and grid_count must be given together");
    config.grid.automatic = false;
    config.grid.min = to_double("grid_min", *grid_min);
    config.grid.max = to_double("grid_max", *grid_max);
    const long long count = to_int("grid_count", *grid_count);
    require(count >= 2, ErrorCode::InvalidArgument, "config: grid_count must be >= 2");
    require(config.grid.min < config.grid.max, ErrorCode::InvalidArgument,
            "config: grid_min must be below grid_max");
    config.grid.count = static_cast<int>(count);
  }

  const std::string* trim_lower = find("trim_lower");
  const std::string* trim_upper = find("trim_upper");
  if (!is_auto(trim_lower) || !is_auto(trim_upper)) {
    require(trim_lower && trim_upper, ErrorCode::InvalidArgument,
            "config: trim_lower and trim_upper must be given together");
    TrimRegion region;
    for (const auto& part : split_list(*trim_lower))
      region.lower.push_back(to_double("trim_lower", part));
    for (const auto& part : split_list(*trim_upper))
      region.upper.push_back(to_double("trim_upper", part));
    require(region.lower.size() == region.upper.size(), ErrorCode::InvalidArgument,
            "config: trim bounds must have the same dimension");
    config.trim = std::move(region);
  }

  // mode-specific requirements
  if (config.mode == RunMode::Estimate) {
    const std::string* input = find("input");
    require(input != nullptr && !input->empty(), ErrorCode::InvalidArgument,
            "config: estimate mode requires input");
    config.input_path = *input;
  } else {
    require(find("input") == nullptr, ErrorCode::InvalidArgument,
            "config: input is only valid in estimate mode");
    if (config.mode == RunMode::Normality) {
      require(config.n >= 2, ErrorCode::InvalidArgument,
              "config: normality mode requires n");
    } else {
      require(!config.n_grid.empty(), ErrorCode::InvalidArgument,
              "config: this mode requires n_grid");
    }
    require(config.reps >= 1, ErrorCode::InvalidArgument, "config: reps is required");
    if (config.trim) {
      require(static_cast<int>(config.trim->lower.size()) == config.model.d,
              ErrorCode::InvalidArgument, "config: trim bounds must match d");
    }
  }

  return config;
}

} // namespace errdens
