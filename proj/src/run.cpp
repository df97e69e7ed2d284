#include "errdens/run.hpp"

#include "errdens/bandwidth.hpp"
#include "errdens/csv.hpp"
#include "errdens/errdensity.hpp"
#include "errdens/error.hpp"
#include "errdens/kernels.hpp"
#include "errdens/regression.hpp"
#include "errdens/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace errdens {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* bandwidth_source_name(BandwidthSource source)
{
  switch (source) {
    case BandwidthSource::ClosedForm: return "closed_form";
    case BandwidthSource::NumericMin: return "numeric_min";
    case BandwidthSource::AmisePlugin: return "amise_plugin";
    case BandwidthSource::Manual: return "manual";
  }
  return "unknown";
}

const char* a11_regime_name(A11Regime regime)
{
  switch (regime) {
    case A11Regime::Satisfied: return "satisfied";
    case A11Regime::Boundary: return "boundary";
    case A11Regime::Violated: return "violated";
  }
  return "unknown";
}

void write_text_file(const std::string& path, const std::string& content)
{
  std::ofstream file(path, std::ios::binary);
  require(file.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  file << content;
  require(file.good(), ErrorCode::Io, "write failed for " + path);
}

ordered_json raw_config_json(const RunConfig& config)
{
  ordered_json raw = ordered_json::object();
  for (const auto& [key, value] : config.raw)
    raw[key] = value;
  return raw;
}

// Normal-reference pilot scheme for real data, where the error curvature is
// unknown: a pilot regression bandwidth gives residuals, their robust scale
// feeds the N(0, sigma^2) reference curvature 3 / (8 sqrt(pi) sigma^5) into
// the plug-in rule, and b0 follows from the closed-form first-step order on
// standardized scales.
struct EstimatePlan {
  BandwidthPlan plan;
  double sigma_hat = 0.0;
  double x_scale = 1.0;
};

EstimatePlan resolve_estimate_bandwidths(const Sample& sample, const TrimRegion& trim,
                                         const BandwidthRule& rule)
{
  EstimatePlan out;
  out.plan.c0 = rule.c0;
  out.plan.c1 = rule.c1;

  if (rule.mode == BandwidthRule::Mode::Manual) {
    out.plan.b0 = rule.b0;
    out.plan.b1 = rule.b1;
    out.plan.source = BandwidthSource::Manual;
    return out;
  }

  double log_scale_sum = 0.0;
  int scaled_dims = 0;
  for (int j = 0; j < sample.d; ++j) {
    std::vector<double> column(sample.n);
    for (int i = 0; i < sample.n; ++i)
      column[i] = sample.x[static_cast<std::size_t>(i) * sample.d + j];
    const double sd = std::sqrt(sample_variance(column));
    if (sd > 0.0) {
      log_scale_sum += std::log(sd);
      ++scaled_dims;
    }
  }
  out.x_scale = scaled_dims > 0 ? std::exp(log_scale_sum / scaled_dims) : 1.0;

  const double n = sample.n;
  const double pilot_b0 =
    rule.c0 * out.x_scale * std::pow(n, -1.0 / (sample.d + 4));
  const ResidualSet pilot = residuals(sample, pilot_b0, trim);

  std::vector<double> masked;
  masked.reserve(pilot.n_trimmed_in);
  for (int i = 0; i < sample.n; ++i) {
    if (pilot.trim_mask[i])
      masked.push_back(pilot.residuals[i]);
  }
  out.sigma_hat = robust_scale(masked);

  int in_region = 0;
  for (int i = 0; i < sample.n; ++i)
    in_region += trim.contains(sample.row(i));
  const double p_hat = static_cast<double>(in_region) / n;

  if (out.sigma_hat > 0.0 && p_hat > 0.0) {
    const double curvature =
      3.0 / (8.0 * std::sqrt(3.14159265358979323846) * std::pow(out.sigma_hat, 5));
    out.plan.b1 = rule.c1 * b1_amise_plugin(curvature, k1_constants(), p_hat, n);
    out.plan.b0 =
      rule.c0 * out.x_scale * b0_star(n, sample.d, out.plan.b1 / out.sigma_hat);
    out.plan.source = BandwidthSource::AmisePlugin;
  } else {
    // degenerate residual scale (e.g. noiseless data): fall back to the rate
    // orders on the raw scales
    out.plan.b1 = rule.c1 * std::pow(n, -0.2);
    out.plan.b0 = pilot_b0;
    out.plan.source = BandwidthSource::ClosedForm;
  }
  return out;
}

void run_estimate(const RunConfig& config)
{
  const Sample sample = load_sample(config.input_path);
  TrimRegion trim = config.trim ? *config.trim : default_trim_region(sample);
  trim.validate(sample.d);

  const EstimatePlan resolved =
    resolve_estimate_bandwidths(sample, trim, config.bandwidths);
  const BandwidthPlan& plan = resolved.plan;

  const ResidualSet res = residuals(sample, plan.b0, trim);

  GridSpec grid_spec = config.grid;
  if (grid_spec.automatic) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int i = 0; i < sample.n; ++i) {
      if (!res.trim_mask[i])
        continue;
      lo = first ? res.residuals[i] : std::min(lo, res.residuals[i]);
      hi = first ? res.residuals[i] : std::max(hi, res.residuals[i]);
      first = false;
    }
    grid_spec.min = lo - plan.b1;
    grid_spec.max = hi + plan.b1;
    grid_spec.count = 201;
    grid_spec.automatic = false;
  }
  const std::vector<double> grid = make_grid(grid_spec);
  const DensityEstimate density = two_step_density(res, plan.b1, grid);

  std::ostringstream csv;
  csv << "epsilon,f_hat\n";
  for (std::size_t k = 0; k < density.grid.size(); ++k)
    csv << format_double(density.grid[k]) << "," << format_double(density.values[k])
        << "\n";
  write_text_file(config.output_path + ".csv", csv.str());

  const A11Report a11 = check_a11(plan.b0, plan.b1, sample.n, sample.d);

  ordered_json meta;
  meta["mode"] = "estimate";
  meta["input"] = config.input_path;
  meta["n"] = sample.n;
  meta["d"] = sample.d;
  meta["b0"] = plan.b0;
  meta["b1"] = plan.b1;
  meta["c0"] = plan.c0;
  meta["c1"] = plan.c1;
  meta["bandwidth_source"] = bandwidth_source_name(plan.source);
  if (plan.source != BandwidthSource::Manual) {
    meta["sigma_hat"] = resolved.sigma_hat;
    meta["x_scale"] = resolved.x_scale;
  }
  meta["n_trimmed_in"] = res.n_trimmed_in;
  meta["n_outside_region"] = res.n_outside_region;
  meta["n_loo_failed"] = res.n_loo_failed;
  meta["trim_lower"] = trim.lower;
  meta["trim_upper"] = trim.upper;
  meta["grid"] = { { "min", grid_spec.min },
                   { "max", grid_spec.max },
                   { "count", grid_spec.count } };
  meta["a11"] = { { "n_b0_pow_d_plus_4", a11.n_b0_pow_d_plus_4 },
                  { "n_b0_pow4_b1", a11.n_b0_pow4_b1 },
                  { "n_b0_pow_d_b1_cubed", a11.n_b0_pow_d_b1_cubed },
                  { "clt_growth_exponent", a11.clt_growth_exponent },
                  { "regime", a11_regime_name(a11.regime) } };
  meta["seed"] = config.seed;
  meta["config"] = raw_config_json(config);
  write_text_file(config.output_path + ".meta.json", meta.dump(2) + "\n");
}

std::string report_csv(const ExperimentReport& report)
{
  std::ostringstream csv;
  csv << "n,rep,dropped,b0,b1,n_trimmed_in,region_fraction,ise_feasible,ise_oracle,"
         "sup_gap,sup_oracle_err,f_hat_eps0,f_oracle_eps0,t_standardized,"
         "sup_g_err,sup_m_err\n";
  for (const auto& row : report.rows) {
    csv << row.n << "," << row.rep << "," << (row.dropped ? 1 : 0) << ","
        << format_double(row.b0) << "," << format_double(row.b1) << ","
        << row.n_trimmed_in << "," << format_double(row.region_fraction) << ","
        << format_double(row.ise_feasible) << "," << format_double(row.ise_oracle)
        << "," << format_double(row.sup_gap) << ","
        << format_double(row.sup_oracle_err) << "," << format_double(row.f_hat_eps0)
        << "," << format_double(row.f_oracle_eps0) << ","
        << format_double(row.t_standardized) << "," << format_double(row.sup_g_err)
        << "," << format_double(row.sup_m_err) << "\n";
  }
  return csv.str();
}

void run_experiment(const RunConfig& config)
{
  const TrimRegion* region = config.trim ? &*config.trim : nullptr;
  ExperimentReport report;
  switch (config.mode) {
    case RunMode::Rate:
      report = rate_experiment(config.model, config.n_grid, config.reps,
                               config.bandwidths, config.grid, config.eps0, region);
      break;
    case RunMode::Gap:
      report = gap_experiment(config.model, config.n_grid, config.reps,
                              config.bandwidths, config.grid, config.eps0, region);
      break;
    case RunMode::Normality:
      report = normality_experiment(config.model, config.n, config.reps, config.eps0,
                                    config.bandwidths, config.grid, region);
      break;
    case RunMode::Supnorm:
      report = supnorm_diagnostic(config.model, config.n_grid, config.reps, region);
      break;
    case RunMode::Estimate:
      throw_error(ErrorCode::InvalidArgument, "run_experiment: not an experiment mode");
  }

  write_text_file(config.output_path + ".csv", report_csv(report));

  ordered_json meta;
  meta["mode"] = run_mode_name(config.mode);
  ordered_json summary = ordered_json::object();
  for (const auto& [key, value] : report.summary)
    summary[key] = value;
  meta["summary"] = summary;
  ordered_json echo = ordered_json::object();
  for (const auto& [key, value] : report.config_echo)
    echo[key] = value;
  meta["config_echo"] = echo;
  meta["config"] = raw_config_json(config);
  write_text_file(config.output_path + ".meta.json", meta.dump(2) + "\n");
}

} // namespace

void run(const RunConfig& config)
{
  if (config.mode == RunMode::Estimate)
    run_estimate(config);
  else
    run_experiment(config);
}

} // namespace errdens
