#include "errdens/montecarlo.hpp"

#include "errdens/csv.hpp"
#include "errdens/errdensity.hpp"
#include "errdens/error.hpp"
#include "errdens/kernels.hpp"
#include "errdens/parallel.hpp"
#include "errdens/quadrature.hpp"
#include "errdens/regression.hpp"
#include "errdens/rng.hpp"
#include "errdens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace errdens {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Truncated-normal covariate parameters (per coordinate, on [0, 1]).
constexpr double kTnMean = 0.5;
constexpr double kTnSd = 0.2;

// Mixture components, rescaled so the base error variance is exactly 1
// (mu^2 + sd^2 = 1 for the raw +-1, 0.5 mixture; divide both by sqrt(1.25)).
const double kMixMu = 1.0 / std::sqrt(1.25);
const double kMixSd = 0.5 / std::sqrt(1.25);

// Student t(8) scaled to unit variance: Var t_nu = nu / (nu - 2) = 4/3.
const double kT8Scale = std::sqrt(3.0) / 2.0;
const double kT8Norm = 105.0 / (192.0 * std::sqrt(2.0)); // Gamma(9/2)/(Gamma(4) sqrt(8 pi))

double model_check(const ModelSpec& spec)
{
  require(spec.d >= 1, ErrorCode::InvalidArgument, "ModelSpec: d must be >= 1");
  require(spec.noise_scale >= 0.0 && std::isfinite(spec.noise_scale),
          ErrorCode::InvalidArgument, "ModelSpec: noise_scale must be finite and >= 0");
  return spec.noise_scale;
}

// base (noise_scale = 1) error densities ---------------------------------

double base_pdf(ErrorFamily family, double e)
{
  switch (family) {
    case ErrorFamily::StdNormal:
      return normal_pdf(e);
    case ErrorFamily::MixtureTwoNormals: {
      const double a = (e + kMixMu) / kMixSd;
      const double b = (e - kMixMu) / kMixSd;
      return 0.5 * (normal_pdf(a) + normal_pdf(b)) / kMixSd;
    }
    case ErrorFamily::ScaledStudentT8: {
      const double x = e / kT8Scale;
      return kT8Norm * std::pow(1.0 + x * x / 8.0, -4.5) / kT8Scale;
    }
  }
  return 0.0;
}

double base_pdf_deriv2(ErrorFamily family, double e)
{
  const auto gauss_d2 = [](double u) { return normal_pdf(u) * (u * u - 1.0); };
  switch (family) {
    case ErrorFamily::StdNormal:
      return gauss_d2(e);
    case ErrorFamily::MixtureTwoNormals: {
      const double a = (e + kMixMu) / kMixSd;
      const double b = (e - kMixMu) / kMixSd;
      const double s3 = kMixSd * kMixSd * kMixSd;
      return 0.5 * (gauss_d2(a) + gauss_d2(b)) / s3;
    }
    case ErrorFamily::ScaledStudentT8: {
      const double x = e / kT8Scale;
      const double base = 1.0 + x * x / 8.0;
      const double d2 = -1.125 * kT8Norm * std::pow(base, -6.5) * (1.0 - 1.25 * x * x);
      return d2 / (kT8Scale * kT8Scale * kT8Scale);
    }
  }
  return 0.0;
}

double base_half_range(ErrorFamily family)
{
  switch (family) {
    case ErrorFamily::StdNormal: return 4.5;
    case ErrorFamily::MixtureTwoNormals: return 3.5;
    case ErrorFamily::ScaledStudentT8: return 6.0;
  }
  return 4.5;
}

double base_curvature_sq_integral(ErrorFamily family)
{
  // int (f'')^2; the integrands are smooth and effectively compactly
  // supported, so one wide Simpson pass is exact to far beyond what the
  // plug-in rule needs.
  static const double cached[3] = {
    simpson([](double e) { const double v = base_pdf_deriv2(ErrorFamily::StdNormal, e);
                           return v * v; }, -14.0, 14.0, 1 << 15),
    simpson([](double e) { const double v = base_pdf_deriv2(ErrorFamily::MixtureTwoNormals, e);
                           return v * v; }, -10.0, 10.0, 1 << 15),
    simpson([](double e) { const double v = base_pdf_deriv2(ErrorFamily::ScaledStudentT8, e);
                           return v * v; }, -80.0, 80.0, 1 << 17),
  };
  switch (family) {
    case ErrorFamily::StdNormal: return cached[0];
    case ErrorFamily::MixtureTwoNormals: return cached[1];
    case ErrorFamily::ScaledStudentT8: return cached[2];
  }
  return cached[0];
}

double base_draw(ErrorFamily family, Rng& rng)
{
  switch (family) {
    case ErrorFamily::StdNormal:
      return rng.normal();
    case ErrorFamily::MixtureTwoNormals: {
      const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      return sign * kMixMu + kMixSd * rng.normal();
    }
    case ErrorFamily::ScaledStudentT8: {
      const double z = rng.normal();
      double chi = 0.0;
      for (int k = 0; k < 8; ++k) {
        const double w = rng.normal();
        chi += w * w;
      }
      return kT8Scale * z / std::sqrt(chi / 8.0);
    }
  }
  return 0.0;
}

double draw_covariate(CovariateFamily family, Rng& rng)
{
  switch (family) {
    case CovariateFamily::UniformBox:
      return rng.uniform01();
    case CovariateFamily::TruncatedNormal: {
      static const double lo = normal_cdf((0.0 - kTnMean) / kTnSd);
      static const double hi = normal_cdf((1.0 - kTnMean) / kTnSd);
      const double u = lo + (hi - lo) * rng.uniform01();
      return kTnMean + kTnSd * normal_quantile(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
    }
  }
  return 0.0;
}

std::string int_key(const std::string& prefix, int n)
{
  std::ostringstream os;
  os << prefix << n;
  return os.str();
}

} // namespace

double mean_function(const ModelSpec& spec, std::span<const double> x)
{
  require(static_cast<int>(x.size()) == spec.d, ErrorCode::DimensionMismatch,
          "mean_function: point dimension mismatch");
  switch (spec.m_family) {
    case MeanFamily::Constant:
      return 1.0;
    case MeanFamily::Linear: {
      double s = 0.0;
      for (double xj : x)
        s += xj;
      return s;
    }
    case MeanFamily::SineProduct: {
      double p = 1.0;
      for (double xj : x)
        p *= std::sin(3.14159265358979323846 * xj);
      return p;
    }
  }
  return 0.0;
}

double covariate_pdf(const ModelSpec& spec, std::span<const double> x)
{
  require(static_cast<int>(x.size()) == spec.d, ErrorCode::DimensionMismatch,
          "covariate_pdf: point dimension mismatch");
  double density = 1.0;
  for (double xj : x) {
    if (xj < 0.0 || xj > 1.0)
      return 0.0;
    if (spec.g_family == CovariateFamily::TruncatedNormal) {
      static const double z =
        normal_cdf((1.0 - kTnMean) / kTnSd) - normal_cdf((0.0 - kTnMean) / kTnSd);
      density *= normal_pdf((xj - kTnMean) / kTnSd) / (kTnSd * z);
    }
  }
  return density;
}

TrimRegion model_trim_region(const ModelSpec& spec)
{
  model_check(spec);
  TrimRegion region;
  region.lower.assign(spec.d, 0.1);
  region.upper.assign(spec.d, 0.9);
  return region;
}

double region_probability(const ModelSpec& spec, const TrimRegion& region)
{
  region.validate(spec.d);
  double p = 1.0;
  for (int j = 0; j < spec.d; ++j) {
    const double lo = std::max(region.lower[j], 0.0);
    const double hi = std::min(region.upper[j], 1.0);
    if (hi <= lo)
      return 0.0;
    if (spec.g_family == CovariateFamily::UniformBox) {
      p *= hi - lo;
    } else {
      const double z =
        normal_cdf((1.0 - kTnMean) / kTnSd) - normal_cdf((0.0 - kTnMean) / kTnSd);
      p *= (normal_cdf((hi - kTnMean) / kTnSd) - normal_cdf((lo - kTnMean) / kTnSd)) / z;
    }
  }
  return p;
}

double error_pdf(const ModelSpec& spec, double e)
{
  const double s = model_check(spec);
  require(s > 0.0, ErrorCode::InvalidArgument, "error_pdf: noise_scale must be > 0");
  return base_pdf(spec.f_family, e / s) / s;
}

double error_pdf_deriv2(const ModelSpec& spec, double e)
{
  const double s = model_check(spec);
  require(s > 0.0, ErrorCode::InvalidArgument, "error_pdf_deriv2: noise_scale must be > 0");
  return base_pdf_deriv2(spec.f_family, e / s) / (s * s * s);
}

double error_curvature_sq_integral(const ModelSpec& spec)
{
  const double s = model_check(spec);
  require(s > 0.0, ErrorCode::InvalidArgument,
          "error_curvature_sq_integral: noise_scale must be > 0");
  return base_curvature_sq_integral(spec.f_family) / std::pow(s, 5);
}

double error_half_range(const ModelSpec& spec)
{
  const double s = model_check(spec);
  return base_half_range(spec.f_family) * (s > 0.0 ? s : 1.0);
}

SimulatedData simulate(const ModelSpec& spec, int n, std::uint64_t replication)
{
  model_check(spec);
  require(n >= 2, ErrorCode::InvalidArgument, "simulate: need n >= 2");

  Rng rng(derive_stream(spec.seed, static_cast<std::uint64_t>(n), replication));

  SimulatedData data;
  data.sample.n = n;
  data.sample.d = spec.d;
  data.sample.x.resize(static_cast<std::size_t>(n) * spec.d);
  data.sample.y.resize(n);
  data.true_errors.resize(n);

  std::vector<double> point(spec.d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.d; ++j) {
      point[j] = draw_covariate(spec.g_family, rng);
      data.sample.x[static_cast<std::size_t>(i) * spec.d + j] = point[j];
    }
    const double eps = spec.noise_scale * base_draw(spec.f_family, rng);
    data.true_errors[i] = eps;
    data.sample.y[i] = mean_function(spec, point) + eps;
  }
  return data;
}

BandwidthPlan resolve_bandwidths(const BandwidthRule& rule, const ModelSpec& spec,
                                 int n, const TrimRegion& region)
{
  require(n >= 2, ErrorCode::InvalidArgument, "resolve_bandwidths: need n >= 2");
  BandwidthPlan plan;
  plan.c0 = rule.c0;
  plan.c1 = rule.c1;
  switch (rule.mode) {
    case BandwidthRule::Mode::Manual:
      require(rule.b0 > 0.0 && rule.b1 > 0.0, ErrorCode::InvalidArgument,
              "manual bandwidths must be positive");
      plan.b0 = rule.b0;
      plan.b1 = rule.b1;
      plan.source = BandwidthSource::Manual;
      return plan;
    case BandwidthRule::Mode::AutoRate:
      plan.b1 = b1_star_rate(n, spec.d, rule.c1);
      plan.b0 = b0_star(n, spec.d, plan.b1, rule.c0);
      plan.source = BandwidthSource::ClosedForm;
      return plan;
    case BandwidthRule::Mode::AutoPlugin: {
      require(spec.noise_scale > 0.0, ErrorCode::InvalidArgument,
              "plug-in bandwidths need a positive noise_scale");
      const double p = region_probability(spec, region);
      require(p > 0.0, ErrorCode::InvalidArgument,
              "plug-in bandwidths need a region with positive probability");
      const double curvature = error_curvature_sq_integral(spec);
      plan.b1 = rule.c1 * b1_amise_plugin(curvature, k1_constants(), p, n);
      plan.b0 = b0_star(n, spec.d, plan.b1, rule.c0);
      plan.source = BandwidthSource::AmisePlugin;
      return plan;
    }
  }
  throw_error(ErrorCode::InvalidArgument, "resolve_bandwidths: unknown mode");
}

std::vector<double> make_grid(const GridSpec& spec)
{
  require(!spec.automatic, ErrorCode::InvalidArgument,
          "make_grid: grid must be resolved first");
  require(spec.count >= 2, ErrorCode::InvalidArgument, "make_grid: need count >= 2");
  require(spec.min < spec.max, ErrorCode::InvalidArgument, "make_grid: need min < max");
  std::vector<double> grid(spec.count);
  const double step = (spec.max - spec.min) / (spec.count - 1);
  for (int k = 0; k < spec.count; ++k)
    grid[k] = spec.min + k * step;
  grid.back() = spec.max;
  return grid;
}

GridSpec resolve_grid(const GridSpec& spec, const ModelSpec& model)
{
  if (!spec.automatic)
    return spec;
  const double half = error_half_range(model);
  GridSpec resolved;
  resolved.min = -half;
  resolved.max = half;
  resolved.count = 201;
  resolved.automatic = false;
  return resolved;
}

double ExperimentReport::summary_value(const std::string& key) const
{
  for (const auto& [name, value] : summary) {
    if (name == key)
      return value;
  }
  throw_error(ErrorCode::InvalidArgument, "no summary entry named " + key);
}

bool ExperimentReport::has_summary(const std::string& key) const
{
  for (const auto& [name, value] : summary) {
    (void)value;
    if (name == key)
      return true;
  }
  return false;
}

namespace {

struct EngineOptions {
  bool density_metrics = true;
  bool supnorm = false;
};

int lattice_points_per_axis(int d)
{
  switch (d) {
    case 1: return 201;
    case 2: return 29;
    case 3: return 13;
    default: return 7;
  }
}

void supnorm_metrics(const ModelSpec& spec, const SimulatedData& data,
                     const TrimRegion& region, ReplicationRow& row)
{
  const int n = data.sample.n;
  const double b0 = std::pow(static_cast<double>(n), -1.0 / (spec.d + 4));
  const int per_axis = lattice_points_per_axis(spec.d);

  std::vector<double> point(spec.d);
  std::vector<int> index(spec.d, 0);
  double sup_g = 0.0, sup_m = 0.0;
  bool any_m = false;
  for (;;) {
    for (int j = 0; j < spec.d; ++j) {
      point[j] = region.lower[j] +
                 (region.upper[j] - region.lower[j]) * index[j] / (per_axis - 1);
    }
    sup_g = std::max(sup_g, std::abs(g_hat(data.sample, b0, point) -
                                     covariate_pdf(spec, point)));
    try {
      const double m_hat = nw_estimate(data.sample, b0, point);
      sup_m = std::max(sup_m, std::abs(m_hat - mean_function(spec, point)));
      any_m = true;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::EmptyNeighborhood)
        throw;
    }
    int j = 0;
    for (; j < spec.d; ++j) {
      if (++index[j] < per_axis)
        break;
      index[j] = 0;
    }
    if (j == spec.d)
      break;
  }
  row.sup_g_err = sup_g;
  row.sup_m_err = any_m ? sup_m : kNaN;
  row.b0 = b0;
}

ReplicationRow run_replication(const ModelSpec& spec, int n, int rep,
                               const BandwidthRule& rule, const TrimRegion& region,
                               const std::vector<double>& grid, double eps0,
                               const EngineOptions& options)
{
  ReplicationRow row;
  row.n = n;
  row.rep = rep;

  const SimulatedData data = simulate(spec, n, static_cast<std::uint64_t>(rep));

  int in_region = 0;
  std::vector<std::uint8_t> region_mask(n, 0);
  for (int i = 0; i < n; ++i) {
    region_mask[i] = region.contains(data.sample.row(i)) ? 1 : 0;
    in_region += region_mask[i];
  }
  row.region_fraction = static_cast<double>(in_region) / n;

  if (options.supnorm) {
    supnorm_metrics(spec, data, region, row);
    row.ise_feasible = row.ise_oracle = row.sup_gap = row.sup_oracle_err = kNaN;
    row.f_hat_eps0 = row.f_oracle_eps0 = row.t_standardized = kNaN;
    return row;
  }

  const BandwidthPlan plan = resolve_bandwidths(rule, spec, n, region);
  row.b0 = plan.b0;
  row.b1 = plan.b1;
  row.sup_g_err = row.sup_m_err = kNaN;

  try {
    const ResidualSet res = residuals(data.sample, plan.b0, region);
    row.n_trimmed_in = res.n_trimmed_in;

    const DensityEstimate feasible = two_step_density(res, plan.b1, grid);
    const DensityEstimate oracle =
      oracle_density(data.true_errors, region_mask, plan.b1, grid);

    const auto f_true = [&](double e) { return error_pdf(spec, e); };
    row.ise_feasible = ise(feasible, f_true);
    row.ise_oracle = ise(oracle, f_true);

    double sup_gap = 0.0, sup_oracle_err = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      sup_gap = std::max(sup_gap, std::abs(feasible.values[k] - oracle.values[k]));
      sup_oracle_err =
        std::max(sup_oracle_err, std::abs(oracle.values[k] - f_true(grid[k])));
    }
    row.sup_gap = sup_gap;
    row.sup_oracle_err = sup_oracle_err;

    const double eps0_grid[1] = { eps0 };
    row.f_hat_eps0 = two_step_density(res, plan.b1, eps0_grid).values[0];
    row.f_oracle_eps0 =
      oracle_density(data.true_errors, region_mask, plan.b1, eps0_grid).values[0];
    row.t_standardized = kNaN; // filled during summarization
  } catch (const Error& err) {
    if (err.code() != ErrorCode::AllTrimmed &&
        err.code() != ErrorCode::NoTrimmedObservations)
      throw;
    row.dropped = true;
    row.ise_feasible = row.ise_oracle = row.sup_gap = row.sup_oracle_err = kNaN;
    row.f_hat_eps0 = row.f_oracle_eps0 = row.t_standardized = kNaN;
  }
  return row;
}

std::vector<ReplicationRow> run_grid(const ModelSpec& spec, std::span<const int> n_grid,
                                     int reps, const BandwidthRule& rule,
                                     const TrimRegion& region,
                                     const std::vector<double>& grid, double eps0,
                                     const EngineOptions& options)
{
  require(!n_grid.empty(), ErrorCode::InvalidArgument, "experiment: empty n grid");
  require(reps >= 1, ErrorCode::InvalidArgument, "experiment: need reps >= 1");
  for (int n : n_grid)
    require(n >= 2, ErrorCode::InvalidArgument, "experiment: every n must be >= 2");

  std::vector<ReplicationRow> rows(n_grid.size() * static_cast<std::size_t>(reps));
  parallel_for(rows.size(), [&](std::size_t idx) {
    const int ni = static_cast<int>(idx / reps);
    const int rep = static_cast<int>(idx % reps);
    rows[idx] = run_replication(spec, n_grid[ni], rep, rule, region, grid, eps0, options);
  });
  return rows;
}

std::vector<double> collect(const std::vector<ReplicationRow>& rows, int n,
                            double ReplicationRow::* field)
{
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.n == n && !row.dropped)
      out.push_back(row.*field);
  }
  return out;
}

int count_dropped(const std::vector<ReplicationRow>& rows)
{
  int dropped = 0;
  for (const auto& row : rows)
    dropped += row.dropped;
  return dropped;
}

//! Standardizes f_hat(eps0) within each n group: center = Monte Carlo mean,
//! sigma^2 = f(eps0) * int K1^2 / p_hat with the pooled trimmed-in fraction.
void fill_standardized(std::vector<ReplicationRow>& rows, const ModelSpec& spec,
                       std::span<const int> n_grid, double eps0)
{
  const double k1_sq = k1_constants().squared_integral;
  const double f_eps0 = error_pdf(spec, eps0);
  for (int n : n_grid) {
    const auto values = collect(rows, n, &ReplicationRow::f_hat_eps0);
    if (values.size() < 2)
      continue;
    double p_hat = 0.0;
    int m = 0;
    double b1 = 0.0;
    for (const auto& row : rows) {
      if (row.n == n && !row.dropped) {
        p_hat += row.region_fraction;
        b1 = row.b1;
        ++m;
      }
    }
    p_hat /= m;
    if (p_hat <= 0.0)
      continue;
    const double center = sample_mean(values);
    const double sigma = std::sqrt(f_eps0 * k1_sq / p_hat);
    const double scale = std::sqrt(n * b1) / sigma;
    for (auto& row : rows) {
      if (row.n == n && !row.dropped)
        row.t_standardized = scale * (row.f_hat_eps0 - center);
    }
  }
}

void echo_model(std::vector<std::pair<std::string, std::string>>& echo,
                const ModelSpec& spec)
{
  echo.emplace_back("d", std::to_string(spec.d));
  echo.emplace_back("m_family", mean_family_name(spec.m_family));
  echo.emplace_back("g_family", covariate_family_name(spec.g_family));
  echo.emplace_back("f_family", error_family_name(spec.f_family));
  echo.emplace_back("noise_scale", format_double(spec.noise_scale));
  echo.emplace_back("seed", std::to_string(spec.seed));
}

void echo_protocol(std::vector<std::pair<std::string, std::string>>& echo,
                   std::span<const int> n_grid, int reps, double eps0,
                   const BandwidthRule& rule, const TrimRegion& region,
                   const GridSpec& grid)
{
  std::ostringstream ns;
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    ns << (i ? "," : "") << n_grid[i];
  echo.emplace_back("n_grid", ns.str());
  echo.emplace_back("reps", std::to_string(reps));
  echo.emplace_back("eps0", format_double(eps0));
  switch (rule.mode) {
    case BandwidthRule::Mode::AutoPlugin: echo.emplace_back("bandwidths", "auto_plugin"); break;
    case BandwidthRule::Mode::AutoRate: echo.emplace_back("bandwidths", "auto_rate"); break;
    case BandwidthRule::Mode::Manual:
      echo.emplace_back("bandwidths", "manual");
      echo.emplace_back("b0", format_double(rule.b0));
      echo.emplace_back("b1", format_double(rule.b1));
      break;
  }
  echo.emplace_back("c0", format_double(rule.c0));
  echo.emplace_back("c1", format_double(rule.c1));
  std::ostringstream lo, hi;
  for (std::size_t j = 0; j < region.lower.size(); ++j) {
    lo << (j ? "," : "") << format_double(region.lower[j]);
    hi << (j ? "," : "") << format_double(region.upper[j]);
  }
  echo.emplace_back("trim_lower", lo.str());
  echo.emplace_back("trim_upper", hi.str());
  echo.emplace_back("grid_min", format_double(grid.min));
  echo.emplace_back("grid_max", format_double(grid.max));
  echo.emplace_back("grid_count", std::to_string(grid.count));
}

//! Medians and slopes shared by the rate and gap experiments; `gap_first`
//! only changes the summary ordering.
ExperimentReport density_experiment(const ModelSpec& spec, std::span<const int> n_grid,
                                    int reps, const BandwidthRule& bw,
                                    const GridSpec& grid_spec, double eps0,
                                    bool gap_first, const TrimRegion* region_override)
{
  require(n_grid.size() >= 4, ErrorCode::InvalidArgument,
          "rate/gap experiment: need at least four sample sizes for a slope fit");
  require(reps >= 50, ErrorCode::InvalidArgument,
          "rate/gap experiment: need at least 50 replications");
  const TrimRegion region = region_override ? *region_override : model_trim_region(spec);
  region.validate(spec.d);
  const GridSpec resolved_grid = resolve_grid(grid_spec, spec);
  const std::vector<double> grid = make_grid(resolved_grid);

  ExperimentReport report;
  report.rows = run_grid(spec, n_grid, reps, bw, region, grid, eps0, {});
  fill_standardized(report.rows, spec, n_grid, eps0);

  std::vector<double> log_n, log_med_feasible, log_med_oracle;
  std::vector<double> gap_medians;
  for (int n : n_grid) {
    const auto ise_f = collect(report.rows, n, &ReplicationRow::ise_feasible);
    const auto ise_o = collect(report.rows, n, &ReplicationRow::ise_oracle);
    const auto gaps = collect(report.rows, n, &ReplicationRow::sup_gap);
    require(!ise_f.empty(), ErrorCode::InvalidArgument,
            "experiment: every replication was dropped at n=" + std::to_string(n));
    log_n.push_back(std::log(static_cast<double>(n)));
    log_med_feasible.push_back(std::log(std::sqrt(median(ise_f))));
    log_med_oracle.push_back(std::log(std::sqrt(median(ise_o))));
    gap_medians.push_back(median(gaps));
  }

  bool gap_decreasing = true;
  for (std::size_t i = 1; i < gap_medians.size(); ++i)
    gap_decreasing = gap_decreasing && gap_medians[i] < gap_medians[i - 1];
  const auto oracle_err_last =
    collect(report.rows, n_grid.back(), &ReplicationRow::sup_oracle_err);
  const double med_oracle_err_last = median(oracle_err_last);
  const bool gap_below = gap_medians.back() < med_oracle_err_last;

  auto& summary = report.summary;
  const auto add_gap_block = [&] {
    for (std::size_t i = 0; i < gap_medians.size(); ++i)
      summary.emplace_back(int_key("median_sup_gap_n", n_grid[i]), gap_medians[i]);
    summary.emplace_back("gap_strictly_decreasing", gap_decreasing ? 1.0 : 0.0);
    summary.emplace_back("median_sup_oracle_err_largest_n", med_oracle_err_last);
    summary.emplace_back("gap_below_oracle_err_at_largest_n", gap_below ? 1.0 : 0.0);
  };
  const auto add_rate_block = [&] {
    if (n_grid.size() >= 2) {
      const SlopeFit feasible = fit_slope(log_n, log_med_feasible);
      const SlopeFit oracle = fit_slope(log_n, log_med_oracle);
      summary.emplace_back("slope_feasible", feasible.slope);
      summary.emplace_back("slope_feasible_stderr", feasible.std_error);
      summary.emplace_back("slope_oracle", oracle.slope);
      summary.emplace_back("slope_oracle_stderr", oracle.std_error);
    }
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      summary.emplace_back(int_key("median_sqrt_ise_feasible_n", n_grid[i]),
                           std::exp(log_med_feasible[i]));
      summary.emplace_back(int_key("median_sqrt_ise_oracle_n", n_grid[i]),
                           std::exp(log_med_oracle[i]));
    }
  };
  if (gap_first) {
    add_gap_block();
    add_rate_block();
  } else {
    add_rate_block();
    add_gap_block();
  }
  summary.emplace_back("dropped_replications",
                       static_cast<double>(count_dropped(report.rows)));

  report.config_echo.emplace_back("experiment", gap_first ? "gap" : "rate");
  echo_model(report.config_echo, spec);
  echo_protocol(report.config_echo, n_grid, reps, eps0, bw, region, resolved_grid);
  return report;
}

} // namespace

ExperimentReport rate_experiment(const ModelSpec& spec, std::span<const int> n_grid,
                                 int reps, const BandwidthRule& bw,
                                 const GridSpec& grid, double eps0,
                                 const TrimRegion* region)
{
  return density_experiment(spec, n_grid, reps, bw, grid, eps0, false, region);
}

ExperimentReport gap_experiment(const ModelSpec& spec, std::span<const int> n_grid,
                                int reps, const BandwidthRule& bw,
                                const GridSpec& grid, double eps0,
                                const TrimRegion* region)
{
  return density_experiment(spec, n_grid, reps, bw, grid, eps0, true, region);
}

ExperimentReport normality_experiment(const ModelSpec& spec, int n, int reps,
                                      double eps0, const BandwidthRule& bw,
                                      const GridSpec& grid_spec,
                                      const TrimRegion* region_override)
{
  require(reps >= 300, ErrorCode::InvalidArgument,
          "normality_experiment: need at least 300 replications");
  const int n_grid_storage[1] = { n };
  const std::span<const int> n_grid(n_grid_storage, 1);

  const TrimRegion region = region_override ? *region_override : model_trim_region(spec);
  region.validate(spec.d);
  const GridSpec resolved_grid = resolve_grid(grid_spec, spec);
  const std::vector<double> grid = make_grid(resolved_grid);

  ExperimentReport report;
  report.rows = run_grid(spec, n_grid, reps, bw, region, grid, eps0, {});
  fill_standardized(report.rows, spec, n_grid, eps0);

  const auto f_hat = collect(report.rows, n, &ReplicationRow::f_hat_eps0);
  require(f_hat.size() >= 2, ErrorCode::InvalidArgument,
          "normality_experiment: all replications dropped");

  double p_hat = 0.0, b1 = 0.0, b0 = 0.0;
  for (const auto& row : report.rows) {
    if (!row.dropped) {
      p_hat += row.region_fraction;
      b1 = row.b1;
      b0 = row.b0;
    }
  }
  p_hat /= static_cast<double>(f_hat.size());

  const double k1_sq = k1_constants().squared_integral;
  const double f_eps0 = error_pdf(spec, eps0);
  const double sigma_sq = f_eps0 * k1_sq / p_hat;
  const double center = sample_mean(f_hat);

  std::vector<double> scaled(f_hat.size()), t_emp(f_hat.size()), t_theory(f_hat.size());
  const double root_nb1 = std::sqrt(n * b1);
  // theoretical centering: f(eps0) + (b1^2/2) f''(eps0) int v^2 K1
  const double theory_center =
    f_eps0 + 0.5 * b1 * b1 * error_pdf_deriv2(spec, eps0) * k1_constants().second_moment;
  for (std::size_t r = 0; r < f_hat.size(); ++r) {
    scaled[r] = root_nb1 * (f_hat[r] - center);
    t_emp[r] = scaled[r] / std::sqrt(sigma_sq);
    t_theory[r] = root_nb1 * (f_hat[r] - theory_center) / std::sqrt(sigma_sq);
  }

  const double ks = ks_distance_to_standard_normal(t_emp);
  const double ks_theory = ks_distance_to_standard_normal(t_theory);
  const double variance_ratio = sample_variance(scaled) / sigma_sq;

  auto& summary = report.summary;
  summary.emplace_back("ks_distance", ks);
  summary.emplace_back("variance_ratio", variance_ratio);
  summary.emplace_back("ks_distance_theory_centered", ks_theory);
  summary.emplace_back("sigma_sq", sigma_sq);
  summary.emplace_back("p_hat", p_hat);
  summary.emplace_back("b0", b0);
  summary.emplace_back("b1", b1);
  summary.emplace_back("mean_f_hat_eps0", center);
  summary.emplace_back("f_true_eps0", f_eps0);
  summary.emplace_back("theory_center", theory_center);
  const A11Report a11 = check_a11(b0, b1, n, spec.d);
  summary.emplace_back("a11_n_b0_pow_d_plus_4", a11.n_b0_pow_d_plus_4);
  summary.emplace_back("a11_n_b0_pow4_b1", a11.n_b0_pow4_b1);
  summary.emplace_back("a11_n_b0_pow_d_b1_cubed", a11.n_b0_pow_d_b1_cubed);
  summary.emplace_back("a11_regime", a11.regime == A11Regime::Satisfied   ? 0.0
                                     : a11.regime == A11Regime::Boundary ? 1.0
                                                                         : 2.0);
  summary.emplace_back("dropped_replications",
                       static_cast<double>(count_dropped(report.rows)));

  report.config_echo.emplace_back("experiment", "normality");
  echo_model(report.config_echo, spec);
  echo_protocol(report.config_echo, n_grid, reps, eps0, bw, region, resolved_grid);
  return report;
}

ExperimentReport supnorm_diagnostic(const ModelSpec& spec, std::span<const int> n_grid,
                                    int reps, const TrimRegion* region_override)
{
  require(n_grid.size() >= 4, ErrorCode::InvalidArgument,
          "supnorm diagnostic: need at least four sample sizes");
  require(reps >= 50, ErrorCode::InvalidArgument,
          "supnorm diagnostic: need at least 50 replications");
  const TrimRegion region = region_override ? *region_override : model_trim_region(spec);
  region.validate(spec.d);
  EngineOptions options;
  options.density_metrics = false;
  options.supnorm = true;

  ExperimentReport report;
  const std::vector<double> unused_grid = { 0.0, 1.0 };
  report.rows = run_grid(spec, n_grid, reps, {}, region, unused_grid, 0.0, options);

  std::vector<double> g_medians, m_medians;
  for (int n : n_grid) {
    g_medians.push_back(median(collect(report.rows, n, &ReplicationRow::sup_g_err)));
    m_medians.push_back(median(collect(report.rows, n, &ReplicationRow::sup_m_err)));
  }
  bool g_dec = true, m_dec = true;
  for (std::size_t i = 1; i < g_medians.size(); ++i) {
    g_dec = g_dec && g_medians[i] < g_medians[i - 1];
    m_dec = m_dec && m_medians[i] < m_medians[i - 1];
  }

  auto& summary = report.summary;
  for (std::size_t i = 0; i < g_medians.size(); ++i) {
    summary.emplace_back(int_key("median_sup_g_err_n", n_grid[i]), g_medians[i]);
    summary.emplace_back(int_key("median_sup_m_err_n", n_grid[i]), m_medians[i]);
  }
  summary.emplace_back("g_err_decreasing", g_dec ? 1.0 : 0.0);
  summary.emplace_back("m_err_decreasing", m_dec ? 1.0 : 0.0);
  summary.emplace_back("dropped_replications",
                       static_cast<double>(count_dropped(report.rows)));

  report.config_echo.emplace_back("experiment", "supnorm");
  echo_model(report.config_echo, spec);
  std::ostringstream ns;
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    ns << (i ? "," : "") << n_grid[i];
  report.config_echo.emplace_back("n_grid", ns.str());
  report.config_echo.emplace_back("reps", std::to_string(reps));
  return report;
}

const char* mean_family_name(MeanFamily family)
{
  switch (family) {
    case MeanFamily::Constant: return "constant";
    case MeanFamily::Linear: return "linear";
    case MeanFamily::SineProduct: return "sine_product";
  }
  return "unknown";
}

const char* covariate_family_name(CovariateFamily family)
{
  switch (family) {
    case CovariateFamily::UniformBox: return "uniform_box";
    case CovariateFamily::TruncatedNormal: return "truncated_normal";
  }
  return "unknown";
}

const char* error_family_name(ErrorFamily family)
{
  switch (family) {
    case ErrorFamily::StdNormal: return "std_normal";
    case ErrorFamily::MixtureTwoNormals: return "mixture_two_normals";
    case ErrorFamily::ScaledStudentT8: return "scaled_student_t8";
  }
  return "unknown";
}

} // namespace errdens
