#include "errdens/montecarlo.hpp"

#include "errdens/errdensity.hpp"
#include "errdens/error.hpp"
#include "errdens/quadrature.hpp"
#include "errdens/regression.hpp"
#include "errdens/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace errdens;

namespace {

ModelSpec base_model()
{
  ModelSpec spec;
  spec.d = 1;
  spec.m_family = MeanFamily::SineProduct;
  spec.g_family = CovariateFamily::UniformBox;
  spec.f_family = ErrorFamily::StdNormal;
  spec.noise_scale = 1.0;
  spec.seed = 42;
  return spec;
}

} // namespace

TEST_CASE("mean families")
{
  ModelSpec spec = base_model();
  const double half[1] = { 0.5 };
  CHECK(mean_function(spec, half) == doctest::Approx(1.0).epsilon(1e-15));
  spec.m_family = MeanFamily::Constant;
  CHECK(mean_function(spec, half) == 1.0);
  spec.m_family = MeanFamily::Linear;
  spec.d = 3;
  const double point[3] = { 0.1, 0.2, 0.3 };
  CHECK(mean_function(spec, point) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("simulate determinism and the noiseless case")
{
  ModelSpec spec = base_model();
  const SimulatedData a = simulate(spec, 100, 3);
  const SimulatedData b = simulate(spec, 100, 3);
  CHECK(a.sample.x == b.sample.x);
  CHECK(a.sample.y == b.sample.y);
  CHECK(a.true_errors == b.true_errors);

  const SimulatedData c = simulate(spec, 100, 4);
  CHECK(a.sample.x != c.sample.x);

  spec.noise_scale = 0.0;
  const SimulatedData quiet = simulate(spec, 50, 0);
  for (int i = 0; i < 50; ++i) {
    CHECK(quiet.true_errors[i] == 0.0);
    CHECK(quiet.sample.y[i] ==
          doctest::Approx(mean_function(spec, quiet.sample.row(i))).epsilon(1e-15));
  }
}

TEST_CASE("error families are centered with unit variance")
{
  ModelSpec spec = base_model();
  const int n = 1000000;
  for (const ErrorFamily family :
       { ErrorFamily::StdNormal, ErrorFamily::MixtureTwoNormals,
         ErrorFamily::ScaledStudentT8 }) {
    spec.f_family = family;
    const SimulatedData data = simulate(spec, n, 0);
    const double mean = sample_mean(data.true_errors);
    const double variance = sample_variance(data.true_errors);
    // mean within 5 standard errors of zero
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(variance == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("error pdfs integrate to one and match their second derivatives")
{
  ModelSpec spec = base_model();
  for (const ErrorFamily family :
       { ErrorFamily::StdNormal, ErrorFamily::MixtureTwoNormals,
         ErrorFamily::ScaledStudentT8 }) {
    spec.f_family = family;
    spec.noise_scale = 1.3;
    const double half = 40.0;
    const double mass =
      simpson([&](double e) { return error_pdf(spec, e); }, -half, half, 1 << 14);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

    // analytic second derivative against central differences of the pdf
    const double step = 1e-4;
    for (const double e : { -2.0, -0.7, 0.0, 0.4, 1.9 }) {
      const double fd = (error_pdf(spec, e + step) - 2.0 * error_pdf(spec, e) +
                         error_pdf(spec, e - step)) /
                        (step * step);
      CHECK(error_pdf_deriv2(spec, e) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("standard normal curvature integral and noise scaling")
{
  ModelSpec spec = base_model();
  const double exact = 3.0 / (8.0 * std::sqrt(3.14159265358979323846));
  CHECK(error_curvature_sq_integral(spec) == doctest::Approx(exact).epsilon(1e-8));

  spec.noise_scale = 2.0;
  CHECK(error_curvature_sq_integral(spec) ==
        doctest::Approx(exact / 32.0).epsilon(1e-8));
}

TEST_CASE("covariate families and region probability")
{
  ModelSpec spec = base_model();
  spec.d = 2;
  const TrimRegion region = model_trim_region(spec);
  CHECK(region.lower == std::vector<double>{ 0.1, 0.1 });
  CHECK(region_probability(spec, region) == doctest::Approx(0.64).epsilon(1e-14));

  spec.g_family = CovariateFamily::TruncatedNormal;
  spec.d = 1;
  const TrimRegion region1 = model_trim_region(spec);
  const double numeric = simpson(
    [&](double u) {
      const double point[1] = { u };
      return covariate_pdf(spec, point);
    },
    region1.lower[0], region1.upper[0], 1 << 12);
  CHECK(region_probability(spec, region1) == doctest::Approx(numeric).epsilon(1e-9));

  // covariates stay inside the unit box
  const SimulatedData data = simulate(spec, 5000, 1);
  for (double v : data.sample.x) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("resolve_bandwidths composes the closed forms")
{
  const ModelSpec spec = base_model();
  const TrimRegion region = model_trim_region(spec);

  BandwidthRule rate_rule;
  rate_rule.mode = BandwidthRule::Mode::AutoRate;
  rate_rule.c1 = 1.5;
  const BandwidthPlan rate_plan = resolve_bandwidths(rate_rule, spec, 1000, region);
  CHECK(rate_plan.b1 == doctest::Approx(b1_star_rate(1000, 1, 1.5)).epsilon(1e-14));
  CHECK(rate_plan.b0 == doctest::Approx(b0_star(1000, 1, rate_plan.b1)).epsilon(1e-14));
  CHECK(rate_plan.source == BandwidthSource::ClosedForm);

  BandwidthRule plugin_rule;
  plugin_rule.mode = BandwidthRule::Mode::AutoPlugin;
  const BandwidthPlan plugin_plan = resolve_bandwidths(plugin_rule, spec, 1000, region);
  const double expected_b1 = b1_amise_plugin(error_curvature_sq_integral(spec),
                                             k1_constants(), 0.8, 1000);
  CHECK(plugin_plan.b1 == doctest::Approx(expected_b1).epsilon(1e-14));
  CHECK(plugin_plan.source == BandwidthSource::AmisePlugin);

  BandwidthRule manual;
  manual.mode = BandwidthRule::Mode::Manual;
  manual.b0 = 0.2;
  manual.b1 = 0.4;
  const BandwidthPlan manual_plan = resolve_bandwidths(manual, spec, 1000, region);
  CHECK(manual_plan.b0 == 0.2);
  CHECK(manual_plan.b1 == 0.4);
}

TEST_CASE("rate and gap experiments share replications and reproduce exactly")
{
  const ModelSpec spec = base_model();
  const std::vector<int> n_grid = { 100, 200, 400, 800 };
  BandwidthRule rule;
  rule.mode = BandwidthRule::Mode::AutoPlugin;

  const ExperimentReport rate = rate_experiment(spec, n_grid, 50, rule);
  const ExperimentReport gap = gap_experiment(spec, n_grid, 50, rule);
  const ExperimentReport rate_again = rate_experiment(spec, n_grid, 50, rule);

  REQUIRE(rate.rows.size() == 200);
  REQUIRE(gap.rows.size() == 200);
  for (std::size_t i = 0; i < rate.rows.size(); ++i) {
    CHECK(rate.rows[i].ise_feasible == gap.rows[i].ise_feasible);
    CHECK(rate.rows[i].sup_gap == gap.rows[i].sup_gap);
    CHECK(rate.rows[i].ise_feasible == rate_again.rows[i].ise_feasible);
    CHECK(rate.rows[i].f_hat_eps0 == rate_again.rows[i].f_hat_eps0);
  }

  CHECK(rate.has_summary("slope_feasible"));
  CHECK(rate.has_summary("median_sup_gap_n100"));
  CHECK(rate.has_summary("median_sqrt_ise_feasible_n800"));
  CHECK(rate.summary_value("dropped_replications") == 0.0);
  CHECK(rate.summary_value("slope_feasible") < 0.0);
  CHECK(rate.summary_value("slope_oracle") < 0.0);

  // the oracle cannot lose to the feasible estimator by more than noise
  CHECK(rate.summary_value("slope_oracle") <=
        rate.summary_value("slope_feasible") + 0.1);
}

TEST_CASE("feasible and oracle estimates coincide when residuals are exact")
{
  // constant mean with zero noise: leave-one-out reproduces m exactly, so
  // the estimated residuals equal the true (zero) errors
  ModelSpec spec = base_model();
  spec.m_family = MeanFamily::Constant;
  spec.noise_scale = 0.0;
  const SimulatedData data = simulate(spec, 200, 0);
  const TrimRegion region = model_trim_region(spec);

  const ResidualSet res = residuals(data.sample, 0.2, region);
  std::vector<std::uint8_t> region_mask(data.sample.n);
  for (int i = 0; i < data.sample.n; ++i)
    region_mask[i] = region.contains(data.sample.row(i)) ? 1 : 0;

  const std::vector<double> grid = { -0.5, -0.1, 0.0, 0.1, 0.5 };
  const DensityEstimate feasible = two_step_density(res, 0.3, grid);
  const DensityEstimate oracle =
    oracle_density(data.true_errors, region_mask, 0.3, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(std::abs(feasible.values[k] - oracle.values[k]) < 1e-12);
}

TEST_CASE("supnorm diagnostic medians decrease along the n grid")
{
  const ModelSpec spec = base_model();
  const std::vector<int> n_grid = { 250, 500, 1000, 4000 };
  const ExperimentReport report = supnorm_diagnostic(spec, n_grid, 50);
  CHECK(report.summary_value("g_err_decreasing") == 1.0);
  CHECK(report.summary_value("m_err_decreasing") == 1.0);
  CHECK(report.summary_value("median_sup_g_err_n4000") <
        report.summary_value("median_sup_g_err_n250"));
  CHECK(report.summary_value("median_sup_m_err_n4000") <
        report.summary_value("median_sup_m_err_n250"));
}

TEST_CASE("normality experiment at reduced scale")
{
  const ModelSpec spec = base_model();
  BandwidthRule rule;
  rule.mode = BandwidthRule::Mode::AutoPlugin;
  const ExperimentReport report = normality_experiment(spec, 500, 300, 0.0, rule);

  CHECK(report.summary_value("dropped_replications") == 0.0);
  // loose sanity bands; the acceptance suite runs the full-size protocol
  CHECK(report.summary_value("ks_distance") < 0.2);
  CHECK(report.summary_value("variance_ratio") > 0.4);
  CHECK(report.summary_value("variance_ratio") < 2.5);
  CHECK(report.summary_value("f_true_eps0") ==
        doctest::Approx(normal_pdf(0.0)).epsilon(1e-12));

  // standardized statistics are centered by construction
  double mean_t = 0.0;
  int counted = 0;
  for (const auto& row : report.rows) {
    if (!row.dropped) {
      mean_t += row.t_standardized;
      ++counted;
    }
  }
  CHECK(std::abs(mean_t / counted) < 1e-10);
}

TEST_CASE("d=3 rate experiment with the closed-form bandwidth orders")
{
  // For d >= 3 the total-risk-optimal b1 scales like n^{-3/(2d+11)}; the
  // AMISE plug-in (an oracle-KDE rule) leaves the first-step noise dominant
  // at this dimension, so the closed-form orders are the right choice here.
  ModelSpec spec = base_model();
  spec.d = 3;
  const std::vector<int> n_grid = { 250, 500, 1000, 2000, 4000 };
  BandwidthRule rule;
  rule.mode = BandwidthRule::Mode::AutoRate;
  const ExperimentReport report = rate_experiment(spec, n_grid, 100, rule);

  const double slope = report.summary_value("slope_feasible");
  CHECK(slope >= -0.45);
  CHECK(slope <= -0.25);
  // internal control: the oracle is an ordinary univariate KDE on the true
  // errors, so its slope stays near -2/5 in every dimension
  const double oracle_slope = report.summary_value("slope_oracle");
  CHECK(oracle_slope >= -0.50);
  CHECK(oracle_slope <= -0.30);
  CHECK(report.summary_value("dropped_replications") == 0.0);
}

TEST_CASE("replication rows are independent of the worker count")
{
  const ModelSpec spec = base_model();
  const std::vector<int> n_grid = { 100, 150, 200, 300 };
  BandwidthRule rule;
  rule.mode = BandwidthRule::Mode::AutoPlugin;

  setenv("ERRDENS_THREADS", "1", 1);
  const ExperimentReport serial = rate_experiment(spec, n_grid, 50, rule);
  setenv("ERRDENS_THREADS", "3", 1);
  const ExperimentReport parallel = rate_experiment(spec, n_grid, 50, rule);
  unsetenv("ERRDENS_THREADS");

  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].ise_feasible == parallel.rows[i].ise_feasible);
    CHECK(serial.rows[i].sup_gap == parallel.rows[i].sup_gap);
    CHECK(serial.rows[i].f_hat_eps0 == parallel.rows[i].f_hat_eps0);
  }
}

TEST_CASE("conditional estimator loses to the two-step estimator already at d=1")
{
  ModelSpec spec = base_model();
  spec.seed = 23;
  const int n = 1500;
  const int reps = 40;
  const TrimRegion region = model_trim_region(spec);
  const GridSpec grid_spec = resolve_grid({}, spec);
  const std::vector<double> grid = make_grid(grid_spec);
  const std::vector<double> x0 = { 0.5 };
  const double h = std::pow(static_cast<double>(n), -1.0 / (spec.d + 5));
  const double b0_inner = std::pow(static_cast<double>(n), -1.0 / (spec.d + 4));

  BandwidthRule rule;
  rule.mode = BandwidthRule::Mode::AutoPlugin;
  const BandwidthPlan plan = resolve_bandwidths(rule, spec, n, region);

  std::vector<double> ise_naive(reps), ise_two_step(reps);
  for (int rep = 0; rep < reps; ++rep) {
    const SimulatedData data = simulate(spec, n, rep);
    const auto f_true = [&](double e) { return error_pdf(spec, e); };
    ise_naive[rep] =
      ise(naive_conditional_density(data.sample, b0_inner, h, h, x0, grid), f_true);
    const ResidualSet res = residuals(data.sample, plan.b0, region);
    ise_two_step[rep] = ise(two_step_density(res, plan.b1, grid), f_true);
  }
  CHECK(std::sqrt(median(ise_naive)) > std::sqrt(median(ise_two_step)));
}

TEST_CASE("experiment validation errors")
{
  const ModelSpec spec = base_model();
  BandwidthRule rule;
  const std::vector<int> empty;
  CHECK_THROWS_AS(rate_experiment(spec, empty, 50, rule), Error);
  const std::vector<int> too_short = { 100, 200 };
  CHECK_THROWS_AS(rate_experiment(spec, too_short, 50, rule), Error);
  const std::vector<int> n_grid = { 100, 200, 400, 800 };
  CHECK_THROWS_AS(rate_experiment(spec, n_grid, 10, rule), Error);
  CHECK_THROWS_AS(normality_experiment(spec, 400, 100, 0.0, rule), Error);

  ModelSpec quiet = spec;
  quiet.noise_scale = 0.0;
  CHECK_THROWS_AS(resolve_bandwidths(rule, quiet, 100, model_trim_region(quiet)), Error);
}
