#pragma once

#include "errdens/bandwidth.hpp"
#include "errdens/sample.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace errdens {

enum class MeanFamily { Constant, Linear, SineProduct };
enum class CovariateFamily { UniformBox, TruncatedNormal };
enum class ErrorFamily { StdNormal, MixtureTwoNormals, ScaledStudentT8 };

//! A synthetic regression model Y = m(X) + eps on the unit box.
//!
//! Covariates live on [0, 1]^d: UniformBox is i.i.d. uniform per coordinate,
//! TruncatedNormal is N(0.5, 0.2^2) truncated to [0, 1] per coordinate.
//! Error families are centered with finite sixth moments and unit variance
//! before scaling: StdNormal is N(0, 1); MixtureTwoNormals is an equal
//! mixture of N(-1, 0.5^2) and N(1, 0.5^2); ScaledStudentT8 is a Student t
//! with 8 degrees of freedom times sqrt(3)/2.
struct ModelSpec {
  int d = 1;
  MeanFamily m_family = MeanFamily::SineProduct;
  CovariateFamily g_family = CovariateFamily::UniformBox;
  ErrorFamily f_family = ErrorFamily::StdNormal;
  double noise_scale = 1.0;
  std::uint64_t seed = 1;
};

double mean_function(const ModelSpec& spec, std::span<const double> x);
double covariate_pdf(const ModelSpec& spec, std::span<const double> x);

//! The fixed inner region used by the experiments: the known covariate
//! support shrunk by 10% of its width per side.
TrimRegion model_trim_region(const ModelSpec& spec);

//! Exact P(X in region) for the model's covariate family.
double region_probability(const ModelSpec& spec, const TrimRegion& region);

//! Error density, its second derivative, the curvature integral
//! int (f'')^2 (all including noise_scale), and a half-range that carries
//! essentially all of the error mass (used for automatic epsilon grids).
double error_pdf(const ModelSpec& spec, double e);
double error_pdf_deriv2(const ModelSpec& spec, double e);
double error_curvature_sq_integral(const ModelSpec& spec);
double error_half_range(const ModelSpec& spec);

struct SimulatedData {
  Sample sample;
  std::vector<double> true_errors;
};

//! Draws an i.i.d. sample of size n. The stream is derived from
//! (spec.seed, n, replication), so any (n, replication) cell can be
//! regenerated independently of evaluation order.
SimulatedData simulate(const ModelSpec& spec, int n, std::uint64_t replication = 0);

//! How experiments pick (b0, b1) per sample size.
//!
//! AutoPlugin: b1 by the AMISE plug-in with the model's exact curvature
//! integral and region probability, then b0 = b0_star(n, d, b1).
//! AutoRate:   b1 = b1_star_rate(n, d, c1), then b0 = b0_star(n, d, b1, c0).
//! Manual:     the given (b0, b1) at every n.
struct BandwidthRule {
  enum class Mode { AutoPlugin, AutoRate, Manual };
  Mode mode = Mode::AutoPlugin;
  double c0 = 1.0;
  double c1 = 1.0;
  double b0 = 0.0; // Manual only
  double b1 = 0.0; // Manual only
};

BandwidthPlan resolve_bandwidths(const BandwidthRule& rule, const ModelSpec& spec,
                                 int n, const TrimRegion& region);

//! Evaluation grid request; automatic() resolves from the model's error
//! half-range with 201 points.
struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool automatic = true;
};

std::vector<double> make_grid(const GridSpec& spec);
GridSpec resolve_grid(const GridSpec& spec, const ModelSpec& model);

//! One Monte Carlo replication. NaN marks metrics that were not computed
//! (or a dropped replication).
struct ReplicationRow {
  int n = 0;
  int rep = 0;
  bool dropped = false;
  double b0 = 0.0;
  double b1 = 0.0;
  int n_trimmed_in = 0;
  double region_fraction = 0.0;
  double ise_feasible = 0.0;
  double ise_oracle = 0.0;
  double sup_gap = 0.0;         // max over grid |f_hat - f_oracle|
  double sup_oracle_err = 0.0;  // max over grid |f_oracle - f|
  double f_hat_eps0 = 0.0;
  double f_oracle_eps0 = 0.0;
  double t_standardized = 0.0;  // filled during summarization
  double sup_g_err = 0.0;       // supnorm diagnostic only
  double sup_m_err = 0.0;       // supnorm diagnostic only
};

//! Full experiment output: one row per (n, replication), an ordered list of
//! summary scalars, and the resolved configuration (sufficient to reproduce
//! the run bit-for-bit).
struct ExperimentReport {
  std::vector<ReplicationRow> rows;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::pair<std::string, std::string>> config_echo;

  double summary_value(const std::string& key) const;
  bool has_summary(const std::string& key) const;
};

//! Rate experiment: for each n, `reps` replications of
//! simulate -> residuals -> two-step density, recording ISE against the true
//! density for both the feasible and the oracle estimator, plus the
//! feasible/oracle gap. Summary includes log-log slopes of the median
//! root-ISE in n (with standard errors) and the per-n gap medians, so one
//! run serves both the rate and the gap analyses.
ExperimentReport rate_experiment(const ModelSpec& spec, std::span<const int> n_grid,
                                 int reps, const BandwidthRule& bw,
                                 const GridSpec& grid = {}, double eps0 = 0.0,
                                 const TrimRegion* region = nullptr);

//! Same protocol and substreams as rate_experiment; the summary leads with
//! the feasible/oracle gap aggregates (median sup-gap per n, whether the
//! medians decrease across the grid, and the comparison against the oracle's
//! own error at the largest n).
ExperimentReport gap_experiment(const ModelSpec& spec, std::span<const int> n_grid,
                                int reps, const BandwidthRule& bw,
                                const GridSpec& grid = {}, double eps0 = 0.0,
                                const TrimRegion* region = nullptr);

//! Fixed-n experiment for the central limit behavior of the two-step
//! estimator at eps0: standardizes f_hat(eps0) across replications by
//! sqrt(n b1) / sigma with sigma^2 = f(eps0) int K1^2 / P_hat(X in region),
//! centering at the Monte Carlo mean (removes the O(b1^2) bias without
//! estimating f''). Reports the Kolmogorov-Smirnov distance of the
//! standardized sample to N(0, 1), the variance ratio against sigma^2, and
//! a cross-check KS using the theoretical centering
//! f(eps0) + (b1^2/2) f''(eps0) int v^2 K1.
ExperimentReport normality_experiment(const ModelSpec& spec, int n, int reps,
                                      double eps0, const BandwidthRule& bw,
                                      const GridSpec& grid = {},
                                      const TrimRegion* region = nullptr);

//! Sup-norm diagnostic for the first-step estimators: per replication, the
//! maxima over an inner-region lattice of |g_hat - g| and |m_hat - m| with
//! b0 = n^{-1/(d+4)}; the summary records the per-n medians and whether they
//! decrease along the grid.
ExperimentReport supnorm_diagnostic(const ModelSpec& spec, std::span<const int> n_grid,
                                    int reps, const TrimRegion* region = nullptr);

const char* mean_family_name(MeanFamily family);
const char* covariate_family_name(CovariateFamily family);
const char* error_family_name(ErrorFamily family);

} // namespace errdens
