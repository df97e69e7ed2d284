#pragma once

#include <span>
#include <vector>

namespace errdens {

double normal_pdf(double x);
double normal_cdf(double x);

//! Inverse standard normal c.d.f. (Wichura's PPND16; |error| < 1e-15).
double normal_quantile(double p);

//! Median of the finite entries of `values`; NaN entries are skipped.
//! Even counts average the two middle order statistics.
double median(std::span<const double> values);

//! min(standard deviation, IQR/1.349); the usual robust scale for
//! normal-reference bandwidth rules. Returns 0 for degenerate samples.
double robust_scale(std::span<const double> values);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
};

//! Ordinary least squares of y on x (both already transformed by the caller,
//! e.g. to log-log scale).
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y);

//! Kolmogorov-Smirnov distance between the empirical distribution of
//! `values` and the standard normal.
double ks_distance_to_standard_normal(std::span<const double> values);

//! Sample variance (denominator n-1).
double sample_variance(std::span<const double> values);

double sample_mean(std::span<const double> values);

} // namespace errdens
