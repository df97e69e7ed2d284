#include "errdens/stats.hpp"

#include "errdens/error.hpp"

#include <algorithm>
#include <cmath>

namespace errdens {

double normal_pdf(double x)
{
  return std::exp(-0.5 * x * x) * 0.3989422804014326779;
}

double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double normal_quantile(double p)
{
  require(p > 0.0 && p < 1.0, ErrorCode::InvalidArgument,
          "normal_quantile: p must be strictly inside (0, 1)");
  // Wichura, Algorithm AS 241 (PPND16).
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

namespace {

std::vector<double> finite_sorted(std::span<const double> values)
{
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v))
      out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

double median(std::span<const double> values)
{
  const auto sorted = finite_sorted(values);
  require(!sorted.empty(), ErrorCode::InvalidArgument, "median: no finite values");
  const std::size_t m = sorted.size();
  if (m % 2 == 1)
    return sorted[m / 2];
  return 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
}

double sample_mean(std::span<const double> values)
{
  require(!values.empty(), ErrorCode::InvalidArgument, "sample_mean: empty input");
  double sum = 0.0;
  for (double v : values)
    sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values)
{
  require(values.size() >= 2, ErrorCode::InvalidArgument,
          "sample_variance: need at least two values");
  const double mean = sample_mean(values);
  double ss = 0.0;
  for (double v : values)
    ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

double robust_scale(std::span<const double> values)
{
  const auto sorted = finite_sorted(values);
  if (sorted.size() < 2)
    return 0.0;
  const double m = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double v : sorted)
    mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : sorted)
    ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  const auto quantile = [&](double p) {
    const double idx = p * (m - 1.0);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  const double iqr = (quantile(0.75) - quantile(0.25)) / 1.349;
  if (iqr <= 0.0)
    return sd;
  return std::min(sd, iqr);
}

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y)
{
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "fit_slope: size mismatch");
  require(x.size() >= 2, ErrorCode::InvalidArgument, "fit_slope: need at least two points");
  const double m = static_cast<double>(x.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  require(sxx > 0.0, ErrorCode::InvalidArgument, "fit_slope: degenerate abscissae");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.std_error = std::sqrt(rss / (m - 2.0) / sxx);
  }
  return fit;
}

double ks_distance_to_standard_normal(std::span<const double> values)
{
  const auto sorted = finite_sorted(values);
  require(!sorted.empty(), ErrorCode::InvalidArgument, "ks_distance: no finite values");
  const double m = static_cast<double>(sorted.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    const double hi = (static_cast<double>(i) + 1.0) / m - cdf;
    const double lo = cdf - static_cast<double>(i) / m;
    dist = std::max(dist, std::max(hi, lo));
  }
  return dist;
}

} // namespace errdens
