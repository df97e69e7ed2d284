#include "errdens/regression.hpp"

#include "errdens/error.hpp"
#include "errdens/kernels.hpp"

#include <cmath>
#include <limits>

namespace errdens {

void Sample::validate() const
{
  require(d >= 1, ErrorCode::InvalidArgument, "Sample: dimension must be >= 1");
  require(n >= 1, ErrorCode::InvalidArgument, "Sample: need at least one observation");
  require(x.size() == static_cast<std::size_t>(n) * d, ErrorCode::InvalidArgument,
          "Sample: x size does not match n * d");
  require(y.size() == static_cast<std::size_t>(n), ErrorCode::InvalidArgument,
          "Sample: y size does not match n");
  for (double v : x)
    require(std::isfinite(v), ErrorCode::InvalidArgument, "Sample: non-finite covariate");
  for (double v : y)
    require(std::isfinite(v), ErrorCode::InvalidArgument, "Sample: non-finite response");
}

void TrimRegion::validate(int d) const
{
  require(static_cast<int>(lower.size()) == d && static_cast<int>(upper.size()) == d,
          ErrorCode::DimensionMismatch, "TrimRegion: bounds dimension mismatch");
  for (int j = 0; j < d; ++j)
    require(lower[j] < upper[j], ErrorCode::InvalidArgument,
            "TrimRegion: lower bound must be strictly below upper bound");
}

namespace {

// One K0 weight, with the scratch buffer pattern avoided: the product is
// accumulated coordinate by coordinate and short-circuits at zero.
inline double k0_weight(const Sample& sample, int i, std::span<const double> x, double b0)
{
  const double* row = sample.x.data() + static_cast<std::size_t>(i) * sample.d;
  double w = 1.0;
  for (int j = 0; j < sample.d; ++j) {
    w *= eval_k0_factor((row[j] - x[j]) / b0);
    if (w == 0.0)
      return 0.0;
  }
  return w;
}

inline void check_b0(double b0) {
  require(b0 > 0.0 && std::isfinite(b0), ErrorCode::InvalidArgument,
          "bandwidth b0 must be positive and finite");
}

struct LooResult {
  double value = 0.0;
  bool ok = false;
};

// Shared by nw_loo and residuals; summation order over j is fixed so results
// do not depend on how callers schedule the i loop.
LooResult nw_loo_impl(const Sample& sample, double b0, int i)
{
  const auto xi = sample.row(i);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < sample.n; ++j) {
    if (j == i)
      continue;
    const double w = k0_weight(sample, j, xi, b0);
    num += sample.y[j] * w;
    den += w;
  }
  if (den == 0.0)
    return {};
  return { num / den, true };
}

} // namespace

double g_hat(const Sample& sample, double b0, std::span<const double> x)
{
  sample.validate();
  check_b0(b0);
  require(static_cast<int>(x.size()) == sample.d, ErrorCode::DimensionMismatch,
          "g_hat: point dimension does not match the sample");
  double sum = 0.0;
  for (int i = 0; i < sample.n; ++i)
    sum += k0_weight(sample, i, x, b0);
  return sum / (sample.n * std::pow(b0, sample.d));
}

double nw_estimate(const Sample& sample, double b0, std::span<const double> x)
{
  sample.validate();
  check_b0(b0);
  require(static_cast<int>(x.size()) == sample.d, ErrorCode::DimensionMismatch,
          "nw_estimate: point dimension does not match the sample");
  double num = 0.0, den = 0.0;
  for (int j = 0; j < sample.n; ++j) {
    const double w = k0_weight(sample, j, x, b0);
    num += sample.y[j] * w;
    den += w;
  }
  require(den != 0.0, ErrorCode::EmptyNeighborhood,
          "nw_estimate: no observation within the kernel support at x");
  return num / den;
}

double nw_loo(const Sample& sample, double b0, int i)
{
  sample.validate();
  check_b0(b0);
  require(sample.n >= 2, ErrorCode::InvalidArgument, "nw_loo: need at least two observations");
  require(i >= 0 && i < sample.n, ErrorCode::InvalidArgument, "nw_loo: index out of range");
  const auto result = nw_loo_impl(sample, b0, i);
  require(result.ok, ErrorCode::EmptyNeighborhood,
          "nw_loo: no other observation within the kernel support at X_i");
  return result.value;
}

ResidualSet residuals(const Sample& sample, double b0, const TrimRegion& trim)
{
  sample.validate();
  check_b0(b0);
  require(sample.n >= 2, ErrorCode::InvalidArgument,
          "residuals: need at least two observations");
  trim.validate(sample.d);

  ResidualSet out;
  out.b0 = b0;
  out.residuals.assign(sample.n, std::numeric_limits<double>::quiet_NaN());
  out.trim_mask.assign(sample.n, 0);

  for (int i = 0; i < sample.n; ++i) {
    if (!trim.contains(sample.row(i))) {
      ++out.n_outside_region;
      continue;
    }
    const auto loo = nw_loo_impl(sample, b0, i);
    if (!loo.ok) {
      ++out.n_loo_failed;
      continue;
    }
    out.residuals[i] = sample.y[i] - loo.value;
    out.trim_mask[i] = 1;
    ++out.n_trimmed_in;
  }

  require(out.n_trimmed_in > 0, ErrorCode::AllTrimmed,
          "residuals: every observation was trimmed out");
  return out;
}

TrimRegion default_trim_region(const Sample& sample)
{
  sample.validate();
  TrimRegion region;
  region.lower.resize(sample.d);
  region.upper.resize(sample.d);
  for (int j = 0; j < sample.d; ++j) {
    double lo = sample.x[j], hi = sample.x[j];
    for (int i = 1; i < sample.n; ++i) {
      const double v = sample.x[static_cast<std::size_t>(i) * sample.d + j];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double width = hi - lo;
    if (width <= 0.0)
      width = std::max(std::abs(lo), 1.0); // degenerate column; keep a usable box
    region.lower[j] = lo + 0.1 * width;
    region.upper[j] = hi - 0.1 * width;
    if (region.lower[j] >= region.upper[j]) {
      const double mid = 0.5 * (lo + hi);
      region.lower[j] = mid - 0.05 * width;
      region.upper[j] = mid + 0.05 * width;
    }
  }
  return region;
}

} // namespace errdens
