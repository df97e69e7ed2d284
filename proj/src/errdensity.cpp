#include "errdens/errdensity.hpp"

#include "errdens/error.hpp"
#include "errdens/kernels.hpp"
#include "errdens/regression.hpp"

#include <cmath>

namespace errdens {

namespace {

void check_grid(std::span<const double> grid)
{
  require(!grid.empty(), ErrorCode::InvalidArgument, "density grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    require(std::isfinite(grid[k]), ErrorCode::InvalidArgument,
            "density grid has a non-finite point");
    if (k > 0)
      require(grid[k] > grid[k - 1], ErrorCode::InvalidArgument,
              "density grid must be strictly increasing");
  }
}

void check_b1(double b1)
{
  require(b1 > 0.0 && std::isfinite(b1), ErrorCode::InvalidArgument,
          "bandwidth b1 must be positive and finite");
}

// Kernel sum over the masked points; shared by the feasible and oracle
// estimators, which differ only in which errors they see.
DensityEstimate masked_kde(std::span<const double> errors,
                           std::span<const std::uint8_t> mask, double b1,
                           std::span<const double> grid, DensityKind kind)
{
  check_b1(b1);
  check_grid(grid);
  require(errors.size() == mask.size(), ErrorCode::InvalidArgument,
          "masked density: errors and mask sizes differ");

  int m = 0;
  for (std::uint8_t in : mask)
    m += in != 0;
  require(m > 0, ErrorCode::NoTrimmedObservations,
          "density: no trimmed-in observations to smooth");

  DensityEstimate est;
  est.grid.assign(grid.begin(), grid.end());
  est.values.assign(grid.size(), 0.0);
  est.b1 = b1;
  est.kind = kind;
  est.n_effective = m;

  const double scale = 1.0 / (b1 * m);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double e = grid[k];
    double sum = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (!mask[i])
        continue;
      sum += eval_k1((errors[i] - e) / b1, 0);
    }
    est.values[k] = sum * scale;
  }
  return est;
}

} // namespace

DensityEstimate two_step_density(const ResidualSet& res, double b1,
                                 std::span<const double> grid)
{
  return masked_kde(res.residuals, res.trim_mask, b1, grid, DensityKind::Feasible);
}

DensityEstimate oracle_density(std::span<const double> true_errors,
                               std::span<const std::uint8_t> trim_mask, double b1,
                               std::span<const double> grid)
{
  return masked_kde(true_errors, trim_mask, b1, grid, DensityKind::Oracle);
}

DensityEstimate naive_conditional_density(const Sample& sample, double b0, double h0,
                                          double h1, std::span<const double> x,
                                          std::span<const double> grid)
{
  sample.validate();
  require(h0 > 0.0 && std::isfinite(h0), ErrorCode::InvalidArgument,
          "bandwidth h0 must be positive and finite");
  check_b1(h1);
  check_grid(grid);
  require(static_cast<int>(x.size()) == sample.d, ErrorCode::DimensionMismatch,
          "naive_conditional_density: point dimension does not match the sample");

  const double m_hat = nw_estimate(sample, b0, x); // throws EmptyNeighborhood

  std::vector<double> w(sample.n);
  double den = 0.0;
  int effective = 0;
  for (int i = 0; i < sample.n; ++i) {
    double wi = 1.0;
    const double* row = sample.x.data() + static_cast<std::size_t>(i) * sample.d;
    for (int j = 0; j < sample.d; ++j) {
      wi *= eval_k0_factor((row[j] - x[j]) / h0);
      if (wi == 0.0)
        break;
    }
    w[i] = wi;
    den += wi;
    effective += wi != 0.0;
  }
  require(den != 0.0, ErrorCode::EmptyNeighborhood,
          "naive_conditional_density: no observation within the K0 support at x");

  DensityEstimate est;
  est.grid.assign(grid.begin(), grid.end());
  est.values.assign(grid.size(), 0.0);
  est.b1 = h1;
  est.kind = DensityKind::NaiveConditional;
  est.n_effective = effective;

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double e = grid[k];
    double num = 0.0;
    for (int i = 0; i < sample.n; ++i) {
      if (w[i] == 0.0)
        continue;
      num += w[i] * eval_k1((sample.y[i] - m_hat - e) / h1, 0);
    }
    est.values[k] = num / (h1 * den);
  }
  return est;
}

double ise(const DensityEstimate& est, const std::function<double(double)>& f_true)
{
  require(est.grid.size() >= 2, ErrorCode::InvalidArgument,
          "ise: need a grid with at least two points");
  double total = 0.0;
  double prev_sq = 0.0;
  for (std::size_t k = 0; k < est.grid.size(); ++k) {
    const double diff = est.values[k] - f_true(est.grid[k]);
    const double sq = diff * diff;
    if (k > 0)
      total += 0.5 * (est.grid[k] - est.grid[k - 1]) * (sq + prev_sq);
    prev_sq = sq;
  }
  return total;
}

} // namespace errdens
