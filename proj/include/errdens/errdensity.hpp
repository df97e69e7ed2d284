#pragma once

#include "errdens/sample.hpp"

#include <functional>
#include <span>
#include <vector>

namespace errdens {

enum class DensityKind {
  Feasible,         // two-step estimate built on estimated residuals
  Oracle,           // same kernel sum on the (unobservable) true errors
  NaiveConditional, // conditional estimate f(eps | x) with m_hat plugged in
};

//! A density curve evaluated on a strictly increasing grid.
struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  double b1 = 0.0;
  DensityKind kind = DensityKind::Feasible;
  int n_effective = 0; // observations contributing to the kernel sum
};

//! Two-step estimator: at each grid point e,
//!   f_hat(e) = (1 / (b1 M)) sum_{i in mask} K1((eps_hat_i - e) / b1),
//! where M is the number of trimmed-in observations.
//! Throws NoTrimmedObservations when M = 0.
DensityEstimate two_step_density(const ResidualSet& res, double b1,
                                 std::span<const double> grid);

//! Oracle variant of two_step_density with the true errors substituted for
//! the estimated residuals (only available in simulations).
DensityEstimate oracle_density(std::span<const double> true_errors,
                               std::span<const std::uint8_t> trim_mask, double b1,
                               std::span<const double> grid);

//! Conditional estimator of f(eps | x) with the regression estimate plugged
//! in: at each grid point e,
//!   sum_i K0((X_i - x)/h0) K1((Y_i - m_hat(x) - e)/h1) / (h1 sum_i K0((X_i - x)/h0)),
//! where m_hat uses bandwidth b0. Exposes the dimension penalty the two-step
//! estimator is built to avoid. Throws EmptyNeighborhood when the K0 sum at
//! x vanishes.
DensityEstimate naive_conditional_density(const Sample& sample, double b0, double h0,
                                          double h1, std::span<const double> x,
                                          std::span<const double> grid);

//! Integrated squared error of the estimate against a reference density,
//! by the trapezoid rule over the estimate's grid (needs >= 2 points).
double ise(const DensityEstimate& est, const std::function<double(double)>& f_true);

} // namespace errdens
