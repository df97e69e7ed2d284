#pragma once

#include "errdens/sample.hpp"

#include <span>

namespace errdens {

//! Kernel density estimate of the covariate density g at x:
//! (1 / (n b0^d)) sum_i K0((X_i - x) / b0). Returns 0 when no observation
//! falls inside the kernel support.
double g_hat(const Sample& sample, double b0, std::span<const double> x);

//! Nadaraya-Watson regression estimate at x:
//! sum_j Y_j K0((X_j - x) / b0) / sum_j K0((X_j - x) / b0).
//! Throws EmptyNeighborhood when the denominator vanishes.
double nw_estimate(const Sample& sample, double b0, std::span<const double> x);

//! Leave-one-out Nadaraya-Watson estimate at X_i, excluding observation i
//! from both sums. Throws EmptyNeighborhood when no other observation lies
//! within the kernel support.
double nw_loo(const Sample& sample, double b0, int i);

//! Estimated residuals eps_i = Y_i - m_loo(X_i) for every i with X_i inside
//! `trim` and a nonempty leave-one-out neighborhood; all other entries are
//! masked out (the two drop reasons are counted separately).
//! Throws AllTrimmed when the mask ends up empty.
ResidualSet residuals(const Sample& sample, double b0, const TrimRegion& trim);

//! Default inner region: the empirical bounding box of the covariates shrunk
//! by 10% of its width on each side.
TrimRegion default_trim_region(const Sample& sample);

} // namespace errdens
