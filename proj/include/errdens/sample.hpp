#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace errdens {

//! Regression data for the model Y = m(X) + eps: an n x d design matrix
//! (row-major) and the n responses.
struct Sample {
  std::vector<double> x; // row-major, n * d entries
  std::vector<double> y;
  int n = 0;
  int d = 0;

  std::span<const double> row(int i) const
  {
    return { x.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d) };
  }

  //! Throws InvalidArgument unless n >= 2, d >= 1, sizes agree and all
  //! entries are finite.
  void validate() const;
};

//! Axis-aligned inner region of the covariate support; observations outside
//! it are excluded from the second-step kernel sum.
struct TrimRegion {
  std::vector<double> lower;
  std::vector<double> upper;

  bool contains(std::span<const double> point) const
  {
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (point[j] < lower[j] || point[j] > upper[j])
        return false;
    }
    return true;
  }

  int dimension() const { return static_cast<int>(lower.size()); }

  //! Throws InvalidArgument unless lower < upper componentwise and the
  //! dimension matches d.
  void validate(int d) const;
};

//! Estimated residuals with their trimming mask. residuals[i] is finite
//! exactly where trim_mask[i] is true; masked-out entries hold NaN.
struct ResidualSet {
  std::vector<double> residuals;
  std::vector<std::uint8_t> trim_mask;
  double b0 = 0.0;
  int n_trimmed_in = 0;
  // why each masked-out point was dropped, kept separately for diagnostics
  int n_outside_region = 0;
  int n_loo_failed = 0;
};

} // namespace errdens
