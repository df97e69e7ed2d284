#pragma once

#include <span>

namespace errdens {

//! The two kernel families used by the estimators.
//!
//! Epanechnikov01 is the product Epanechnikov kernel rescaled so each factor
//! has support [-1/2, 1/2] and unit integral: k0(u) = (3/2)(1 - 4u^2).
//! It smooths the covariates (K0).
//!
//! QuarticSmooth is k1(v) = (315/256)(1 - v^2)^4 on [-1, 1]. The fourth power
//! makes k1 three times continuously differentiable on all of R (derivatives
//! up to order three vanish at +-1), which the residual-based expansion of the
//! two-step estimator needs. It smooths the residuals (K1).
enum class KernelFamily {
  Epanechnikov01,
  QuarticSmooth,
};

struct KernelSpec {
  KernelFamily family = KernelFamily::QuarticSmooth;
  int dimension = 1;
  double support_halfwidth = 1.0;

  //! Product covariate kernel of dimension d.
  static KernelSpec k0(int d);
  //! Univariate residual kernel.
  static KernelSpec k1();
};

//! Moment constants of a kernel, computed by quadrature in
//! compute_constants(). For product kernels, `integral` and
//! `squared_integral` are over the d-dimensional support while
//! `first_moment` and `second_moment` are per coordinate.
struct KernelConstants {
  double integral = 0.0;
  double first_moment = 0.0;
  double second_moment = 0.0;
  double squared_integral = 0.0;
};

//! One factor of K0: (3/2)(1 - 4u^2) on [-1/2, 1/2], 0 outside.
double eval_k0_factor(double u);

//! Product kernel K0(z) = prod_j k0(z_j); the dimension is z.size().
double eval_k0(std::span<const double> z);

//! As above but validated against spec.dimension.
double eval_k0(std::span<const double> z, const KernelSpec& spec);

//! K1 and its analytic derivatives; order in {0, 1, 2, 3}.
//! All orders evaluate to exactly 0 for |v| >= 1.
double eval_k1(double v, int order = 0);

//! Kernel moments via composite Simpson quadrature (2048 panels per axis;
//! product structure is used for d > 1, so the cost stays one-dimensional).
KernelConstants compute_constants(const KernelSpec& spec);

//! Cached constants of K1 (quadrature values; exact ones are 1, 0, 1/11,
//! and 315^2 * (8!)^2 * 2 / 17!).
const KernelConstants& k1_constants();

} // namespace errdens
