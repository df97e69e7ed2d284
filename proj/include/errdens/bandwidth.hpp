#pragma once

#include "errdens/kernels.hpp"

namespace errdens {

enum class BandwidthSource {
  ClosedForm,
  NumericMin,
  AmisePlugin,
  Manual,
};

//! A resolved pair of bandwidths. c0 and c1 are the proportionality
//! constants applied to the closed-form rates (the theory fixes orders
//! only; defaults of 1 are a deliberate convention).
struct BandwidthPlan {
  double b0 = 0.0;
  double b1 = 0.0;
  double c0 = 1.0;
  double c1 = 1.0;
  BandwidthSource source = BandwidthSource::Manual;
};

//! First-step risk surrogate
//!   Rn(b0, b1) = b0^4
//!              + [ (n b1^5)^{-1/2} + (b0^d / b1^3)^{1/2} ]^2 (b0^4 + 1/(n b0^d))^2
//!              + [ 1/b1 + (b0^d / b1^7)^{1/2} ]^2 (b0^4 + 1/(n b0^d))^3.
//! It bounds the extra error the density step inherits from estimating the
//! residuals with bandwidth b0.
double rn_risk(double b0, double b1, double n, int d);

//! Pointwise risk of the oracle kernel density step: b1^4 + 1/(n b1).
double amse_b1(double b1, double n);

//! Order of the Rn-minimizing first-step bandwidth:
//!   b0* = c0 * max{ (1/(n^2 b1^3))^{1/(d+4)}, (1/(n^3 b1^7))^{1/(2d+4)} }.
double b0_star(double n, int d, double b1, double c0 = 1.0);

//! Order of Rn at its minimizer b0*:
//!   max{ (1/(n^2 b1^3))^{4/(d+4)}, (1/(n^3 b1^7))^{4/(2d+4)} }.
double rn_optimal_order(double n, int d, double b1);

//! Order of the total-risk-minimizing second-step bandwidth:
//! c1 * n^{-1/5} for d <= 2, c1 * n^{-3/(2d+11)} for d >= 3.
double b1_star_rate(double n, int d, double c1 = 1.0);

//! AMISE-optimal plug-in for b1:
//!   [ (int K1^2 / P(X in X0)) / (int (f'')^2 * (int v^2 K1)^2) ]^{1/5} n^{-1/5}.
//! `f2_sq_integral` is int (f'')^2 for the error density; throws
//! ZeroCurvature when it is zero (flat density, plug-in undefined).
double b1_amise_plugin(double f2_sq_integral, const KernelConstants& k1,
                       double p_in_region, double n);

//! Numeric cross-check of b0_star: minimizes rn_risk over a 400-point log
//! grid on [n^{-1/d} * 1e-2, 1], refined once around the coarse minimizer.
double rn_argmin_numeric(double n, int d, double b1);

enum class A11Regime {
  Satisfied, // n b0^d b1^3 grows under the optimal-rate bandwidths
  Boundary,  // bounded (the d = 2 case under the optimal rates)
  Violated,  // shrinks (d >= 3)
};

//! The three quantities constraining the central-limit regime of the
//! two-step estimator, plus the growth exponent of n b0^d b1^3 under the
//! optimal-rate bandwidths for this d (the binding constraint; it is
//! bounded rather than divergent at d = 2).
struct A11Report {
  double n_b0_pow_d_plus_4 = 0.0; // must stay bounded
  double n_b0_pow4_b1 = 0.0;      // must vanish
  double n_b0_pow_d_b1_cubed = 0.0; // must diverge
  double clt_growth_exponent = 0.0; // (8 - 4d) / (5 (2d + 4))
  A11Regime regime = A11Regime::Satisfied;
};

A11Report check_a11(double b0, double b1, double n, int d);

} // namespace errdens
