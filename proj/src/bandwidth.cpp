#include "errdens/bandwidth.hpp"

#include "errdens/error.hpp"

#include <cmath>
#include <vector>

namespace errdens {

namespace {

void check_positive(double value, const char* what)
{
  require(value > 0.0 && std::isfinite(value), ErrorCode::InvalidArgument,
          std::string(what) + " must be positive and finite");
}

} // namespace

double rn_risk(double b0, double b1, double n, int d)
{
  check_positive(b0, "b0");
  check_positive(b1, "b1");
  check_positive(n, "n");
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");

  const double b0d = std::pow(b0, d);
  const double b0_4 = b0 * b0 * b0 * b0;
  const double inner = b0_4 + 1.0 / (n * b0d);
  const double a = 1.0 / std::sqrt(n * std::pow(b1, 5)) + std::sqrt(b0d / std::pow(b1, 3));
  const double c = 1.0 / b1 + std::sqrt(b0d / std::pow(b1, 7));
  return b0_4 + a * a * inner * inner + c * c * inner * inner * inner;
}

double amse_b1(double b1, double n)
{
  check_positive(b1, "b1");
  check_positive(n, "n");
  return b1 * b1 * b1 * b1 + 1.0 / (n * b1);
}

double b0_star(double n, int d, double b1, double c0)
{
  check_positive(n, "n");
  require(n >= 2.0, ErrorCode::InvalidArgument, "b0_star: need n >= 2");
  check_positive(b1, "b1");
  check_positive(c0, "c0");
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  const double first = std::pow(1.0 / (n * n * std::pow(b1, 3)), 1.0 / (d + 4));
  const double second = std::pow(1.0 / (n * n * n * std::pow(b1, 7)), 1.0 / (2 * d + 4));
  return c0 * std::max(first, second);
}

double rn_optimal_order(double n, int d, double b1)
{
  check_positive(n, "n");
  check_positive(b1, "b1");
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  const double first = std::pow(1.0 / (n * n * std::pow(b1, 3)), 4.0 / (d + 4));
  const double second = std::pow(1.0 / (n * n * n * std::pow(b1, 7)), 4.0 / (2 * d + 4));
  return std::max(first, second);
}

double b1_star_rate(double n, int d, double c1)
{
  check_positive(n, "n");
  require(n >= 2.0, ErrorCode::InvalidArgument, "b1_star_rate: need n >= 2");
  check_positive(c1, "c1");
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
  if (d <= 2)
    return c1 * std::pow(n, -0.2);
  return c1 * std::pow(n, -3.0 / (2 * d + 11));
}

double b1_amise_plugin(double f2_sq_integral, const KernelConstants& k1,
                       double p_in_region, double n)
{
  require(f2_sq_integral >= 0.0 && std::isfinite(f2_sq_integral),
          ErrorCode::InvalidArgument, "curvature integral must be finite and >= 0");
  require(f2_sq_integral > 0.0, ErrorCode::ZeroCurvature,
          "b1_amise_plugin: flat density, plug-in undefined");
  require(p_in_region > 0.0 && p_in_region <= 1.0, ErrorCode::InvalidArgument,
          "p_in_region must be in (0, 1]");
  check_positive(n, "n");
  const double numerator = k1.squared_integral / p_in_region;
  const double denominator = f2_sq_integral * k1.second_moment * k1.second_moment;
  return std::pow(numerator / denominator, 0.2) * std::pow(n, -0.2);
}

double rn_argmin_numeric(double n, int d, double b1)
{
  check_positive(n, "n");
  require(n >= 2.0, ErrorCode::InvalidArgument, "rn_argmin_numeric: need n >= 2");
  check_positive(b1, "b1");
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");

  const auto scan = [&](double lo, double hi, int points) {
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / (points - 1);
    double best_b0 = lo;
    double best_val = rn_risk(lo, b1, n, d);
    int best_index = 0;
    for (int k = 1; k < points; ++k) {
      const double b0 = std::exp(log_lo + k * step);
      const double val = rn_risk(b0, b1, n, d);
      if (val < best_val) {
        best_val = val;
        best_b0 = b0;
        best_index = k;
      }
    }
    struct Result { double b0; int index; double lo, hi; int points; };
    return Result{ best_b0, best_index, lo, hi, points };
  };

  constexpr int kPoints = 400;
  const double lo = std::pow(n, -1.0 / d) * 1e-2;
  const auto coarse = scan(lo, 1.0, kPoints);

  // one refinement pass around the coarse minimizer
  const double log_lo = std::log(coarse.lo);
  const double step = (std::log(coarse.hi) - log_lo) / (kPoints - 1);
  const double refine_lo = std::exp(log_lo + std::max(0, coarse.index - 1) * step);
  const double refine_hi = std::exp(log_lo + std::min(kPoints - 1, coarse.index + 1) * step);
  if (refine_hi <= refine_lo)
    return coarse.b0;
  return scan(refine_lo, refine_hi, kPoints).b0;
}

A11Report check_a11(double b0, double b1, double n, int d)
{
  check_positive(b0, "b0");
  check_positive(b1, "b1");
  check_positive(n, "n");
  require(d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");

  A11Report report;
  report.n_b0_pow_d_plus_4 = n * std::pow(b0, d + 4);
  report.n_b0_pow4_b1 = n * std::pow(b0, 4) * b1;
  report.n_b0_pow_d_b1_cubed = n * std::pow(b0, d) * b1 * b1 * b1;
  // growth exponent of n b0^d b1^3 when b1 ~ n^{-1/5} and b0 = b0_star(b1);
  // positive means the constraint is eventually satisfied, zero is the d = 2
  // borderline, negative means it fails for this dimension.
  report.clt_growth_exponent = (8.0 - 4.0 * d) / (5.0 * (2.0 * d + 4.0));
  if (report.clt_growth_exponent > 1e-12)
    report.regime = A11Regime::Satisfied;
  else if (report.clt_growth_exponent < -1e-12)
    report.regime = A11Regime::Violated;
  else
    report.regime = A11Regime::Boundary;
  return report;
}

} // namespace errdens
