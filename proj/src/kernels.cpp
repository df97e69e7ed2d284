#include "errdens/kernels.hpp"

#include "errdens/error.hpp"
#include "errdens/quadrature.hpp"

#include <cmath>

namespace errdens {

namespace {

constexpr double kQuarticNorm = 315.0 / 256.0;
constexpr int kQuadraturePanels = 2048;

double eval_k1_factor(double v, int order)
{
  const double w = 1.0 - v * v;
  if (w <= 0.0)
    return 0.0;
  switch (order) {
    case 0: return kQuarticNorm * w * w * w * w;
    case 1: return -8.0 * kQuarticNorm * v * w * w * w;
    case 2: return -8.0 * kQuarticNorm * w * w * (1.0 - 7.0 * v * v);
    case 3: return 48.0 * kQuarticNorm * v * w * (3.0 - 7.0 * v * v);
    default: break;
  }
  throw_error(ErrorCode::InvalidArgument, "eval_k1: derivative order must be in [0, 3]");
}

double factor(const KernelSpec& spec, double u)
{
  return spec.family == KernelFamily::Epanechnikov01 ? eval_k0_factor(u)
                                                     : eval_k1_factor(u, 0);
}

} // namespace

KernelSpec KernelSpec::k0(int d)
{
  require(d >= 1, ErrorCode::InvalidArgument, "KernelSpec::k0: dimension must be >= 1");
  return { KernelFamily::Epanechnikov01, d, 0.5 };
}

KernelSpec KernelSpec::k1()
{
  return { KernelFamily::QuarticSmooth, 1, 1.0 };
}

double eval_k0_factor(double u)
{
  if (u < -0.5 || u > 0.5)
    return 0.0;
  return 1.5 * (1.0 - 4.0 * u * u);
}

double eval_k0(std::span<const double> z)
{
  double product = 1.0;
  for (double zj : z) {
    product *= eval_k0_factor(zj);
    if (product == 0.0)
      return 0.0;
  }
  return product;
}

double eval_k0(std::span<const double> z, const KernelSpec& spec)
{
  require(spec.family == KernelFamily::Epanechnikov01, ErrorCode::InvalidArgument,
          "eval_k0: spec is not a covariate kernel");
  require(static_cast<int>(z.size()) == spec.dimension, ErrorCode::DimensionMismatch,
          "eval_k0: point dimension does not match the kernel spec");
  return eval_k0(z);
}

double eval_k1(double v, int order)
{
  require(order >= 0 && order <= 3, ErrorCode::InvalidArgument,
          "eval_k1: derivative order must be in [0, 3]");
  return eval_k1_factor(v, order);
}

KernelConstants compute_constants(const KernelSpec& spec)
{
  require(spec.dimension >= 1, ErrorCode::InvalidArgument,
          "compute_constants: dimension must be >= 1");
  const double h = spec.support_halfwidth;
  const auto f = [&](double u) { return factor(spec, u); };

  const double integral_1d = simpson(f, -h, h, kQuadraturePanels);
  const double first_1d = simpson([&](double u) { return u * f(u); }, -h, h, kQuadraturePanels);
  const double second_1d = simpson([&](double u) { return u * u * f(u); }, -h, h, kQuadraturePanels);
  const double squared_1d = simpson([&](double u) { return f(u) * f(u); }, -h, h, kQuadraturePanels);

  KernelConstants c;
  c.integral = std::pow(integral_1d, spec.dimension);
  // per-coordinate moments; the remaining factors integrate to integral_1d each
  const double rest = std::pow(integral_1d, spec.dimension - 1);
  c.first_moment = first_1d * rest;
  c.second_moment = second_1d * rest;
  c.squared_integral = std::pow(squared_1d, spec.dimension);
  return c;
}

const KernelConstants& k1_constants()
{
  static const KernelConstants constants = compute_constants(KernelSpec::k1());
  return constants;
}

} // namespace errdens
