#include "errdens.h"

#include "errdens/bandwidth.hpp"
#include "errdens/config.hpp"
#include "errdens/csv.hpp"
#include "errdens/errdensity.hpp"
#include "errdens/error.hpp"
#include "errdens/kernels.hpp"
#include "errdens/regression.hpp"
#include "errdens/run.hpp"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

using namespace errdens;

// Opaque handle definitions; the C structs wrap the C++ value types.
struct errdens_sample {
  Sample sample;
};

struct errdens_residuals {
  ResidualSet residuals;
};

namespace {

thread_local std::string g_last_error;

errdens_status status_from_code(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InvalidArgument: return ERRDENS_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return ERRDENS_ERR_DIMENSION_MISMATCH;
    case ErrorCode::EmptyNeighborhood: return ERRDENS_ERR_EMPTY_NEIGHBORHOOD;
    case ErrorCode::AllTrimmed: return ERRDENS_ERR_ALL_TRIMMED;
    case ErrorCode::NoTrimmedObservations: return ERRDENS_ERR_NO_TRIMMED_OBSERVATIONS;
    case ErrorCode::ZeroCurvature: return ERRDENS_ERR_ZERO_CURVATURE;
    case ErrorCode::MalformedCsv: return ERRDENS_ERR_MALFORMED_CSV;
    case ErrorCode::EmptyFile: return ERRDENS_ERR_EMPTY_FILE;
    case ErrorCode::Io: return ERRDENS_ERR_IO;
  }
  return ERRDENS_ERR_INTERNAL;
}

// Runs fn, mapping exceptions onto status codes and the thread-local
// error message.
template<typename Fn>
errdens_status guarded(Fn&& fn)
{
  try {
    fn();
    g_last_error.clear();
    return ERRDENS_OK;
  } catch (const Error& err) {
    g_last_error = err.what();
    return status_from_code(err.code());
  } catch (const std::exception& err) {
    g_last_error = err.what();
    return ERRDENS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ERRDENS_ERR_INTERNAL;
  }
}

errdens_status invalid(const char* message)
{
  g_last_error = message;
  return ERRDENS_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char* errdens_status_name(errdens_status status)
{
  switch (status) {
    case ERRDENS_OK: return "Ok";
    case ERRDENS_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case ERRDENS_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case ERRDENS_ERR_EMPTY_NEIGHBORHOOD: return "EmptyNeighborhood";
    case ERRDENS_ERR_ALL_TRIMMED: return "AllTrimmed";
    case ERRDENS_ERR_NO_TRIMMED_OBSERVATIONS: return "NoTrimmedObservations";
    case ERRDENS_ERR_ZERO_CURVATURE: return "ZeroCurvature";
    case ERRDENS_ERR_MALFORMED_CSV: return "MalformedCsv";
    case ERRDENS_ERR_EMPTY_FILE: return "EmptyFile";
    case ERRDENS_ERR_IO: return "Io";
    case ERRDENS_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* errdens_last_error(void)
{
  return g_last_error.c_str();
}

const char* errdens_version(void)
{
  return "0.1.0";
}

errdens_status errdens_sample_create(const double* x, const double* y, size_t n,
                                     size_t d, errdens_sample** out)
{
  if (!x || !y || !out)
    return invalid("sample_create: null argument");
  return guarded([&] {
    auto sample = std::make_unique<errdens_sample>();
    sample->sample.n = static_cast<int>(n);
    sample->sample.d = static_cast<int>(d);
    sample->sample.x.assign(x, x + n * d);
    sample->sample.y.assign(y, y + n);
    sample->sample.validate();
    *out = sample.release();
  });
}

errdens_status errdens_sample_from_csv(const char* path, errdens_sample** out)
{
  if (!path || !out)
    return invalid("sample_from_csv: null argument");
  return guarded([&] {
    auto sample = std::make_unique<errdens_sample>();
    sample->sample = load_sample(path);
    *out = sample.release();
  });
}

void errdens_sample_free(errdens_sample* sample)
{
  delete sample;
}

size_t errdens_sample_n(const errdens_sample* sample)
{
  return sample ? static_cast<size_t>(sample->sample.n) : 0;
}

size_t errdens_sample_d(const errdens_sample* sample)
{
  return sample ? static_cast<size_t>(sample->sample.d) : 0;
}

errdens_status errdens_k0_eval(const double* z, size_t d, double* out)
{
  if (!z || !out || d == 0)
    return invalid("k0_eval: null argument");
  return guarded([&] {
    *out = eval_k0(std::span<const double>(z, d), KernelSpec::k0(static_cast<int>(d)));
  });
}

errdens_status errdens_k1_eval(double v, int order, double* out)
{
  if (!out)
    return invalid("k1_eval: null output");
  return guarded([&] { *out = eval_k1(v, order); });
}

errdens_status errdens_k0_constants(size_t d, errdens_kernel_constants* out)
{
  if (!out || d == 0)
    return invalid("k0_constants: null argument");
  return guarded([&] {
    const KernelConstants c = compute_constants(KernelSpec::k0(static_cast<int>(d)));
    *out = { c.integral, c.first_moment, c.second_moment, c.squared_integral };
  });
}

errdens_status errdens_k1_constants(errdens_kernel_constants* out)
{
  if (!out)
    return invalid("k1_constants: null output");
  return guarded([&] {
    const KernelConstants& c = k1_constants();
    *out = { c.integral, c.first_moment, c.second_moment, c.squared_integral };
  });
}

errdens_status errdens_g_hat(const errdens_sample* sample, double b0, const double* x,
                             size_t d, double* out)
{
  if (!sample || !x || !out)
    return invalid("g_hat: null argument");
  return guarded([&] { *out = g_hat(sample->sample, b0, std::span<const double>(x, d)); });
}

errdens_status errdens_nw_estimate(const errdens_sample* sample, double b0,
                                   const double* x, size_t d, double* out)
{
  if (!sample || !x || !out)
    return invalid("nw_estimate: null argument");
  return guarded(
    [&] { *out = nw_estimate(sample->sample, b0, std::span<const double>(x, d)); });
}

errdens_status errdens_nw_loo(const errdens_sample* sample, double b0, size_t i,
                              double* out)
{
  if (!sample || !out)
    return invalid("nw_loo: null argument");
  return guarded([&] { *out = nw_loo(sample->sample, b0, static_cast<int>(i)); });
}

errdens_status errdens_residuals_compute(const errdens_sample* sample, double b0,
                                         const double* trim_lower,
                                         const double* trim_upper,
                                         errdens_residuals** out)
{
  if (!sample || !out)
    return invalid("residuals_compute: null argument");
  if ((trim_lower == nullptr) != (trim_upper == nullptr))
    return invalid("residuals_compute: trim bounds must be given together");
  return guarded([&] {
    TrimRegion region;
    if (trim_lower) {
      region.lower.assign(trim_lower, trim_lower + sample->sample.d);
      region.upper.assign(trim_upper, trim_upper + sample->sample.d);
    } else {
      region = default_trim_region(sample->sample);
    }
    auto res = std::make_unique<errdens_residuals>();
    res->residuals = residuals(sample->sample, b0, region);
    *out = res.release();
  });
}

void errdens_residuals_free(errdens_residuals* res)
{
  delete res;
}

size_t errdens_residuals_n(const errdens_residuals* res)
{
  return res ? res->residuals.residuals.size() : 0;
}

size_t errdens_residuals_trimmed_in(const errdens_residuals* res)
{
  return res ? static_cast<size_t>(res->residuals.n_trimmed_in) : 0;
}

double errdens_residuals_b0(const errdens_residuals* res)
{
  return res ? res->residuals.b0 : 0.0;
}

errdens_status errdens_residuals_values(const errdens_residuals* res, double* values)
{
  if (!res || !values)
    return invalid("residuals_values: null argument");
  std::memcpy(values, res->residuals.residuals.data(),
              res->residuals.residuals.size() * sizeof(double));
  return ERRDENS_OK;
}

errdens_status errdens_residuals_mask(const errdens_residuals* res, unsigned char* mask)
{
  if (!res || !mask)
    return invalid("residuals_mask: null argument");
  std::memcpy(mask, res->residuals.trim_mask.data(), res->residuals.trim_mask.size());
  return ERRDENS_OK;
}

errdens_status errdens_two_step_density(const errdens_residuals* res, double b1,
                                        const double* grid, size_t n_grid,
                                        double* values)
{
  if (!res || !grid || !values)
    return invalid("two_step_density: null argument");
  return guarded([&] {
    const DensityEstimate est =
      two_step_density(res->residuals, b1, std::span<const double>(grid, n_grid));
    std::memcpy(values, est.values.data(), est.values.size() * sizeof(double));
  });
}

errdens_status errdens_oracle_density(const double* errors, const unsigned char* mask,
                                      size_t n, double b1, const double* grid,
                                      size_t n_grid, double* values)
{
  if (!errors || !mask || !grid || !values)
    return invalid("oracle_density: null argument");
  return guarded([&] {
    const DensityEstimate est =
      oracle_density(std::span<const double>(errors, n),
                     std::span<const std::uint8_t>(mask, n), b1,
                     std::span<const double>(grid, n_grid));
    std::memcpy(values, est.values.data(), est.values.size() * sizeof(double));
  });
}

errdens_status errdens_naive_conditional_density(const errdens_sample* sample,
                                                 double b0, double h0, double h1,
                                                 const double* x, size_t d,
                                                 const double* grid, size_t n_grid,
                                                 double* values)
{
  if (!sample || !x || !grid || !values)
    return invalid("naive_conditional_density: null argument");
  return guarded([&] {
    const DensityEstimate est =
      naive_conditional_density(sample->sample, b0, h0, h1,
                                std::span<const double>(x, d),
                                std::span<const double>(grid, n_grid));
    std::memcpy(values, est.values.data(), est.values.size() * sizeof(double));
  });
}

errdens_status errdens_rn_risk(double b0, double b1, double n, int d, double* out)
{
  if (!out)
    return invalid("rn_risk: null output");
  return guarded([&] { *out = rn_risk(b0, b1, n, d); });
}

errdens_status errdens_amse_b1(double b1, double n, double* out)
{
  if (!out)
    return invalid("amse_b1: null output");
  return guarded([&] { *out = amse_b1(b1, n); });
}

errdens_status errdens_b0_star(double n, int d, double b1, double c0, double* out)
{
  if (!out)
    return invalid("b0_star: null output");
  return guarded([&] { *out = b0_star(n, d, b1, c0); });
}

errdens_status errdens_b1_star_rate(double n, int d, double c1, double* out)
{
  if (!out)
    return invalid("b1_star_rate: null output");
  return guarded([&] { *out = b1_star_rate(n, d, c1); });
}

errdens_status errdens_b1_amise_plugin(double f2_sq_integral,
                                       const errdens_kernel_constants* k1,
                                       double p_in_region, double n, double* out)
{
  if (!k1 || !out)
    return invalid("b1_amise_plugin: null argument");
  return guarded([&] {
    KernelConstants constants{ k1->integral, k1->first_moment, k1->second_moment,
                               k1->squared_integral };
    *out = b1_amise_plugin(f2_sq_integral, constants, p_in_region, n);
  });
}

errdens_status errdens_rn_argmin_numeric(double n, int d, double b1, double* out)
{
  if (!out)
    return invalid("rn_argmin_numeric: null output");
  return guarded([&] { *out = rn_argmin_numeric(n, d, b1); });
}

errdens_status errdens_check_a11(double b0, double b1, double n, int d,
                                 errdens_a11_report* out)
{
  if (!out)
    return invalid("check_a11: null output");
  return guarded([&] {
    const A11Report report = check_a11(b0, b1, n, d);
    out->n_b0_pow_d_plus_4 = report.n_b0_pow_d_plus_4;
    out->n_b0_pow4_b1 = report.n_b0_pow4_b1;
    out->n_b0_pow_d_b1_cubed = report.n_b0_pow_d_b1_cubed;
    out->clt_growth_exponent = report.clt_growth_exponent;
    out->regime = report.regime == A11Regime::Satisfied   ? 0
                  : report.regime == A11Regime::Boundary ? 1
                                                         : 2;
  });
}

errdens_status errdens_run(const char* config_path, const char* const* override_keys,
                           const char* const* override_values, size_t n_overrides)
{
  if (n_overrides > 0 && (!override_keys || !override_values))
    return invalid("run: null override arrays");
  return guarded([&] {
    std::vector<std::pair<std::string, std::string>> entries;
    if (config_path)
      entries = parse_config_file(config_path);
    for (size_t i = 0; i < n_overrides; ++i) {
      require(override_keys[i] != nullptr && override_values[i] != nullptr,
              ErrorCode::InvalidArgument, "run: null override entry");
      entries.emplace_back(override_keys[i], override_values[i]);
    }
    run(resolve_config(entries));
  });
}

} // extern "C"
