#include "errdens/bandwidth.hpp"

#include "errdens/error.hpp"
#include "errdens/rng.hpp"
#include "errdens/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace errdens;

namespace {

// Independent straight-line transcription of the first-step risk, composed
// entirely through std::pow.
double rn_risk_reference(double b0, double b1, double n, double d)
{
  const double inner = std::pow(b0, 4.0) + std::pow(n * std::pow(b0, d), -1.0);
  const double bracket1 = std::pow(n * std::pow(b1, 5.0), -0.5) +
                          std::pow(std::pow(b0, d) / std::pow(b1, 3.0), 0.5);
  const double bracket2 =
    std::pow(b1, -1.0) + std::pow(std::pow(b0, d) / std::pow(b1, 7.0), 0.5);
  return std::pow(b0, 4.0) + std::pow(bracket1, 2.0) * std::pow(inner, 2.0) +
         std::pow(bracket2, 2.0) * std::pow(inner, 3.0);
}

double exact_poly_integral(int p, int q)
{
  if (p % 2 == 1)
    return 0.0;
  double total = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= q; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    total += sign * binom * 2.0 / (2.0 * j + p + 1.0);
    binom = binom * (q - j) / (j + 1.0);
  }
  return total;
}

bool close(double a, double b, double tol = 1e-12)
{
  return std::abs(a - b) <= tol * std::max({ 1.0, std::abs(a), std::abs(b) });
}

} // namespace

TEST_CASE("rn_risk point behavior")
{
  const double n = 1000.0;
  const double b1 = 0.25;

  // variance blow-up as b0 -> 0, and the b0^4 floor for large b0
  CHECK(rn_risk(1e-6, b1, n, 1) > rn_risk(b0_star(n, 1, b1), b1, n, 1));
  CHECK(rn_risk(1.0, b1, n, 1) >= 1.0);

  CHECK(close(rn_risk(0.15, 0.25, 1000.0, 1), rn_risk_reference(0.15, 0.25, 1000.0, 1.0)));
}

TEST_CASE("rn_risk agrees with an independent transcription on random inputs")
{
  Rng rng(606060);
  for (int k = 0; k < 1000; ++k) {
    const double b0 = 0.01 + 0.99 * rng.uniform01();
    const double b1 = 0.01 + 0.99 * rng.uniform01();
    const double n = std::pow(10.0, 1.0 + 6.0 * rng.uniform01());
    const int d = 1 + static_cast<int>(rng.uniform01() * 4);
    CHECK(close(rn_risk(b0, b1, n, d), rn_risk_reference(b0, b1, n, d)));
  }
}

TEST_CASE("amse_b1")
{
  const double n = 4096.0;
  const double b1 = std::pow(n, -0.2);
  CHECK(close(amse_b1(b1, n), 2.0 * std::pow(n, -0.8)));
  CHECK(close(amse_b1(0.1, 1e5), 2e-4));
  // large n at fixed b1 leaves only the bias term
  CHECK(amse_b1(0.3, 1e15) == doctest::Approx(std::pow(0.3, 4)).epsilon(1e-9));
}

TEST_CASE("b0_star branches and orders")
{
  const double n = 1000.0;
  const double b1 = std::pow(n, -0.2);
  const double first = std::pow(1.0 / (n * n * b1 * b1 * b1), 0.2);
  const double second = std::pow(1.0 / (n * n * n * std::pow(b1, 7.0)), 1.0 / 6.0);
  CHECK(first == doctest::Approx(0.1446).epsilon(1e-3));
  CHECK(second == doctest::Approx(0.1585).epsilon(1e-3));
  CHECK(second > first); // the second branch governs when b1 ~ n^{-1/5}
  CHECK(close(b0_star(n, 1, b1), std::max(first, second)));
  CHECK(close(b0_star(n, 1, b1, 2.5), 2.5 * std::max(first, second)));

  // for b1 ~ n^{-1/5} and d <= 2 the order is n^{-8/(5(2d+4))}
  for (int d = 1; d <= 2; ++d) {
    const double expo = -8.0 / (5.0 * (2 * d + 4));
    const double r = b0_star(16.0 * n, d, std::pow(16.0 * n, -0.2)) /
                     b0_star(n, d, std::pow(n, -0.2));
    CHECK(r == doctest::Approx(std::pow(16.0, expo)).epsilon(1e-10));
  }

  // scaling n -> 16n at fixed b1 shrinks the first branch by 16^{-2/5}
  const double fixed_b1 = 0.2;
  const double first_16 = std::pow(1.0 / (16.0 * n * 16.0 * n * std::pow(fixed_b1, 3.0)), 0.2);
  const double first_1 = std::pow(1.0 / (n * n * std::pow(fixed_b1, 3.0)), 0.2);
  CHECK(first_16 / first_1 == doctest::Approx(std::pow(16.0, -0.4)).epsilon(1e-12));
}

TEST_CASE("b0_star is continuous across the branch crossing")
{
  // branches cross where ln b1 = ln n (d - 4) / (d + 16)
  for (int d = 1; d <= 3; ++d) {
    const double n = 1e5;
    const double b1_cross = std::pow(n, (d - 4.0) / (d + 16.0));
    const double first = std::pow(1.0 / (n * n * std::pow(b1_cross, 3.0)), 1.0 / (d + 4));
    const double second =
      std::pow(1.0 / (n * n * n * std::pow(b1_cross, 7.0)), 1.0 / (2.0 * d + 4));
    CHECK(close(first, second, 1e-10));
    const double at_cross = b0_star(n, d, b1_cross);
    CHECK(close(b0_star(n, d, b1_cross * (1.0 + 1e-7)), at_cross, 1e-5));
    CHECK(close(b0_star(n, d, b1_cross * (1.0 - 1e-7)), at_cross, 1e-5));
  }
}

TEST_CASE("b1_star_rate")
{
  CHECK(b1_star_rate(1e5, 1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(b1_star_rate(1e5, 2) == doctest::Approx(0.1).epsilon(1e-12));
  // d = 3 exponent is -3/17
  const double r = b1_star_rate(1e6, 3) / b1_star_rate(1e3, 3);
  CHECK(r == doctest::Approx(std::pow(1e3, -3.0 / 17.0)).epsilon(1e-10));
  // -3/17 > -1/5, so the d = 3 bandwidth is larger at equal n
  CHECK(b1_star_rate(1e4, 3) > b1_star_rate(1e4, 2));
  CHECK(close(b1_star_rate(1e4, 1, 3.0), 3.0 * std::pow(1e4, -0.2)));
}

TEST_CASE("b1_amise_plugin")
{
  const KernelConstants& k1 = k1_constants();

  const double base = b1_amise_plugin(0.3, k1, 0.8, 1000.0);
  CHECK(b1_amise_plugin(0.3, k1, 0.8, 2000.0) ==
        doctest::Approx(base * std::pow(2.0, -0.2)).epsilon(1e-12));
  CHECK(b1_amise_plugin(0.3, k1, 0.4, 1000.0) ==
        doctest::Approx(base * std::pow(2.0, 0.2)).epsilon(1e-12));

  // standard normal curvature with exact kernel constants as the oracle
  const double curvature = 3.0 / (8.0 * std::sqrt(3.14159265358979323846));
  const double sq_exact = std::pow(315.0 / 256.0, 2.0) * exact_poly_integral(0, 8);
  const double second_exact = (315.0 / 256.0) * exact_poly_integral(2, 4);
  const double expected =
    std::pow((sq_exact / 1.0) / (curvature * second_exact * second_exact), 0.2) *
    std::pow(1000.0, -0.2);
  CHECK(b1_amise_plugin(curvature, k1, 1.0, 1000.0) ==
        doctest::Approx(expected).epsilon(1e-9));

  CHECK_THROWS_AS(b1_amise_plugin(0.0, k1, 1.0, 1000.0), Error);
  try {
    b1_amise_plugin(0.0, k1, 1.0, 1000.0);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ZeroCurvature);
  }
}

TEST_CASE("rn_argmin_numeric is a local minimum and tracks b0_star")
{
  for (const double n : { 1e3, 1e5 }) {
    for (int d = 1; d <= 3; ++d) {
      const double b1 = b1_star_rate(n, d);
      const double minimizer = rn_argmin_numeric(n, d, b1);
      const double at_min = rn_risk(minimizer, b1, n, d);
      CHECK(at_min <= rn_risk(minimizer * 1.05, b1, n, d));
      CHECK(at_min <= rn_risk(minimizer * 0.95, b1, n, d));

      const double ratio = minimizer / b0_star(n, d, b1);
      CHECK(ratio > 1.0 / 3.0);
      CHECK(ratio < 3.0);
    }
  }

  // minimizers decrease along an n sweep at d = 1, b1 = n^{-1/5}
  double previous = 1.0;
  for (const double n : { 1e3, 1e4, 1e5, 1e6 }) {
    const double minimizer = rn_argmin_numeric(n, 1, std::pow(n, -0.2));
    CHECK(minimizer < previous);
    previous = minimizer;
  }
}

TEST_CASE("rn_optimal_order tracks the raw formula at the minimizing bandwidth")
{
  // the raw risk at (b0*, b1) stays within a fixed factor of its closed-form
  // minimal order across the sweep
  for (const double n : { 1e3, 1e4, 1e5, 1e6 }) {
    for (int d = 1; d <= 3; ++d) {
      for (const double b1 : { std::pow(n, -0.2), std::pow(n, -3.0 / (2 * d + 11)) }) {
        const double raw = rn_risk(b0_star(n, d, b1), b1, n, d);
        const double order = rn_optimal_order(n, d, b1);
        CHECK(raw / order > 1.0 / 20.0);
        CHECK(raw / order < 20.0);
      }
    }
  }
}

TEST_CASE("total risk slope converges to the theoretical rate as n grows")
{
  // The raw-formula slope over a sliding window approaches the asymptotic
  // rate; the window [1e6, 1e9] must sit closer to the target than
  // [1e3, 1e6].
  for (int d = 1; d <= 4; ++d) {
    const double target = d <= 2 ? -0.4 : -6.0 / (2.0 * d + 11.0);
    const auto window_slope = [&](double lo) {
      std::vector<double> log_n, log_risk;
      for (int k = 0; k < 4; ++k) {
        const double n = lo * std::pow(10.0, k);
        const double b1 = b1_star_rate(n, d);
        const double risk = amse_b1(b1, n) + rn_risk(b0_star(n, d, b1), b1, n, d);
        log_n.push_back(std::log(n));
        log_risk.push_back(0.5 * std::log(risk));
      }
      return fit_slope(log_n, log_risk).slope;
    };
    const double near = window_slope(1e3);
    const double far = window_slope(1e6);
    CHECK(std::abs(far - target) < std::abs(near - target));
  }
}

TEST_CASE("check_a11")
{
  const A11Report verbatim = check_a11(0.5, 0.5, 100.0, 1);
  CHECK(verbatim.n_b0_pow_d_plus_4 == doctest::Approx(3.125).epsilon(1e-14));
  CHECK(verbatim.n_b0_pow4_b1 == doctest::Approx(3.125).epsilon(1e-14));
  CHECK(verbatim.n_b0_pow_d_b1_cubed == doctest::Approx(6.25).epsilon(1e-14));

  // d = 1 under the optimal rates: n b0^d b1^3 grows like n^{2/15}
  const A11Report d1 = check_a11(std::pow(1e4, -8.0 / 30.0), std::pow(1e4, -0.2), 1e4, 1);
  CHECK(d1.clt_growth_exponent == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
  CHECK(d1.regime == A11Regime::Satisfied);

  // d = 2: bounded, the borderline case
  const A11Report d2 = check_a11(std::pow(1e4, -0.2), std::pow(1e4, -0.2), 1e4, 2);
  CHECK(d2.clt_growth_exponent == doctest::Approx(0.0));
  CHECK(d2.regime == A11Regime::Boundary);
  CHECK(d2.n_b0_pow_d_b1_cubed == doctest::Approx(1.0).epsilon(1e-10));

  const A11Report d3 = check_a11(0.1, 0.1, 1e4, 3);
  CHECK(d3.regime == A11Regime::Violated);
}
