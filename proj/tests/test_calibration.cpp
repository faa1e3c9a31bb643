#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tbh/calibration.hpp"

using namespace tbh;

namespace {

ComplexVector seed_state() {
  ComplexVector a0(3);
  a0 << Complex(0.35, 0.1), Complex(-0.2, 0.25), Complex(0.15, -0.1);
  return a0;
}

ClosureConfig small_closure() {
  ClosureConfig config;
  config.m = 3;
  config.beta = 5.0;
  config.dt = 1e-3;
  config.t_final = 0.2;
  return config;
}

/// Synthetic 'DNS': the closure itself run at a known gamma.
MomentSeries synthetic_dns(double gamma_true) {
  ClosureConfig config = small_closure();
  config.gamma = gamma_true;
  return integrate_closure(seed_state(), config);
}

}  // namespace

TEST_CASE("the misfit vanishes exactly at the generating gamma") {
  const double gamma_true = 30.0;
  const MomentSeries dns = synthetic_dns(gamma_true);
  const ClosureConfig config = small_closure();
  const ComplexVector a0 = seed_state();

  CHECK(error_function(gamma_true, dns, config, a0) <= 1e-22);
  CHECK(error_function(10.0, dns, config, a0) > 1e-6);
  CHECK(error_function(100.0, dns, config, a0) > 1e-6);
}

TEST_CASE("the misfit agrees with a by-hand sum of squared components") {
  const MomentSeries dns = synthetic_dns(30.0);
  ClosureConfig config = small_closure();
  const ComplexVector a0 = seed_state();
  const double gamma = 55.0;

  config.gamma = gamma;
  const MomentSeries closure = integrate_closure(a0, config);
  double by_hand = 0.0;
  for (int row = 0; row < dns.snapshots(); ++row) {
    for (int k = 0; k < dns.modes(); ++k) {
      const Complex diff = closure.means(row, k) - dns.means(row, k);
      by_hand += diff.real() * diff.real() + diff.imag() * diff.imag();
    }
  }
  const double reported = error_function(gamma, dns, small_closure(), a0);
  CHECK(reported == doctest::Approx(by_hand).epsilon(1e-12));

  // Restricting the scored modes drops the later columns from the sum.
  const double first_only = error_function(gamma, dns, small_closure(), a0, 1);
  CHECK(first_only < reported);
  double by_hand_first = 0.0;
  for (int row = 0; row < dns.snapshots(); ++row) {
    const Complex diff = closure.means(row, 0) - dns.means(row, 0);
    by_hand_first += std::norm(diff);
  }
  CHECK(first_only == doctest::Approx(by_hand_first).epsilon(1e-12));
}

TEST_CASE("the linearized misfit scales exactly quadratically") {
  ClosureConfig config = small_closure();
  config.variant = ClosureVariant::linearized;

  ClosureConfig gen = config;
  gen.gamma = 30.0;
  const ComplexVector a0 = seed_state();
  MomentSeries dns = integrate_closure(a0, gen);

  const double base = error_function(60.0, dns, config, a0);
  dns.means *= 2.0;
  const double doubled = error_function(60.0, dns, config, 2.0 * a0);
  CHECK(doubled == doctest::Approx(4.0 * base).epsilon(1e-12));
}

TEST_CASE("fit_gamma recovers the generating parameter") {
  const double gamma_true = 30.0;
  const MomentSeries dns = synthetic_dns(gamma_true);
  const ClosureConfig config = small_closure();
  const ComplexVector a0 = seed_state();

  FitOptions options;
  options.bracket_lo = 5.0;
  options.bracket_hi = 200.0;
  options.scan_points = 8;
  options.rel_tol = 1e-4;
  const FitResult fit = fit_gamma(dns, config, a0, 0, options);

  CHECK(fit.gamma_star == doctest::Approx(gamma_true).epsilon(5e-3));
  CHECK(fit.error_value <= 1e-8);
  CHECK(fit.damping_time_coeff ==
        doctest::Approx(std::sqrt(5.0 / fit.gamma_star)).epsilon(1e-14));
  CHECK(fit.rms_per_mode_step ==
        doctest::Approx(rms_per_mode_step(fit.error_value, 3,
                                          dns.snapshots()))
            .epsilon(1e-14));
  CHECK(fit.evaluations >= options.scan_points);
  CHECK(fit.evaluations <= 60);
}

TEST_CASE("a bracket that excludes the minimum raises FitFailure") {
  const MomentSeries dns = synthetic_dns(30.0);
  const ClosureConfig config = small_closure();
  const ComplexVector a0 = seed_state();

  FitOptions options;
  options.bracket_lo = 100.0;
  options.bracket_hi = 500.0;
  options.scan_points = 6;
  try {
    fit_gamma(dns, config, a0, 0, options);
    FAIL("expected FitFailure");
  } catch (const FitFailure& failure) {
    REQUIRE(failure.scan().size() == 6);
    CHECK(failure.scan().front().first ==
          doctest::Approx(100.0).epsilon(1e-12));
    CHECK(failure.scan().back().first ==
          doctest::Approx(500.0).epsilon(1e-12));
    // Monotone increasing misfit across the scan: minimum on the boundary.
    CHECK(failure.scan().front().second < failure.scan().back().second);
    CHECK(std::string(failure.what()).find("gamma") != std::string::npos);
  }
}

TEST_CASE("a DNS series on a different time grid is rejected") {
  MomentSeries dns = synthetic_dns(30.0);
  const ComplexVector a0 = seed_state();

  ClosureConfig wrong_dt = small_closure();
  wrong_dt.dt = 7e-4;  // snapshot spacing no longer a step multiple
  CHECK_THROWS_AS(error_function(30.0, dns, wrong_dt, a0),
                  std::invalid_argument);

  dns.times[1] += 1e-3;
  CHECK_THROWS_AS(error_function(30.0, dns, small_closure(), a0),
                  std::invalid_argument);
}

TEST_CASE("rms normalization and argument checking") {
  CHECK(rms_per_mode_step(8.0, 2, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rms_per_mode_step(0.0, 5, 301) == 0.0);
  CHECK_THROWS_AS(rms_per_mode_step(1.0, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(rms_per_mode_step(1.0, 5, 0), std::invalid_argument);

  const MomentSeries dns = synthetic_dns(30.0);
  CHECK_THROWS_AS(
      error_function(-1.0, dns, small_closure(), seed_state()),
      std::invalid_argument);
  CHECK_THROWS_AS(
      error_function(30.0, dns, small_closure(), seed_state(), 4),
      std::invalid_argument);
}
