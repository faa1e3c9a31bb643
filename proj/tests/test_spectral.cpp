#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tbh/sampling.hpp"
#include "tbh/spectral.hpp"

using namespace tbh;

namespace {

SpectralState random_state(int n, std::mt19937& gen, double scale = 0.5) {
  std::normal_distribution<double> nd(0.0, scale);
  SpectralState z(n);
  for (int i = 0; i < n; ++i) z[i] = Complex(nd(gen), nd(gen));
  return z;
}

}  // namespace

TEST_CASE("default grid is the smallest alias-free power of two") {
  CHECK(default_grid_size(1) == 4);
  CHECK(default_grid_size(8) == 32);
  CHECK(default_grid_size(16) == 64);
  CHECK(default_grid_size(50) == 256);
  CHECK(default_grid_size(85) == 256);   // 3*85+1 = 256 exactly
  CHECK(default_grid_size(86) == 512);
  CHECK_THROWS_AS(default_grid_size(0), std::invalid_argument);
}

TEST_CASE("configuration validation rejects broken setups") {
  ModelConfig config;
  CHECK_NOTHROW(validate(config));
  config.n = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config.n = 50;
  config.dt = 0.0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config.dt = 5e-4;
  config.t_final = -1.0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config.t_final = 1.5;
  config.grid_size = 3 * config.n;  // one short of the alias-free bound
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config.grid_size = 3 * config.n + 1;
  CHECK_NOTHROW(validate(config));

  CHECK_THROWS_AS(SpectralEngine(0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralEngine(8, 24), std::invalid_argument);
  SpectralEngine engine(4);
  SpectralState wrong = SpectralState::Zero(5), out;
  CHECK_THROWS_AS(engine.rhs(wrong, out), std::invalid_argument);
}

TEST_CASE("single-mode states reproduce the hand convolution") {
  SpectralState z = SpectralState::Zero(4);
  z[0] = 1.0;  // z_1 = 1

  SpectralState r = tbh_rhs_direct(z);
  CHECK(r[0] == Complex(0.0, 0.0));
  CHECK(r[1].real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r[1].imag() == doctest::Approx(-1.0).epsilon(1e-15));  // dz_2/dt = -i
  CHECK(std::abs(r[2]) == 0.0);
  CHECK(std::abs(r[3]) == 0.0);

  z[1] = Complex(0.0, 1.0);  // add z_2 = i
  r = tbh_rhs_direct(z);
  CHECK(r[2].real() == doctest::Approx(3.0).epsilon(1e-14));  // dz_3/dt = 3
  CHECK(r[2].imag() == doctest::Approx(0.0).epsilon(1e-14));

  CHECK(tbh_rhs_direct(SpectralState::Zero(6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pseudo-spectral and direct right-hand sides agree") {
  std::mt19937 gen(7);
  double worst = 0.0;
  for (int n : {4, 8, 16}) {
    SpectralEngine engine(n);
    for (int trial = 0; trial < 25; ++trial) {
      const SpectralState z = random_state(n, gen);
      SpectralState fast;
      engine.rhs(z, fast);
      worst = std::max(worst,
                       (fast - tbh_rhs_direct(z)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-12);

  // The convenience wrapper plans its own engine and matches too.
  const SpectralState z = random_state(12, gen);
  CHECK((tbh_rhs(z) - tbh_rhs_direct(z)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("energy and Hamiltonian evaluate their frozen examples") {
  SpectralState z = SpectralState::Zero(3);
  CHECK(hamiltonian(z) == 0.0);
  z[0] = 1.0;
  CHECK(energy(z) == 1.0);
  CHECK(hamiltonian(z) == 0.0);  // no zero-sum triple from ±1 alone

  SpectralState z2 = SpectralState::Zero(2);
  z2[0] = 1.0;
  z2[1] = 1.0;
  CHECK(hamiltonian(z2) == doctest::Approx(1.0).epsilon(1e-15));
  SpectralEngine engine(2);
  CHECK(engine.hamiltonian(z2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("grid and convolution Hamiltonians agree on random states") {
  std::mt19937 gen(11);
  SpectralEngine engine(16);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralState z = random_state(16, gen);
    CHECK(engine.hamiltonian(z) ==
          doctest::Approx(hamiltonian(z)).epsilon(1e-12));
  }
}

TEST_CASE("the flow moves no energy: detail balance of the advection") {
  std::mt19937 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralState z = random_state(20, gen);
    const SpectralState r = tbh_rhs_direct(z);
    // dE/dt = 2 Re <z, dz/dt> must vanish identically.
    double flux = 0.0;
    for (int k = 0; k < 20; ++k) flux += (std::conj(z[k]) * r[k]).real();
    CHECK(std::abs(flux) <= 1e-12 * energy(z));
  }
}

TEST_CASE("physical field is the real part of the naive Fourier sum") {
  std::mt19937 gen(17);
  const int n = 10;
  const SpectralState z = random_state(n, gen);
  const RealVector u = to_physical(z);
  const int grid = default_grid_size(n);
  REQUIRE(u.size() == grid);
  for (int j = 0; j < grid; j += 5) {
    const double x = 2.0 * M_PI * j / grid;
    Complex naive(0.0, 0.0);
    for (int k = 1; k <= n; ++k) {
      naive += z[k - 1] * std::exp(Complex(0.0, k * x));
    }
    const double expected = 2.0 * naive.real();  // + conjugate half
    CHECK(std::abs(u[j] - expected) <= 1e-13 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("rk4_step is exact for dt = 0 and 4th-order accurate") {
  // dt = 0 leaves any state untouched.
  SpectralState z = SpectralState::Zero(4);
  z[0] = Complex(0.3, -0.2);
  const SpectralState before = z;
  Rk4Workspace<SpectralState> ws;
  rk4_step(z, 0.0, 0.0,
           [](const SpectralState& y, double, SpectralState& out) {
             out = 2.0 * y;
           },
           ws);
  CHECK((z - before).cwiseAbs().maxCoeff() == 0.0);

  // On dy/dt = -y one step reproduces the degree-4 Taylor polynomial.
  const double dt = 0.1;
  const double stepped =
      rk4_step(1.0, 0.0, dt, [](double y, double) { return -y; });
  const double taylor =
      1.0 - dt + dt * dt / 2 - dt * dt * dt / 6 + dt * dt * dt * dt / 24;
  CHECK(stepped == doctest::Approx(taylor).epsilon(1e-15));

  // Measured convergence order on the n=8 truncation.
  SpectralEngine engine(8);
  const SpectralState z0 = sample_gibbs(8, 5.0, 2020, 0);
  auto advance = [&](double step) {
    ModelConfig config;
    config.n = 8;
    config.dt = step;
    config.t_final = 0.4;
    return integrate_trajectory(engine, z0, config);
  };
  const SpectralState ref = advance(5e-4);
  const double e1 = (advance(8e-3) - ref).cwiseAbs().maxCoeff();
  const double e2 = (advance(4e-3) - ref).cwiseAbs().maxCoeff();
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.7);
  CHECK(order <= 4.3);
}

TEST_CASE("short trajectories conserve energy and Hamiltonian") {
  SpectralEngine engine(50);
  ModelConfig config;
  config.t_final = 0.15;
  SpectralState z = sample_gibbs(50, 5.0, 31, 0);
  const double e0 = energy(z);
  const double h0 = engine.hamiltonian(z);
  double max_de = 0.0, max_dh = 0.0;
  integrate_trajectory(engine, z, config, 10,
                       [&](double, const SpectralState& s) {
                         max_de = std::max(max_de,
                                           std::abs(energy(s) - e0) / e0);
                         max_dh = std::max(
                             max_dh, std::abs(engine.hamiltonian(s) - h0));
                       });
  CHECK(max_de <= 1e-6);
  CHECK(max_dh <= 1e-5 * std::abs(h0) + 1e-6);
}

TEST_CASE("integrator schedule covers t = 0, the stride and the final time") {
  const RealVector t1 = snapshot_times(1.5, 5e-4, 10);
  REQUIRE(t1.size() == 301);
  CHECK(t1[0] == 0.0);
  CHECK(t1[1] == 10 * 5e-4);
  CHECK(t1[300] == 1.5);

  // A horizon that is not a multiple of dt still ends exactly at t_final.
  const RealVector t2 = snapshot_times(0.0123, 5e-4, 10);
  CHECK(t2[t2.size() - 1] == 0.0123);

  // Zero horizon: the initial snapshot only.
  const RealVector t3 = snapshot_times(0.0, 5e-4, 10);
  REQUIRE(t3.size() == 1);
  CHECK(t3[0] == 0.0);

  // integrate_trajectory fires its observer on exactly this grid.
  SpectralEngine engine(4);
  ModelConfig config;
  config.n = 4;
  config.t_final = 0.0123;
  std::vector<double> seen;
  integrate_trajectory(engine, SpectralState::Zero(4), config, 10,
                       [&](double t, const SpectralState&) {
                         seen.push_back(t);
                       });
  REQUIRE(static_cast<int>(seen.size()) == t2.size());
  for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == t2[i]);

  // t_final = 0 returns the initial state unchanged.
  SpectralState z = sample_gibbs(4, 5.0, 3, 0);
  ModelConfig zero = config;
  zero.t_final = 0.0;
  const SpectralState out = integrate_trajectory(engine, z, zero);
  CHECK((out - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rescale_to_energy lands exactly on the requested shell") {
  SpectralState z = sample_gibbs(50, 5.0, 99, 0);
  rescale_to_energy(z, 10.0);
  CHECK(energy(z) == doctest::Approx(10.0).epsilon(1e-14));

  SpectralState zero = SpectralState::Zero(3);
  CHECK_THROWS_AS(rescale_to_energy(zero, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rescale_to_energy(z, -1.0), std::invalid_argument);
}

TEST_CASE("diverging trajectories raise a blow-up error") {
  SpectralEngine engine(8);
  ModelConfig config;
  config.n = 8;
  config.t_final = 1.0;
  SpectralState huge = SpectralState::Zero(8);
  huge[0] = 1e160;  // squaring overflows within a step
  CHECK_THROWS_AS(integrate_trajectory(engine, huge, config),
                  BlowupError);
}
