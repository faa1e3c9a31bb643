#pragma once

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <utility>

#include "tbh/types.hpp"

struct fftw_plan_s;

namespace tbh {

// ============================================================
// Pseudo-spectral evaluation of the truncated Burgers-Hopf flow
//
//   dz_k/dt = -(ik/2) * sum_{k1+k2=k} z_{k1} z_{k2},   1 <= k <= n,
//
// with the pair sum running over k1, k2 in {±1..±n}.  The quadratic
// term is evaluated by transforming to a physical grid, squaring
// pointwise and transforming back; with grid_size >= 3n+1 the result
// is exact up to roundoff.
// ============================================================

/// Owns the FFTW plans and scratch buffers for one (n, grid) geometry.
/// Instances are cheap enough to create per worker thread; a single
/// instance must not be used from two threads at once.
class SpectralEngine {
 public:
  /// Plans transforms for n retained modes on `grid_size` collocation
  /// points (0 selects default_grid_size(n)).  Throws std::invalid_argument
  /// if n < 1 or the grid is too small to de-alias the quadratic term.
  explicit SpectralEngine(int n, int grid_size = 0);
  ~SpectralEngine();

  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  /// Right-hand side of the truncated system, dzdt resized to n.
  void rhs(const SpectralState& z, SpectralState& dzdt);

  /// Real field u(x_j) = sum_{|k|<=n} z_k exp(i k x_j) on the grid.
  void to_physical(const SpectralState& z, RealVector& u);

  /// Hamiltonian H = (1/6pi) \int u^3 dx via the collocation quadrature
  /// sum u_j^3 / (3 G), exact for an alias-free grid.
  double hamiltonian(const SpectralState& z);

  int n() const { return n_; }
  int grid_size() const { return grid_; }

 private:
  void load_spectrum(const SpectralState& z);

  int n_ = 0;
  int grid_ = 0;
  double* phys_ = nullptr;       // grid_ reals
  Complex* spec_ = nullptr;      // grid_/2 + 1 packed coefficients
  fftw_plan_s* plan_c2r_ = nullptr;
  fftw_plan_s* plan_r2c_ = nullptr;
};

/// Pseudo-spectral right-hand side (convenience wrapper that plans a
/// throwaway engine; prefer SpectralEngine::rhs in loops).
SpectralState tbh_rhs(const SpectralState& z, int grid_size = 0);

/// Direct O(n^2) convolution evaluation of the same right-hand side,
/// used as an independent oracle for the transform path.
SpectralState tbh_rhs_direct(const SpectralState& z);

/// Pair convolution S_k = sum_{k1+k2=k} z_{k1} z_{k2} for k = 1..n,
/// with k1, k2 ranging over {±1..±n}.
ComplexVector self_convolution(const SpectralState& z);

/// Conserved energy E = sum_{k=1}^n |z_k|^2.
double energy(const SpectralState& z);

/// Conserved Hamiltonian H = (1/6) sum_{k1+k2+k3=0} z_{k1} z_{k2} z_{k3}
/// over indices in {±1..±n}, evaluated as (1/3) sum_k Re(conj(z_k) S_k).
double hamiltonian(const SpectralState& z);

/// Physical field on an explicitly chosen grid (0 selects the default).
RealVector to_physical(const SpectralState& z, int grid_size = 0);

/// Scales the state onto the energy shell E = target.  Throws
/// std::invalid_argument for a zero state or a negative target.
void rescale_to_energy(SpectralState& z, double target);

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }

template <class V>
auto all_finite(const V& v) -> decltype(v.squaredNorm(), bool()) {
  return std::isfinite(v.squaredNorm());
}

}  // namespace detail

/// Preallocated stage storage for rk4_step on vector-valued states.
template <class V>
struct Rk4Workspace {
  V k1, k2, k3, k4, tmp;
};

/// One classical fourth-order Runge-Kutta step y(t) -> y(t + dt) for
/// dy/dt = f(y, t), with f(y, t, out) writing the derivative.  Throws
/// BlowupError if the updated state contains non-finite values.
template <class V, class F>
void rk4_step(V& y, double t, double dt, F&& f, Rk4Workspace<V>& ws) {
  f(y, t, ws.k1);
  ws.tmp = y + (0.5 * dt) * ws.k1;
  f(ws.tmp, t + 0.5 * dt, ws.k2);
  ws.tmp = y + (0.5 * dt) * ws.k2;
  f(ws.tmp, t + 0.5 * dt, ws.k3);
  ws.tmp = y + dt * ws.k3;
  f(ws.tmp, t + dt, ws.k4);
  y += (dt / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
  if (!detail::all_finite(y)) {
    throw BlowupError("rk4_step: non-finite state at t = " + std::to_string(t));
  }
}

/// Scalar overload for simple test problems.
template <class F>
double rk4_step(double y, double t, double dt, F&& f) {
  const double k1 = f(y, t);
  const double k2 = f(y + 0.5 * dt * k1, t + 0.5 * dt);
  const double k3 = f(y + 0.5 * dt * k2, t + 0.5 * dt);
  const double k4 = f(y + dt * k3, t + dt);
  const double out = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(out)) {
    throw BlowupError("rk4_step: non-finite state at t = " + std::to_string(t));
  }
  return out;
}

/// Value-returning convenience overload for vector states.
template <class V, class F>
V rk4_step(const V& y, double t, double dt, F&& f) {
  Rk4Workspace<V> ws;
  V out = y;
  rk4_step(out, t, dt, std::forward<F>(f), ws);
  return out;
}

/// Number of RK4 steps covering [0, t_final] at step dt (the final step is
/// shortened when t_final is not a multiple of dt).
std::int64_t step_count(double t_final, double dt);

/// Times at which integrate_trajectory's observer fires: t = 0, every
/// observe_stride-th step, and t_final.
RealVector snapshot_times(double t_final, double dt, int observe_stride);

/// Integrates the truncated system from `z` over [0, t_final], invoking
/// observer(t, state) at t = 0, every `observe_stride` steps, and at the
/// final time.  Returns the final state.  Throws BlowupError if the
/// trajectory diverges.
template <class Obs>
SpectralState integrate_trajectory(SpectralEngine& engine, SpectralState z,
                                   const ModelConfig& config,
                                   int observe_stride, Obs&& observer) {
  validate(config);
  const std::int64_t steps = step_count(config.t_final, config.dt);
  Rk4Workspace<SpectralState> ws;
  auto f = [&engine](const SpectralState& y, double, SpectralState& out) {
    engine.rhs(y, out);
  };
  observer(0.0, z);
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * config.dt;
    const bool last = (i + 1 == steps);
    rk4_step(z, t, last ? config.t_final - t : config.dt, f, ws);
    if ((i + 1) % observe_stride == 0 || last) {
      observer(last ? config.t_final : static_cast<double>(i + 1) * config.dt, z);
    }
  }
  return z;
}

/// Observer-free overload.
SpectralState integrate_trajectory(SpectralEngine& engine, SpectralState z,
                                   const ModelConfig& config);

/// Convenience overload planning its own engine.
template <class Obs>
SpectralState integrate_trajectory(SpectralState z, const ModelConfig& config,
                                   int observe_stride, Obs&& observer) {
  SpectralEngine engine(config.n, config.grid_size);
  return integrate_trajectory(engine, std::move(z), config, observe_stride,
                              std::forward<Obs>(observer));
}

}  // namespace tbh
