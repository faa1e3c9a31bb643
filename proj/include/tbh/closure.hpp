#pragma once

#include <vector>

#include "tbh/ensemble.hpp"
#include "tbh/types.hpp"

namespace tbh {

// ============================================================
// Reduced statistical closure for the mean of the first m modes.
//
// The mean field a_k obeys a modified truncation of the original
// dynamics: a fractional damping -d_k(t) a_k with
//
//   d_k(t) = sqrt(g/b) |k| tanh( sqrt(g/b) |k| t ),    (g = gamma, b = beta)
//
// and interaction corrections (1 + Omega_{k1,k2}(t)) on the resolved
// quadratic terms, where Omega relaxes toward the stationary factor
// omega(k1,k2).  One scalar gamma controls the whole family.
// ============================================================

/// Which member of the closure family to integrate.
enum class ClosureVariant {
  nonstationary,  ///< time-dependent damping and evolving Omega (default)
  stationary,     ///< saturated damping, Omega frozen at omega(k1,k2)
  linearized,     ///< damping only; exact solution a_k(0)/cosh(...)
};

/// Parameters of one closure integration.
struct ClosureConfig {
  int m = 5;              ///< resolved modes
  double beta = 5.0;      ///< inverse temperature
  double gamma = 0.0;     ///< closure parameter; 0 recovers the bare truncation
  double dt = 5e-4;       ///< RK4 step
  double t_final = 1.5;   ///< horizon
  ClosureVariant variant = ClosureVariant::nonstationary;
};

/// Stationary interaction factor
///   omega(k1,k2) = [k1|k1| + k2|k2| - (k1+k2)^2] /
///                  [(k1+k2) (|k1| + |k2| + k1 + k2)].
/// Defined for nonzero k1, k2 with k1 + k2 != 0.
double omega_factor(int k1, int k2);

/// Damping kernel M_k(t) = sqrt(g/b^3) |k| tanh(sqrt(g/b) |k| t).
double m_coeff(int k, double t, double gamma, double beta);

/// Damping rate d_k(t) = beta * M_k(t); the stationary variant uses the
/// saturated value sqrt(g/b) |k|.
double damping_rate(int k, double t, double gamma, double beta);

/// Time-dependent interaction factors Omega_{k1,k2}(t) for all resolved
/// pairs, stored once per unordered pair (k1 >= k2, 1 <= k1+k2 <= m).
struct OmegaTable {
  struct Entry {
    int k1;
    int k2;
    double value;
  };
  int m = 0;
  std::vector<Entry> entries;

  /// All-zero table (the Omega initial condition).
  static OmegaTable zeros(int m);
  /// Table frozen at the stationary factors omega(k1,k2).
  static OmegaTable stationary(int m);
  /// Value for an ordered pair; throws if the pair is not resolved.
  double lookup(int k1, int k2) const;
};

/// Mean state of the reduced model between steps.
struct ClosureState {
  ComplexVector a;    ///< resolved means a_1..a_m
  double t = 0.0;     ///< current time
  OmegaTable omega;   ///< interaction factors at time t
};

/// One implicit-Euler update of every Omega entry from t_new - dt to t_new:
///   Omega_new = (Omega_old + dt * F(t_new)) / (1 + dt * D(t_new))
/// with D = d_{k1} + d_{k2} + d_k and
/// F = (k1 d_{k1} + k2 d_{k2} - k d_k) / k, whose fixed point at saturated
/// damping is exactly omega(k1,k2).
void omega_evolution_step(OmegaTable& table, double t_new, double dt,
                          double gamma, double beta);

/// Right-hand side of the closure at the state's time.
void closure_rhs(const ClosureState& state, const ClosureConfig& config,
                 ComplexVector& dadt);

/// Integrates the closure from a(0) = a0, recording snapshots exactly like
/// the ensemble (mean modes plus E and H of the mean field truncated to m).
/// The quadratic flow and damping advance by classical RK4 with damping
/// evaluated at the stage times; Omega is held during the step and updated
/// once per step afterwards.
MomentSeries integrate_closure(const ComplexVector& a0,
                               const ClosureConfig& config,
                               int observe_stride = 10);

// ------------------------------------------------------------
// Value-function ingredients behind the closure.
// ------------------------------------------------------------

/// Coefficients of the quadratic/cubic value function ansatz.
struct ValueFunctionCoeffs {
  int m = 0;
  double beta = 0.0;
  double gamma = 0.0;
  RealVector m_saturated;  ///< M_k at saturation, sqrt(g/b^3) |k|, k = 1..m

  /// Cubic coefficient N_{k1,k2,k3} on indices in {±1..±m}; zero when the
  /// triple does not sum to zero.  Throws on a zero or out-of-range index.
  Complex n_coeff(int k1, int k2, int k3) const;
};

/// Builds the coefficient family for (gamma, beta, m).
ValueFunctionCoeffs value_coeffs(double gamma, double beta, int m);

/// Entropy of the trial density relative to equilibrium, s = -beta sum |a_k|^2.
double entropy(const ComplexVector& a, double beta);

/// Lagrangian cost rate of a mean path with velocity adot:
///   L = sum_k (1/b)|lambda_k' + (ik/2b) sum_{k1+k2=k} lambda_{k1} lambda_{k2}|^2
///       + (g k^2 / b^2) |lambda_k|^2,   lambda = beta a.
double cost_function(const ComplexVector& a, const ComplexVector& adot,
                     double gamma, double beta);

}  // namespace tbh
