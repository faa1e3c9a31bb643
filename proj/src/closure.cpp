#include "tbh/closure.hpp"

#include <cmath>
#include <initializer_list>

#include "tbh/spectral.hpp"

namespace tbh {

namespace {

void validate(const ClosureConfig& config) {
  if (config.m < 1) throw std::invalid_argument("ClosureConfig: m must be >= 1");
  if (!(config.beta > 0.0)) {
    throw std::invalid_argument("ClosureConfig: beta must be positive");
  }
  if (!(config.gamma >= 0.0)) {
    throw std::invalid_argument("ClosureConfig: gamma must be non-negative");
  }
  if (!(config.dt > 0.0) || !(config.t_final >= 0.0)) {
    throw std::invalid_argument("ClosureConfig: need dt > 0 and t_final >= 0");
  }
}

/// Visits every resolved unordered pair (k1 >= k2, k1 + k2 = k in [1, m],
/// k1, k2 in {±1..±m}) in a fixed order shared by tables and rhs loops.
template <class F>
void for_each_resolved_pair(int m, F&& visit) {
  for (int k = 1; k <= m; ++k) {
    for (int k1 = (k + 1) / 2; k1 <= m; ++k1) {
      const int k2 = k - k1;
      if (k2 == 0 || k2 < -m) continue;
      visit(k1, k2);
    }
  }
}

/// a_j for signed j under the conjugate-symmetry convention.
inline Complex mode(const ComplexVector& a, int j) {
  return j > 0 ? a[j - 1] : std::conj(a[-j - 1]);
}

}  // namespace

double omega_factor(int k1, int k2) {
  if (k1 == 0 || k2 == 0) {
    throw std::invalid_argument("omega_factor: zero wavenumber");
  }
  const int k = k1 + k2;
  if (k == 0) {
    throw std::invalid_argument(
        "omega_factor: k1 + k2 = 0 multiplies the absent zero mode");
  }
  const int denom = k * (std::abs(k1) + std::abs(k2) + k);
  if (denom == 0) {
    // Happens only for k1, k2 both negative; those targets are never resolved.
    throw std::invalid_argument("omega_factor: pair outside the resolved range");
  }
  const double num = k1 * std::abs(k1) + k2 * std::abs(k2) - double(k) * k;
  return num / denom;
}

double m_coeff(int k, double t, double gamma, double beta) {
  if (!(t >= 0.0)) throw std::invalid_argument("m_coeff: t must be >= 0");
  if (!(gamma >= 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("m_coeff: need gamma >= 0 and beta > 0");
  }
  const double rate = std::sqrt(gamma / beta) * std::abs(k);
  return rate / beta * std::tanh(rate * t);
}

double damping_rate(int k, double t, double gamma, double beta) {
  return beta * m_coeff(k, t, gamma, beta);
}

OmegaTable OmegaTable::zeros(int m) {
  if (m < 1) throw std::invalid_argument("OmegaTable: m must be >= 1");
  OmegaTable table;
  table.m = m;
  for_each_resolved_pair(
      m, [&](int k1, int k2) { table.entries.push_back({k1, k2, 0.0}); });
  return table;
}

OmegaTable OmegaTable::stationary(int m) {
  OmegaTable table = zeros(m);
  for (Entry& e : table.entries) e.value = omega_factor(e.k1, e.k2);
  return table;
}

double OmegaTable::lookup(int k1, int k2) const {
  if (k1 < k2) std::swap(k1, k2);
  for (const Entry& e : entries) {
    if (e.k1 == k1 && e.k2 == k2) return e.value;
  }
  throw std::invalid_argument("OmegaTable: pair not resolved");
}

void omega_evolution_step(OmegaTable& table, double t_new, double dt,
                          double gamma, double beta) {
  if (!(dt > 0.0)) throw std::invalid_argument("omega_evolution_step: dt <= 0");
  for (OmegaTable::Entry& e : table.entries) {
    const int k = e.k1 + e.k2;
    const double d1 = damping_rate(e.k1, t_new, gamma, beta);
    const double d2 = damping_rate(e.k2, t_new, gamma, beta);
    const double dk = damping_rate(k, t_new, gamma, beta);
    const double forcing = (e.k1 * d1 + e.k2 * d2 - k * dk) / k;
    const double damping = d1 + d2 + dk;
    e.value = (e.value + dt * forcing) / (1.0 + dt * damping);
  }
}

void omega_evolution_step(ClosureState& state, const ClosureConfig& config,
                          double dt) {
  omega_evolution_step(state.omega, state.t + dt, dt, config.gamma, config.beta);
}

void closure_rhs(const ClosureState& state, const ClosureConfig& config,
                 ComplexVector& dadt) {
  validate(config);
  const int m = config.m;
  if (state.a.size() != m) {
    throw std::invalid_argument("closure_rhs: state size does not match m");
  }
  dadt = ComplexVector::Zero(m);

  if (config.variant != ClosureVariant::linearized) {
    const bool stationary = config.variant == ClosureVariant::stationary;
    if (!stationary && state.omega.m != m) {
      throw std::invalid_argument("closure_rhs: omega table does not match m");
    }
    std::size_t index = 0;
    ComplexVector sum = ComplexVector::Zero(m);
    for_each_resolved_pair(m, [&](int k1, int k2) {
      const double w =
          stationary ? omega_factor(k1, k2) : state.omega.entries[index].value;
      ++index;
      const double mult = (k1 == k2) ? 1.0 : 2.0;
      sum[k1 + k2 - 1] += mult * (1.0 + w) * mode(state.a, k1) * mode(state.a, k2);
    });
    for (int k = 1; k <= m; ++k) {
      dadt[k - 1] -= Complex(0.0, 0.5 * k) * sum[k - 1];
    }
  }

  for (int k = 1; k <= m; ++k) {
    const double d =
        (config.variant == ClosureVariant::stationary)
            ? std::sqrt(config.gamma / config.beta) * k
            : damping_rate(k, state.t, config.gamma, config.beta);
    dadt[k - 1] -= d * state.a[k - 1];
  }
}

MomentSeries integrate_closure(const ComplexVector& a0,
                               const ClosureConfig& config, int observe_stride) {
  validate(config);
  if (observe_stride < 1) {
    throw std::invalid_argument("integrate_closure: stride must be >= 1");
  }
  if (a0.size() != config.m) {
    throw std::invalid_argument("integrate_closure: a0 size does not match m");
  }
  if (!detail::all_finite(a0)) {
    throw std::invalid_argument("integrate_closure: non-finite initial state");
  }

  MomentSeries series;
  series.times = snapshot_times(config.t_final, config.dt, observe_stride);
  const int snapshots = static_cast<int>(series.times.size());
  series.means.resize(snapshots, config.m);
  series.mean_energy.resize(snapshots);
  series.mean_hamiltonian.resize(snapshots);

  ClosureState state;
  state.a = a0;
  state.t = 0.0;
  state.omega = config.variant == ClosureVariant::stationary
                    ? OmegaTable::stationary(config.m)
                    : OmegaTable::zeros(config.m);

  int row = 0;
  auto record = [&](const ComplexVector& a) {
    series.means.row(row) = a;
    series.mean_energy[row] = energy(a);
    series.mean_hamiltonian[row] = hamiltonian(a);
    ++row;
  };
  record(state.a);

  // Stage evaluations reuse `state` for its Omega table (held fixed during
  // the step); only a and t are swapped in and out.
  Rk4Workspace<ComplexVector> ws;
  auto f = [&](const ComplexVector& y, double t, ComplexVector& out) {
    state.a = y;
    state.t = t;
    closure_rhs(state, config, out);
  };
  const std::int64_t steps = step_count(config.t_final, config.dt);
  ComplexVector a = a0;
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * config.dt;
    const bool last = (i + 1 == steps);
    const double h = last ? config.t_final - t : config.dt;
    rk4_step(a, t, h, f, ws);
    if (config.variant == ClosureVariant::nonstationary) {
      omega_evolution_step(state.omega, t + h, h, config.gamma, config.beta);
    }
    if ((i + 1) % observe_stride == 0 || last) {
      record(a);
    }
  }
  return series;
}

Complex ValueFunctionCoeffs::n_coeff(int k1, int k2, int k3) const {
  for (int k : {k1, k2, k3}) {
    if (k == 0 || std::abs(k) > m) {
      throw std::invalid_argument("n_coeff: index outside {±1..±m}");
    }
  }
  if (k1 + k2 + k3 != 0) return Complex(0.0, 0.0);
  const double num = k1 * std::abs(k1) + k2 * std::abs(k2) + k3 * std::abs(k3);
  const double den = std::abs(k1) + std::abs(k2) + std::abs(k3);
  return Complex(0.0, num / (6.0 * beta * beta * den));
}

ValueFunctionCoeffs value_coeffs(double gamma, double beta, int m) {
  if (!(beta > 0.0)) throw std::invalid_argument("value_coeffs: beta <= 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("value_coeffs: gamma < 0");
  if (m < 1) throw std::invalid_argument("value_coeffs: m < 1");
  ValueFunctionCoeffs coeffs;
  coeffs.m = m;
  coeffs.beta = beta;
  coeffs.gamma = gamma;
  coeffs.m_saturated.resize(m);
  for (int k = 1; k <= m; ++k) {
    coeffs.m_saturated[k - 1] = std::sqrt(gamma / (beta * beta * beta)) * k;
  }
  return coeffs;
}

double entropy(const ComplexVector& a, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("entropy: beta <= 0");
  return -beta * a.squaredNorm();
}

double cost_function(const ComplexVector& a, const ComplexVector& adot,
                     double gamma, double beta) {
  if (a.size() != adot.size()) {
    throw std::invalid_argument("cost_function: size mismatch");
  }
  if (!(beta > 0.0) || !(gamma >= 0.0)) {
    throw std::invalid_argument("cost_function: need beta > 0 and gamma >= 0");
  }
  const int m = static_cast<int>(a.size());
  const ComplexVector lambda = beta * a;
  const ComplexVector lambda_dot = beta * adot;
  const ComplexVector conv = self_convolution(lambda);
  double cost = 0.0;
  for (int k = 1; k <= m; ++k) {
    const Complex residual =
        lambda_dot[k - 1] + Complex(0.0, 0.5 * k / beta) * conv[k - 1];
    cost += std::norm(residual) / beta +
            gamma * k * k / (beta * beta) * std::norm(lambda[k - 1]);
  }
  return cost;
}

}  // namespace tbh
