#include "tbh/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

namespace tbh {

namespace {

// The FFTW planner mutates global state and is not thread-safe; plan
// creation and destruction are serialized here.  Plans use FFTW_ESTIMATE
// on purpose: estimated plans are a deterministic function of the problem
// geometry, while measured plans depend on machine timing and could change
// the floating-point result between otherwise identical runs.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

int default_grid_size(int n) {
  if (n < 1) throw std::invalid_argument("default_grid_size: n must be >= 1");
  int g = 1;
  while (g < 3 * n + 1) g *= 2;
  return g;
}

void validate(const ModelConfig& config) {
  if (config.n < 1) {
    throw std::invalid_argument("ModelConfig: n must be >= 1");
  }
  if (!(config.dt > 0.0)) {
    throw std::invalid_argument("ModelConfig: dt must be positive");
  }
  if (!(config.t_final >= 0.0)) {
    throw std::invalid_argument("ModelConfig: t_final must be non-negative");
  }
  if (config.grid_size != 0 && config.grid_size < 3 * config.n + 1) {
    throw std::invalid_argument(
        "ModelConfig: grid_size below the alias-free bound 3n+1");
  }
}

SpectralEngine::SpectralEngine(int n, int grid_size) : n_(n) {
  if (n < 1) throw std::invalid_argument("SpectralEngine: n must be >= 1");
  grid_ = (grid_size == 0) ? default_grid_size(n) : grid_size;
  if (grid_ < 3 * n + 1) {
    throw std::invalid_argument(
        "SpectralEngine: grid_size below the alias-free bound 3n+1");
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  phys_ = fftw_alloc_real(grid_);
  spec_ = reinterpret_cast<Complex*>(fftw_alloc_complex(grid_ / 2 + 1));
  plan_c2r_ = fftw_plan_dft_c2r_1d(grid_, reinterpret_cast<fftw_complex*>(spec_),
                                   phys_, FFTW_ESTIMATE);
  plan_r2c_ = fftw_plan_dft_r2c_1d(grid_, phys_,
                                   reinterpret_cast<fftw_complex*>(spec_),
                                   FFTW_ESTIMATE);
}

SpectralEngine::~SpectralEngine() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan_c2r_);
  fftw_destroy_plan(plan_r2c_);
  fftw_free(phys_);
  fftw_free(spec_);
}

void SpectralEngine::load_spectrum(const SpectralState& z) {
  if (z.size() != n_) {
    throw std::invalid_argument("SpectralEngine: state size does not match n");
  }
  const int half = grid_ / 2 + 1;
  spec_[0] = Complex(0.0, 0.0);
  for (int k = 1; k <= n_; ++k) spec_[k] = z[k - 1];
  std::fill(spec_ + n_ + 1, spec_ + half, Complex(0.0, 0.0));
}

void SpectralEngine::rhs(const SpectralState& z, SpectralState& dzdt) {
  load_spectrum(z);
  fftw_execute(plan_c2r_);
  for (int j = 0; j < grid_; ++j) phys_[j] *= phys_[j];
  fftw_execute(plan_r2c_);
  // (u^2)_k = spec_[k] / G; dz_k/dt = -(i k / 2) (u^2)_k.
  dzdt.resize(n_);
  for (int k = 1; k <= n_; ++k) {
    const double s = 0.5 * k / grid_;
    dzdt[k - 1] = Complex(s * spec_[k].imag(), -s * spec_[k].real());
  }
}

void SpectralEngine::to_physical(const SpectralState& z, RealVector& u) {
  load_spectrum(z);
  fftw_execute(plan_c2r_);
  u = Eigen::Map<const RealVector>(phys_, grid_);
}

double SpectralEngine::hamiltonian(const SpectralState& z) {
  load_spectrum(z);
  fftw_execute(plan_c2r_);
  double sum = 0.0;
  for (int j = 0; j < grid_; ++j) sum += phys_[j] * phys_[j] * phys_[j];
  // (1/G) sum u_j^3 is the exact mean of u^3 on an alias-free grid, and
  // the ordered triple sum in H equals that mean; the 1/6 prefactor remains.
  return sum / (6.0 * grid_);
}

SpectralState tbh_rhs(const SpectralState& z, int grid_size) {
  SpectralEngine engine(static_cast<int>(z.size()), grid_size);
  SpectralState out;
  engine.rhs(z, out);
  return out;
}

ComplexVector self_convolution(const SpectralState& z) {
  const int n = static_cast<int>(z.size());
  auto at = [&](int k) -> Complex {
    return k > 0 ? z[k - 1] : std::conj(z[-k - 1]);
  };
  ComplexVector s = ComplexVector::Zero(n);
  for (int k = 1; k <= n; ++k) {
    Complex acc(0.0, 0.0);
    for (int k1 = -n; k1 <= n; ++k1) {
      const int k2 = k - k1;
      if (k1 == 0 || k2 == 0 || k2 < -n || k2 > n) continue;
      acc += at(k1) * at(k2);
    }
    s[k - 1] = acc;
  }
  return s;
}

SpectralState tbh_rhs_direct(const SpectralState& z) {
  const int n = static_cast<int>(z.size());
  if (n < 1) throw std::invalid_argument("tbh_rhs_direct: empty state");
  const ComplexVector s = self_convolution(z);
  SpectralState out(n);
  for (int k = 1; k <= n; ++k) {
    out[k - 1] = Complex(0.0, -0.5 * k) * s[k - 1];
  }
  return out;
}

double energy(const SpectralState& z) { return z.squaredNorm(); }

double hamiltonian(const SpectralState& z) {
  const int n = static_cast<int>(z.size());
  if (n < 1) throw std::invalid_argument("hamiltonian: empty state");
  const ComplexVector s = self_convolution(z);
  double h = 0.0;
  for (int k = 0; k < n; ++k) h += (std::conj(z[k]) * s[k]).real();
  return h / 3.0;
}

RealVector to_physical(const SpectralState& z, int grid_size) {
  SpectralEngine engine(static_cast<int>(z.size()), grid_size);
  RealVector u;
  engine.to_physical(z, u);
  return u;
}

void rescale_to_energy(SpectralState& z, double target) {
  if (!(target >= 0.0)) {
    throw std::invalid_argument("rescale_to_energy: negative target");
  }
  const double e = energy(z);
  if (e == 0.0) {
    throw std::invalid_argument("rescale_to_energy: zero state");
  }
  z *= std::sqrt(target / e);
}

std::int64_t step_count(double t_final, double dt) {
  if (!(dt > 0.0) || !(t_final >= 0.0)) {
    throw std::invalid_argument("step_count: need dt > 0 and t_final >= 0");
  }
  if (t_final == 0.0) return 0;
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(t_final / dt - 1e-9)));
}

RealVector snapshot_times(double t_final, double dt, int observe_stride) {
  if (observe_stride < 1) {
    throw std::invalid_argument("snapshot_times: stride must be >= 1");
  }
  const std::int64_t steps = step_count(t_final, dt);
  std::vector<double> t;
  t.push_back(0.0);
  for (std::int64_t i = 1; i <= steps; ++i) {
    if (i % observe_stride == 0 || i == steps) {
      t.push_back(i == steps ? t_final : static_cast<double>(i) * dt);
    }
  }
  return Eigen::Map<const RealVector>(t.data(), t.size());
}

SpectralState integrate_trajectory(SpectralEngine& engine, SpectralState z,
                                   const ModelConfig& config) {
  return integrate_trajectory(engine, std::move(z), config, 1 << 30,
                              [](double, const SpectralState&) {});
}

}  // namespace tbh
