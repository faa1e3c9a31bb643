#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace tbh {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Spectral state of the n-mode Galerkin truncation.  Entry j holds the
/// coefficient z_{j+1} of wavenumber k = j+1; the zero mode is identically
/// zero and negative wavenumbers are implied by z_{-k} = conj(z_k), so
/// neither is ever stored.
using SpectralState = ComplexVector;

/// Parameters of the truncated system and its time discretization.
struct ModelConfig {
  int n = 50;             ///< number of retained positive wavenumbers
  double beta = 5.0;      ///< inverse temperature of the Gibbs measure
  double dt = 5e-4;       ///< RK4 time step
  double t_final = 1.5;   ///< integration horizon
  int grid_size = 0;      ///< collocation points; 0 selects the default
};

/// Smallest power of two with at least 3n+1 points, the cheapest FFT-friendly
/// grid on which the quadratic product of degree-n data is alias-free.
int default_grid_size(int n);

/// Throws std::invalid_argument if the configuration violates its contract
/// (n >= 1, dt > 0, t_final >= 0, grid_size either 0 or >= 3n+1).
void validate(const ModelConfig& config);

/// Signals a diverging trajectory: a non-finite value appeared in the state.
class BlowupError : public std::runtime_error {
 public:
  explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tbh
