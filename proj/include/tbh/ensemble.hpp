#pragma once

#include <cstdint>
#include <vector>

#include "tbh/sampling.hpp"
#include "tbh/spectral.hpp"
#include "tbh/types.hpp"

namespace tbh {

// ============================================================
// Monte Carlo ensembles of the truncated system.  Members are
// sampled from a trial density, integrated independently, and
// reduced to per-snapshot moments.  The reduction order is fixed
// by the member partition, never by the parallel schedule, so a
// run is bit-reproducible for any worker count.
// ============================================================

/// Full specification of one ensemble run.
struct EnsembleConfig {
  ModelConfig model;            ///< dynamics and time discretization
  ComplexVector base;           ///< base state b_k; means are r_dev * b_k
  double r_dev = 0.31622776601683794;  ///< mean amplitude factor (1/sqrt(10))
  std::int64_t ensemble_size = 100000;
  std::uint64_t seed = 0;
  int observe_stride = 10;      ///< steps between recorded snapshots
  int record_modes = 5;         ///< modes kept in the moment series
  int threads = 0;              ///< worker count; 0 uses the hardware default
  int block_size = 1024;        ///< members per reduction block
};

/// Per-snapshot ensemble moments: mean modes, mean energy, mean Hamiltonian.
struct MomentSeries {
  RealVector times;             ///< snapshot times, length S
  ComplexMatrix means;          ///< S x M mean of z_1..z_M
  RealVector mean_energy;       ///< S ensemble means of E
  RealVector mean_hamiltonian;  ///< S ensemble means of H

  int snapshots() const { return static_cast<int>(times.size()); }
  int modes() const { return static_cast<int>(means.cols()); }
};

/// Integrates the full ensemble and returns the reduced moments.
/// Throws BlowupError annotated with member index and seed if any
/// member diverges.
MomentSeries run_ensemble(const EnsembleConfig& config);

/// Draws one Gibbs sample, relaxes it for `spinup_time`, and returns the
/// first m modes: the base state b_k used to build displaced means.
ComplexVector draw_equilibrium_base(const ModelConfig& model, int m,
                                    double spinup_time, std::uint64_t seed);

/// Normalized equilibrium autocorrelations of modes 1..k_max from one long
/// trajectory: entry (k-1, j) is Re< z_k(t) conj(z_k(t+lag_j)) > / < |z_k|^2 >
/// with the time average over the whole run.  Lags are snapped to multiples
/// of (model.dt * sample_stride).  Throws std::runtime_error if the run is
/// shorter than 100 decorrelation times of the slowest requested mode.
Eigen::MatrixXd equilibrium_autocorrelation(const ModelConfig& model, int k_max,
                                            const std::vector<double>& lags,
                                            double run_length, std::uint64_t seed,
                                            int sample_stride = 10);

/// First crossing of corr below 1/e, linearly interpolated between lag
/// samples.  Throws std::runtime_error if the correlation never crosses.
double efolding_time(const std::vector<double>& lags,
                     const Eigen::VectorXd& corr);

}  // namespace tbh
