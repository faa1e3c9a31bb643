#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tbh/closure.hpp"
#include "tbh/ensemble.hpp"
#include "tbh/types.hpp"

namespace tbh {

// ============================================================
// Calibration of the closure parameter gamma against ensemble
// ("DNS") mean trajectories: a coarse logarithmic scan brackets
// the minimum of the misfit, golden-section search refines it.
// ============================================================

/// Outcome of a gamma fit.
struct FitResult {
  double gamma_star = 0.0;          ///< minimizing closure parameter
  double damping_time_coeff = 0.0;  ///< sqrt(beta/gamma*): e-folding time of mode 1
  double error_value = 0.0;         ///< misfit at gamma_star
  double rms_per_mode_step = 0.0;   ///< error normalized per real component sample
  int evaluations = 0;              ///< error-function evaluations spent
};

/// Search-space and tolerance knobs for fit_gamma.
struct FitOptions {
  double bracket_lo = 1.0;     ///< scan lower end
  double bracket_hi = 500.0;   ///< scan upper end
  int scan_points = 16;        ///< logarithmically spaced scan values
  double rel_tol = 1e-3;       ///< golden-section relative bracket width
};

/// Raised when the coarse scan fails to bracket an interior minimum; the
/// message carries the full (gamma, error) scan table.
class FitFailure : public std::runtime_error {
 public:
  FitFailure(const std::string& what,
             std::vector<std::pair<double, double>> scan)
      : std::runtime_error(what), scan_(std::move(scan)) {}
  const std::vector<std::pair<double, double>>& scan() const { return scan_; }

 private:
  std::vector<std::pair<double, double>> scan_;
};

/// Squared misfit between the closure run at `gamma` and the DNS means:
/// the sum over snapshots and over the first `error_modes` modes of the
/// squared differences of both real components.  `a0` is the closure
/// initial state (DNS means at t = 0, zero-padded in buffered setups);
/// `error_modes` <= config.m selects the modes that are scored (0 scores
/// all of them).  Throws std::invalid_argument if the closure snapshot
/// grid does not reproduce the DNS time grid.
double error_function(double gamma, const MomentSeries& dns,
                      const ClosureConfig& config, const ComplexVector& a0,
                      int error_modes = 0);

/// Minimizes error_function over gamma in [bracket_lo, bracket_hi].
/// Throws FitFailure if the scan's minimum lies on the bracket boundary.
FitResult fit_gamma(const MomentSeries& dns, const ClosureConfig& config,
                    const ComplexVector& a0, int error_modes = 0,
                    const FitOptions& options = {});

/// Root-mean-square misfit per scored real component per snapshot:
/// sqrt(error / (2 * error_modes * snapshots)).
double rms_per_mode_step(double error, int error_modes, int snapshots);

}  // namespace tbh
