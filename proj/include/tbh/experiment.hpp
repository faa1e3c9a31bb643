#pragma once

#include <string>
#include <vector>

#include "tbh/calibration.hpp"
#include "tbh/closure.hpp"
#include "tbh/ensemble.hpp"
#include "tbh/io.hpp"

namespace tbh {

// ============================================================
// The reproducible experiment pipeline: equilibrated base draw,
// ensemble truth run, gamma fit, closure replay, CSV + report
// emission.  The command-line driver is a thin veneer over this.
// ============================================================

/// Everything a run depends on; two equal specs produce identical bytes.
struct ExperimentSpec {
  std::string name = "custom";
  ModelConfig model;                ///< n=50, beta=5, dt=5e-4, t_final=1.5
  int m_resolved = 5;               ///< modes carrying the displaced mean
  double r_dev = 0.31622776601683794;  ///< mean scale; close case 1/sqrt(10)
  bool buffered = false;            ///< add m buffer modes with zero mean
  std::int64_t ensemble_size = 100000;
  std::uint64_t seed = 2424;
  std::string gamma = "fit";        ///< "fit" or a fixed numeric value
  std::string output_dir = "out";
  int observe_stride = 10;
  double spinup_time = 100.0;       ///< base-draw equilibration time
  int threads = 0;                  ///< ensemble workers; 0 = hardware
  int block_size = 1024;
  FitOptions fit_options;
};

/// Modes integrated by the closure: m, or 2m when buffered.
int closure_modes(const ExperimentSpec& spec);

/// Named presets close, mid, far, extreme, buffer (by r_dev and buffering);
/// "custom" returns the defaults.  Throws std::invalid_argument otherwise.
ExperimentSpec named_experiment(const std::string& name);

/// Equilibrated base draw b_1..b_m behind the displaced means.
ComplexVector experiment_base(const ExperimentSpec& spec);

/// Ensemble configuration for the truth run (records closure_modes modes).
EnsembleConfig make_ensemble_config(const ExperimentSpec& spec,
                                    const ComplexVector& base);

/// Closure configuration at a given gamma.
ClosureConfig make_closure_config(const ExperimentSpec& spec, double gamma);

/// Closure initial state: DNS means at t=0, buffer half zeroed.
ComplexVector closure_initial(const ExperimentSpec& spec,
                              const MomentSeries& dns);

/// Products of a full pipeline run.
struct ExperimentResult {
  ComplexVector base;       ///< b_k
  MomentSeries dns;         ///< ensemble truth
  MomentSeries closure;     ///< closure replay at gamma_used
  FitResult fit;            ///< fit outcome (or fixed-gamma diagnostics)
  bool fitted = false;      ///< true if gamma came from fit_gamma
  double gamma_used = 0.0;
};

/// dns + (fit | fixed gamma) + closure replay.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Element-wise closure - dns over the shared columns.
MomentSeries difference_series(const MomentSeries& closure,
                               const MomentSeries& dns);

/// Writes dns.csv, closure.csv, diff.csv and report.txt into
/// spec.output_dir (created if missing); returns the file manifest.
std::vector<std::string> write_experiment(const ExperimentSpec& spec,
                                          const ExperimentResult& result);

/// The report block embedded in report.txt.
Report experiment_report(const ExperimentSpec& spec,
                         const ExperimentResult& result,
                         const std::vector<std::string>& files);

}  // namespace tbh
