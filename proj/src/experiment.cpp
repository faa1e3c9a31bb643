#include "tbh/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace tbh {

namespace {

constexpr double kCloseRdev = 0.31622776601683794;  // 1/sqrt(10)
constexpr double kFarRdev = 3.1622776601683795;     // sqrt(10)

}  // namespace

int closure_modes(const ExperimentSpec& spec) {
  return spec.buffered ? 2 * spec.m_resolved : spec.m_resolved;
}

ExperimentSpec named_experiment(const std::string& name) {
  ExperimentSpec spec;
  spec.name = name;
  if (name == "close") {
    spec.r_dev = kCloseRdev;
  } else if (name == "mid") {
    spec.r_dev = 1.0;
  } else if (name == "far") {
    spec.r_dev = kFarRdev;
  } else if (name == "extreme") {
    spec.r_dev = 10.0;
  } else if (name == "buffer") {
    spec.r_dev = kFarRdev;
    spec.buffered = true;
  } else if (name != "custom") {
    throw std::invalid_argument("named_experiment: unknown experiment " + name);
  }
  return spec;
}

ComplexVector experiment_base(const ExperimentSpec& spec) {
  return draw_equilibrium_base(spec.model, spec.m_resolved, spec.spinup_time,
                               spec.seed);
}

EnsembleConfig make_ensemble_config(const ExperimentSpec& spec,
                                    const ComplexVector& base) {
  EnsembleConfig config;
  config.model = spec.model;
  config.base = base;
  config.r_dev = spec.r_dev;
  config.ensemble_size = spec.ensemble_size;
  config.seed = spec.seed;
  config.observe_stride = spec.observe_stride;
  config.record_modes = closure_modes(spec);
  config.threads = spec.threads;
  config.block_size = spec.block_size;
  return config;
}

ClosureConfig make_closure_config(const ExperimentSpec& spec, double gamma) {
  ClosureConfig config;
  config.m = closure_modes(spec);
  config.beta = spec.model.beta;
  config.gamma = gamma;
  config.dt = spec.model.dt;
  config.t_final = spec.model.t_final;
  config.variant = ClosureVariant::nonstationary;
  return config;
}

ComplexVector closure_initial(const ExperimentSpec& spec,
                              const MomentSeries& dns) {
  const int m = closure_modes(spec);
  if (dns.snapshots() < 1 || dns.modes() < spec.m_resolved) {
    throw std::invalid_argument("closure_initial: DNS series too narrow");
  }
  ComplexVector a0 = ComplexVector::Zero(m);
  // Buffer modes (if any) start from mean zero; the observed means seed
  // only the first m_resolved entries.
  const int seeded = std::min<int>(spec.m_resolved, dns.modes());
  a0.head(seeded) = dns.means.row(0).head(seeded);
  return a0;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult result;
  result.base = experiment_base(spec);
  result.dns = run_ensemble(make_ensemble_config(spec, result.base));
  const ComplexVector a0 = closure_initial(spec, result.dns);
  const int scored = spec.buffered ? spec.m_resolved : 0;

  if (spec.gamma == "fit") {
    const ClosureConfig config = make_closure_config(spec, 0.0);
    result.fit = fit_gamma(result.dns, config, a0, scored, spec.fit_options);
    result.fitted = true;
    result.gamma_used = result.fit.gamma_star;
  } else {
    std::size_t parsed = 0;
    double gamma = 0.0;
    try {
      gamma = std::stod(spec.gamma, &parsed);
    } catch (const std::exception&) {
      parsed = 0;
    }
    if (spec.gamma.empty() || parsed != spec.gamma.size() || !(gamma >= 0.0)) {
      throw std::invalid_argument("run_experiment: gamma must be >= 0 or 'fit'");
    }
    const ClosureConfig config = make_closure_config(spec, 0.0);
    result.fit.gamma_star = gamma;
    result.fit.damping_time_coeff = std::sqrt(spec.model.beta / gamma);
    result.fit.error_value = error_function(gamma, result.dns, config, a0, scored);
    const int scored_modes = scored == 0 ? closure_modes(spec) : scored;
    result.fit.rms_per_mode_step = rms_per_mode_step(
        result.fit.error_value, scored_modes, result.dns.snapshots());
    result.fit.evaluations = 1;
    result.fitted = false;
    result.gamma_used = gamma;
  }

  const ClosureConfig replay = make_closure_config(spec, result.gamma_used);
  result.closure = integrate_closure(a0, replay, spec.observe_stride);
  return result;
}

MomentSeries difference_series(const MomentSeries& closure,
                               const MomentSeries& dns) {
  if (closure.snapshots() != dns.snapshots() ||
      (closure.times - dns.times).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("difference_series: time grids differ");
  }
  const int modes = std::min(closure.modes(), dns.modes());
  MomentSeries diff;
  diff.times = dns.times;
  diff.means = closure.means.leftCols(modes) - dns.means.leftCols(modes);
  diff.mean_energy = closure.mean_energy - dns.mean_energy;
  diff.mean_hamiltonian = closure.mean_hamiltonian - dns.mean_hamiltonian;
  return diff;
}

std::vector<std::string> write_experiment(const ExperimentSpec& spec,
                                          const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.output_dir);
  const std::string dir = spec.output_dir + "/";
  std::vector<std::string> files;

  write_moment_csv(dir + "dns.csv", result.dns);
  files.push_back(dir + "dns.csv");
  write_moment_csv(dir + "closure.csv", result.closure);
  files.push_back(dir + "closure.csv");
  write_moment_csv(dir + "diff.csv",
                   difference_series(result.closure, result.dns));
  files.push_back(dir + "diff.csv");

  const std::string report_path = dir + "report.txt";
  write_report(report_path, experiment_report(spec, result, files));
  files.push_back(report_path);
  return files;
}

Report experiment_report(const ExperimentSpec& spec,
                         const ExperimentResult& result,
                         const std::vector<std::string>& files) {
  Report report;
  report.emplace_back("name", spec.name);
  report.emplace_back("n", std::to_string(spec.model.n));
  report.emplace_back("m_resolved", std::to_string(spec.m_resolved));
  report.emplace_back("closure_modes", std::to_string(closure_modes(spec)));
  report.emplace_back("beta", format_full(spec.model.beta));
  report.emplace_back("dt", format_full(spec.model.dt));
  report.emplace_back("t_final", format_full(spec.model.t_final));
  report.emplace_back("ensemble_size", std::to_string(spec.ensemble_size));
  report.emplace_back("seed", std::to_string(spec.seed));
  report.emplace_back("r_dev", format_full(spec.r_dev));
  report.emplace_back("buffered", spec.buffered ? "true" : "false");
  report.emplace_back("observe_stride", std::to_string(spec.observe_stride));
  report.emplace_back("spinup_time", format_full(spec.spinup_time));
  report.emplace_back("gamma_mode", result.fitted ? "fit" : "fixed");
  report.emplace_back("gamma_star", format_full(result.fit.gamma_star));
  report.emplace_back("damping_time_coeff",
                      format_full(result.fit.damping_time_coeff));
  report.emplace_back("error_value", format_full(result.fit.error_value));
  report.emplace_back("rms_per_mode_step",
                      format_full(result.fit.rms_per_mode_step));
  report.emplace_back("evaluations", std::to_string(result.fit.evaluations));
  for (int k = 1; k <= spec.m_resolved; ++k) {
    report.emplace_back("damping_time_k" + std::to_string(k),
                        format_full(result.fit.damping_time_coeff / k));
  }
  std::string manifest;
  for (const auto& f : files) {
    if (!manifest.empty()) manifest += ',';
    manifest += f;
  }
  report.emplace_back("files", manifest);
  return report;
}

}  // namespace tbh
