// Command-line driver for the truncated Burgers-Hopf toolkit.
//
// Subcommands:
//   dns         ensemble truth run -> dns.csv
//   closure     reduced-model run at a fixed gamma -> closure.csv
//   fit         calibrate gamma against a DNS series -> full file set
//   experiment  named pipeline (close|mid|far|extreme|buffer|custom)
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 fit failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "tbh/experiment.hpp"

namespace {

/// Runs `dns`: base draw plus ensemble, written to out/dns.csv.
int cmd_dns(const tbh::ExperimentSpec& spec) {
  const tbh::ComplexVector base = tbh::experiment_base(spec);
  const tbh::MomentSeries dns =
      tbh::run_ensemble(tbh::make_ensemble_config(spec, base));
  std::filesystem::create_directories(spec.output_dir);
  const std::string path = spec.output_dir + "/dns.csv";
  tbh::write_moment_csv(path, dns);
  std::printf("dns: %d snapshots x %d modes -> %s\n", dns.snapshots(),
              dns.modes(), path.c_str());
  return 0;
}

/// Runs `closure`: reduced model from a_k(0) = r_dev * b_k at fixed gamma.
int cmd_closure(const tbh::ExperimentSpec& spec) {
  double gamma = 0.0;
  try {
    gamma = std::stod(spec.gamma);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--gamma", "closure needs a numeric gamma");
  }
  if (!(gamma >= 0.0)) {
    throw CLI::ValidationError("--gamma", "gamma must be >= 0");
  }
  const tbh::ComplexVector base = tbh::experiment_base(spec);
  tbh::ComplexVector a0 = tbh::ComplexVector::Zero(tbh::closure_modes(spec));
  a0.head(spec.m_resolved) = spec.r_dev * base;
  const tbh::MomentSeries series = tbh::integrate_closure(
      a0, tbh::make_closure_config(spec, gamma), spec.observe_stride);
  std::filesystem::create_directories(spec.output_dir);
  const std::string path = spec.output_dir + "/closure.csv";
  tbh::write_moment_csv(path, series);
  std::printf("closure: gamma = %g -> %s\n", gamma, path.c_str());
  return 0;
}

/// Runs `fit`: calibrates gamma against an existing or in-flight DNS run.
int cmd_fit(tbh::ExperimentSpec spec, const std::string& dns_path) {
  tbh::ExperimentResult result;
  if (dns_path.empty()) {
    result = tbh::run_experiment(spec);
  } else {
    result.dns = tbh::read_moment_csv(dns_path);
    const tbh::ComplexVector a0 = tbh::closure_initial(spec, result.dns);
    const int scored = spec.buffered ? spec.m_resolved : 0;
    result.fit = tbh::fit_gamma(result.dns, tbh::make_closure_config(spec, 0.0),
                                a0, scored, spec.fit_options);
    result.fitted = true;
    result.gamma_used = result.fit.gamma_star;
    result.closure = tbh::integrate_closure(
        a0, tbh::make_closure_config(spec, result.gamma_used),
        spec.observe_stride);
  }
  tbh::write_experiment(spec, result);
  std::printf("fit: gamma* = %.6g damping_time_coeff = %.4g rms = %.4g -> %s\n",
              result.fit.gamma_star, result.fit.damping_time_coeff,
              result.fit.rms_per_mode_step,
              (spec.output_dir + "/report.txt").c_str());
  return 0;
}

/// Runs `experiment NAME`: the full pipeline with the named preset.
int cmd_experiment(const tbh::ExperimentSpec& spec) {
  const tbh::ExperimentResult result = tbh::run_experiment(spec);
  const auto files = tbh::write_experiment(spec, result);
  std::printf("experiment %s: gamma = %.6g damping_time_coeff = %.4g "
              "rms = %.4g\n",
              spec.name.c_str(), result.gamma_used,
              result.fit.damping_time_coeff, result.fit.rms_per_mode_step);
  for (const auto& f : files) std::printf("  wrote %s\n", f.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated Burgers-Hopf simulation and closure toolkit"};
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value configuration file");

  tbh::ExperimentSpec spec;
  std::string experiment_name = "custom";
  std::string dns_path;
  bool full_scale = false;

  auto* members =
      app.add_option("--members", spec.ensemble_size, "Ensemble size")
          ->check(CLI::PositiveNumber);
  app.add_option("--seed", spec.seed, "Master seed for all sampling");
  auto* rdev = app.add_option("--rdev", spec.r_dev,
                              "Initial mean scale r_dev (b_k multiplier)");
  auto* buffered = app.add_flag("--buffered", spec.buffered,
                                "Add m buffer modes with zero initial mean");
  app.add_option("--gamma", spec.gamma, "Closure parameter value, or 'fit'");
  app.add_option("--out", spec.output_dir, "Output directory");
  app.add_flag("--full-scale", full_scale,
               "Full-scale ensemble (10^6 members) unless --members is given");
  app.add_option("--threads", spec.threads, "Ensemble worker threads (0 = auto)");
  app.add_option("--n", spec.model.n, "Retained DNS modes")
      ->check(CLI::PositiveNumber);
  app.add_option("--m", spec.m_resolved, "Resolved closure modes")
      ->check(CLI::PositiveNumber);
  app.add_option("--beta", spec.model.beta, "Inverse temperature")
      ->check(CLI::PositiveNumber);
  app.add_option("--dt", spec.model.dt, "RK4 step")->check(CLI::PositiveNumber);
  app.add_option("--t-final", spec.model.t_final, "Horizon")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--grid", spec.model.grid_size,
                 "Collocation grid size (0 = smallest alias-free power of 2)");
  app.add_option("--stride", spec.observe_stride, "Steps between snapshots")
      ->check(CLI::PositiveNumber);
  app.add_option("--spinup", spec.spinup_time, "Base-draw equilibration time")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--bracket-lo", spec.fit_options.bracket_lo, "Fit bracket low")
      ->check(CLI::PositiveNumber);
  app.add_option("--bracket-hi", spec.fit_options.bracket_hi, "Fit bracket high")
      ->check(CLI::PositiveNumber);
  app.add_option("--scan-points", spec.fit_options.scan_points,
                 "Coarse scan points");
  app.add_option("--fit-tol", spec.fit_options.rel_tol,
                 "Golden-section relative tolerance");

  auto* dns_cmd = app.add_subcommand("dns", "Run the ensemble truth simulation");
  auto* closure_cmd =
      app.add_subcommand("closure", "Integrate the closure at fixed gamma");
  auto* fit_cmd = app.add_subcommand("fit", "Calibrate gamma against DNS data");
  fit_cmd->add_option("--dns", dns_path,
                      "Existing DNS CSV (otherwise generated in-flight)");
  auto* experiment_cmd = app.add_subcommand(
      "experiment", "Full pipeline: close|mid|far|extreme|buffer|custom");
  experiment_cmd->add_option("name", experiment_name, "Experiment preset");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (full_scale && members->count() == 0) spec.ensemble_size = 1000000;
    if (*experiment_cmd) {
      const tbh::ExperimentSpec preset = tbh::named_experiment(experiment_name);
      spec.name = preset.name;
      if (rdev->count() == 0) spec.r_dev = preset.r_dev;
      if (buffered->count() == 0) spec.buffered = preset.buffered;
      return cmd_experiment(spec);
    }
    if (*dns_cmd) return cmd_dns(spec);
    if (*closure_cmd) return cmd_closure(spec);
    if (*fit_cmd) return cmd_fit(spec, dns_path);
    return 1;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const tbh::FitFailure& e) {
    std::fprintf(stderr, "fit failure: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
}
