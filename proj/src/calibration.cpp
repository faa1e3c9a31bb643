#include "tbh/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tbh {

namespace {

/// Snapshot stride reproducing the DNS time grid with the closure step.
int infer_stride(const MomentSeries& dns, double dt) {
  if (dns.snapshots() < 2) return 1;
  const double delta = dns.times[1] - dns.times[0];
  const auto stride = static_cast<std::int64_t>(std::llround(delta / dt));
  if (stride < 1 || std::abs(stride * dt - delta) > 1e-9) {
    throw std::invalid_argument(
        "error_function: DNS snapshot spacing is not a multiple of the "
        "closure step");
  }
  return static_cast<int>(stride);
}

std::string format_scan(const std::vector<std::pair<double, double>>& scan) {
  std::string out;
  char line[64];
  for (const auto& [gamma, error] : scan) {
    std::snprintf(line, sizeof line, "\n  gamma = %-12.6g error = %.6g", gamma,
                  error);
    out += line;
  }
  return out;
}

}  // namespace

double error_function(double gamma, const MomentSeries& dns,
                      const ClosureConfig& config, const ComplexVector& a0,
                      int error_modes) {
  if (!(gamma >= 0.0)) {
    throw std::invalid_argument("error_function: gamma must be >= 0");
  }
  if (dns.snapshots() < 1) {
    throw std::invalid_argument("error_function: empty DNS series");
  }
  const int scored = error_modes == 0 ? std::min<int>(config.m, dns.modes())
                                      : error_modes;
  if (scored < 1 || scored > config.m || scored > dns.modes()) {
    throw std::invalid_argument("error_function: error_modes out of range");
  }

  ClosureConfig run = config;
  run.gamma = gamma;
  run.t_final = dns.times[dns.snapshots() - 1];
  const int stride = infer_stride(dns, run.dt);

  const RealVector grid = snapshot_times(run.t_final, run.dt, stride);
  if (grid.size() != dns.times.size() ||
      (grid - dns.times).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument(
        "error_function: closure snapshot grid does not match the DNS grid");
  }

  const MomentSeries closure = integrate_closure(a0, run, stride);
  double error = 0.0;
  for (int s = 0; s < dns.snapshots(); ++s) {
    for (int k = 0; k < scored; ++k) {
      const Complex d = closure.means(s, k) - dns.means(s, k);
      error += d.real() * d.real() + d.imag() * d.imag();
    }
  }
  return error;
}

double rms_per_mode_step(double error, int error_modes, int snapshots) {
  if (error_modes < 1 || snapshots < 1) {
    throw std::invalid_argument("rms_per_mode_step: empty sample");
  }
  return std::sqrt(error / (2.0 * error_modes * snapshots));
}

FitResult fit_gamma(const MomentSeries& dns, const ClosureConfig& config,
                    const ComplexVector& a0, int error_modes,
                    const FitOptions& options) {
  if (!(options.bracket_lo > 0.0) || !(options.bracket_hi > options.bracket_lo)) {
    throw std::invalid_argument("fit_gamma: invalid bracket");
  }
  if (options.scan_points < 3) {
    throw std::invalid_argument("fit_gamma: need at least 3 scan points");
  }

  int evaluations = 0;
  auto misfit = [&](double gamma) {
    ++evaluations;
    return error_function(gamma, dns, config, a0, error_modes);
  };

  // Coarse logarithmic scan to bracket the minimum.
  const int points = options.scan_points;
  std::vector<std::pair<double, double>> scan(points);
  const double ratio = options.bracket_hi / options.bracket_lo;
  for (int j = 0; j < points; ++j) {
    const double gamma =
        options.bracket_lo * std::pow(ratio, double(j) / (points - 1));
    scan[j] = {gamma, misfit(gamma)};
  }
  const auto best = std::min_element(
      scan.begin(), scan.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  const auto best_index = static_cast<int>(best - scan.begin());
  if (best_index == 0 || best_index == points - 1) {
    throw FitFailure(
        "fit_gamma: scan minimum on the bracket boundary; no interior "
        "minimum to refine" + format_scan(scan), scan);
  }

  // Golden-section refinement inside the bracketing triple.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = scan[best_index - 1].first;
  double b = scan[best_index + 1].first;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = misfit(x1);
  double f2 = misfit(x2);
  while (b - a > options.rel_tol * 0.5 * (a + b)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = misfit(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = misfit(x2);
    }
  }

  FitResult result;
  result.gamma_star = f1 < f2 ? x1 : x2;
  result.error_value = std::min(f1, f2);
  result.damping_time_coeff = std::sqrt(config.beta / result.gamma_star);
  const int scored = error_modes == 0 ? std::min<int>(config.m, dns.modes())
                                      : error_modes;
  result.rms_per_mode_step =
      rms_per_mode_step(result.error_value, scored, dns.snapshots());
  result.evaluations = evaluations;
  return result;
}

}  // namespace tbh
