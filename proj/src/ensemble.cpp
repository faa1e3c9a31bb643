#include "tbh/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace tbh {

namespace {

/// Partial sums of the observables over one contiguous member block.
struct BlockAccumulator {
  ComplexMatrix means;
  RealVector energy;
  RealVector hamiltonian;

  void init(int snapshots, int modes) {
    means = ComplexMatrix::Zero(snapshots, modes);
    energy = RealVector::Zero(snapshots);
    hamiltonian = RealVector::Zero(snapshots);
  }
  void add(const BlockAccumulator& other) {
    means += other.means;
    energy += other.energy;
    hamiltonian += other.hamiltonian;
  }
};

/// Fixed-shape pairwise reduction over the block range [lo, hi): the
/// summation tree depends only on the block count, so totals are identical
/// no matter which workers filled which blocks.
BlockAccumulator reduce_blocks(std::vector<BlockAccumulator>& blocks,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  BlockAccumulator left = reduce_blocks(blocks, lo, mid);
  left.add(reduce_blocks(blocks, mid, hi));
  return left;
}

}  // namespace

MomentSeries run_ensemble(const EnsembleConfig& config) {
  validate(config.model);
  const int n = config.model.n;
  if (config.ensemble_size < 1) {
    throw std::invalid_argument("run_ensemble: ensemble_size must be >= 1");
  }
  if (config.record_modes < 1 || config.record_modes > n) {
    throw std::invalid_argument("run_ensemble: record_modes out of range");
  }
  if (config.base.size() > n) {
    throw std::invalid_argument("run_ensemble: base state longer than n");
  }
  if (config.observe_stride < 1 || config.block_size < 1) {
    throw std::invalid_argument("run_ensemble: stride and block_size must be >= 1");
  }

  TrialDensity density{config.model.beta, config.r_dev * config.base};
  const RealVector times =
      snapshot_times(config.model.t_final, config.model.dt, config.observe_stride);
  const int snapshots = static_cast<int>(times.size());
  const int modes = config.record_modes;

  const std::int64_t block_size = config.block_size;
  const std::size_t n_blocks =
      static_cast<std::size_t>((config.ensemble_size + block_size - 1) / block_size);
  std::vector<BlockAccumulator> blocks(n_blocks);

  std::atomic<std::size_t> next_block{0};
  std::atomic<bool> failed{false};
  std::optional<std::pair<std::int64_t, std::string>> first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    SpectralEngine engine(n, config.model.grid_size);
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t b = next_block.fetch_add(1);
      if (b >= n_blocks) break;
      BlockAccumulator& acc = blocks[b];
      acc.init(snapshots, modes);
      const std::int64_t begin = static_cast<std::int64_t>(b) * block_size;
      const std::int64_t end = std::min(config.ensemble_size, begin + block_size);
      // Members are accumulated in index order within the block; combined
      // with the fixed reduction tree this pins the summation order.
      for (std::int64_t member = begin; member != end; ++member) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
          SpectralState z = sample_member(density, n, config.seed,
                                          static_cast<std::uint64_t>(member));
          int row = 0;
          integrate_trajectory(engine, std::move(z), config.model,
                               config.observe_stride,
                               [&](double, const SpectralState& state) {
                                 acc.means.row(row) += state.head(modes);
                                 acc.energy[row] += energy(state);
                                 acc.hamiltonian[row] += engine.hamiltonian(state);
                                 ++row;
                               });
        } catch (const BlowupError& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error.emplace(member, e.what());
          failed.store(true);
          return;
        }
      }
    }
  };

  int threads = config.threads > 0
                    ? config.threads
                    : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads), n_blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (first_error) {
    throw BlowupError("run_ensemble: member " + std::to_string(first_error->first) +
                      " (seed " + std::to_string(config.seed) +
                      ") diverged: " + first_error->second);
  }

  BlockAccumulator total = reduce_blocks(blocks, 0, n_blocks);
  const double inv = 1.0 / static_cast<double>(config.ensemble_size);
  MomentSeries series;
  series.times = times;
  series.means = inv * total.means;
  series.mean_energy = inv * total.energy;
  series.mean_hamiltonian = inv * total.hamiltonian;
  return series;
}

ComplexVector draw_equilibrium_base(const ModelConfig& model, int m,
                                    double spinup_time, std::uint64_t seed) {
  validate(model);
  if (m < 1 || m > model.n) {
    throw std::invalid_argument("draw_equilibrium_base: m out of range");
  }
  if (!(spinup_time >= 0.0)) {
    throw std::invalid_argument("draw_equilibrium_base: negative spinup");
  }
  ModelConfig spin = model;
  spin.t_final = spinup_time;
  SpectralEngine engine(model.n, model.grid_size);
  SpectralState z = sample_gibbs(model.n, model.beta, seed, 0);
  z = integrate_trajectory(engine, std::move(z), spin);
  return z.head(m);
}

Eigen::MatrixXd equilibrium_autocorrelation(const ModelConfig& model, int k_max,
                                            const std::vector<double>& lags,
                                            double run_length, std::uint64_t seed,
                                            int sample_stride) {
  validate(model);
  if (k_max < 1 || k_max > model.n) {
    throw std::invalid_argument("equilibrium_autocorrelation: k_max out of range");
  }
  if (lags.empty() || sample_stride < 1) {
    throw std::invalid_argument("equilibrium_autocorrelation: bad lag grid");
  }
  const double delta = model.dt * sample_stride;

  SpectralEngine engine(model.n, model.grid_size);
  const std::int64_t samples = step_count(run_length, model.dt) / sample_stride + 1;
  ComplexMatrix record(samples, k_max);
  std::int64_t row = 0;
  std::int64_t step = 0;
  Rk4Workspace<SpectralState> ws;
  SpectralState z = sample_gibbs(model.n, model.beta, seed, 0);
  auto f = [&engine](const SpectralState& y, double, SpectralState& out) {
    engine.rhs(y, out);
  };
  record.row(row++) = z.head(k_max);
  const std::int64_t steps = step_count(run_length, model.dt);
  for (step = 0; step < steps; ++step) {
    rk4_step(z, static_cast<double>(step) * model.dt, model.dt, f, ws);
    if ((step + 1) % sample_stride == 0 && row < samples) {
      record.row(row++) = z.head(k_max);
    }
  }

  Eigen::MatrixXd corr(k_max, lags.size());
  for (int k = 0; k < k_max; ++k) {
    const ComplexVector zk = record.col(k);
    const double norm =
        zk.squaredNorm() / static_cast<double>(samples);  // lag-0 covariance
    for (std::size_t j = 0; j < lags.size(); ++j) {
      const auto shift = static_cast<std::int64_t>(std::llround(lags[j] / delta));
      if (shift < 0 || shift >= samples) {
        throw std::invalid_argument(
            "equilibrium_autocorrelation: lag outside the run");
      }
      const std::int64_t len = samples - shift;
      const Complex cov =
          zk.head(len).dot(zk.segment(shift, len)) / static_cast<double>(len);
      corr(k, j) = cov.real() / norm;
    }
  }

  // A time average is only trustworthy when the run covers many
  // decorrelation times of the slowest mode requested.
  std::vector<double> snapped(lags.size());
  for (std::size_t j = 0; j < lags.size(); ++j) {
    snapped[j] = std::llround(lags[j] / delta) * delta;
  }
  const double tau = efolding_time(snapped, corr.row(0).transpose());
  if (run_length < 100.0 * tau) {
    throw std::runtime_error(
        "equilibrium_autocorrelation: run shorter than 100 decorrelation "
        "times (tau_1 ~ " + std::to_string(tau) + ")");
  }
  return corr;
}

double efolding_time(const std::vector<double>& lags,
                     const Eigen::VectorXd& corr) {
  if (lags.size() != static_cast<std::size_t>(corr.size()) || lags.empty()) {
    throw std::invalid_argument("efolding_time: size mismatch");
  }
  const double target = std::exp(-1.0);
  if (corr[0] < target) {
    throw std::runtime_error("efolding_time: already below 1/e at first lag");
  }
  for (int j = 1; j < corr.size(); ++j) {
    if (corr[j] < target) {
      const double w = (corr[j - 1] - target) / (corr[j - 1] - corr[j]);
      return lags[j - 1] + w * (lags[j] - lags[j - 1]);
    }
  }
  throw std::runtime_error("efolding_time: correlation never crosses 1/e");
}

}  // namespace tbh
