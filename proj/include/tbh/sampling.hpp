#pragma once

#include <cstdint>

#include "tbh/philox.hpp"
#include "tbh/types.hpp"

namespace tbh {

// ============================================================
// Trial densities: every mode is an independent complex Gaussian
// with real and imaginary variance 1/(2 beta); the first m modes
// carry a prescribed mean, the rest are centered (for means = 0
// this is exactly the Gibbs measure of the truncation).
// ============================================================

/// Product-Gaussian trial density on the n-mode state space.
struct TrialDensity {
  double beta = 5.0;      ///< inverse temperature (variance 1/(2 beta) per part)
  ComplexVector means;    ///< mean of modes 1..m; modes beyond m are centered

  int m() const { return static_cast<int>(means.size()); }
};

/// Draws member `member` of the ensemble over `density` as a pure function
/// of (seed, member): mode k consumes the Philox block with counter index k.
SpectralState sample_member(const TrialDensity& density, int n,
                            std::uint64_t seed, std::uint64_t member);

/// Centered Gibbs draw (mean-free trial density) from the given stream.
SpectralState sample_gibbs(int n, double beta, std::uint64_t seed,
                           std::uint64_t stream,
                           DrawTag tag = DrawTag::equilibrium_draw);

}  // namespace tbh
