#include "tbh/sampling.hpp"

#include <cmath>

namespace tbh {

namespace {

SpectralState draw(int n, double beta, const ComplexVector* means,
                   std::uint64_t seed, std::uint64_t stream, DrawTag tag) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("sample: beta must be positive");
  const double sigma = 1.0 / std::sqrt(2.0 * beta);
  SpectralState z(n);
  const int m = means ? static_cast<int>(means->size()) : 0;
  for (int k = 1; k <= n; ++k) {
    const GaussianPair g = gaussian_pair(seed, tag, stream, static_cast<std::uint32_t>(k));
    Complex value(sigma * g.first, sigma * g.second);
    if (k <= m) value += (*means)[k - 1];
    z[k - 1] = value;
  }
  return z;
}

}  // namespace

SpectralState sample_member(const TrialDensity& density, int n,
                            std::uint64_t seed, std::uint64_t member) {
  if (density.m() > n) {
    throw std::invalid_argument("sample_member: more means than modes");
  }
  return draw(n, density.beta, &density.means, seed, member, DrawTag::member_noise);
}

SpectralState sample_gibbs(int n, double beta, std::uint64_t seed,
                           std::uint64_t stream, DrawTag tag) {
  return draw(n, beta, nullptr, seed, stream, tag);
}

}  // namespace tbh
