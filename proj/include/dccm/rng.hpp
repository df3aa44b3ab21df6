// Deterministic random-number plumbing shared by the sampler and the studies.
//
// std::mt19937_64 output is pinned by the standard, but the standard library's
// distributions are not; the helpers below implement bounded integers and
// canonical doubles directly so that a fixed seed yields the same stream on
// every platform and compiler.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dccm {

using Rng = std::mt19937_64;

/// SplitMix64 step; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d9edb549b91bb3ULL;
  return z ^ (z >> 31);
}

/// Seed for a parallel stream: replicates use base + index (the documented
/// contract), sub-streams inside a replicate decorrelate with mix64.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream));
}

/// Unbiased draw from [0, n) via multiply-shift rejection.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  // Lemire's method: reject the low-product sliver that would bias the draw.
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double canonical(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Distinct-sample helper: k distinct values from [0, n) in selection order.
template <class OutIt>
void sample_without_replacement(Rng& rng, std::uint64_t n, std::uint64_t k, OutIt out) {
  // Floyd's algorithm keeps memory at O(k).
  std::vector<std::uint64_t> chosen;
  chosen.reserve(k);
  for (std::uint64_t j = n - k; j < n; ++j) {
    std::uint64_t t = bounded(rng, j + 1);
    bool dup = false;
    for (std::uint64_t c : chosen)
      if (c == t) { dup = true; break; }
    chosen.push_back(dup ? j : t);
  }
  for (std::uint64_t c : chosen) *out++ = c;
}

}  // namespace dccm
