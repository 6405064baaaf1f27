#pragma once

#include <cstdint>

namespace nmc {

/// Counter-based SplitMix64 generator (Steele/Lea/Flood mixing function applied
/// to a Weyl counter). One multiply-xor mix per draw, 2^64 period, trivially
/// reproducible: the n-th output is a pure function of (seed, n). Used for all
/// Monte Carlo sampling so runs are bit-reproducible from the manifest seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : counter_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    std::uint64_t z = (counter_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Fair +1 / -1.
  int sign() { return ((*this)() >> 63) ? -1 : +1; }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return (*this)() % n; }

  /// Per-chain seed: hash of (master_seed, stream index). Streams with
  /// distinct indices are decorrelated by two mixing rounds.
  static std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 h(master + 0x632be59bd9b4e019ull * (stream + 1));
    h();
    return h();
  }

 private:
  std::uint64_t counter_;
};

}  // namespace nmc
