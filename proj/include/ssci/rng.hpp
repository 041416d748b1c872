#ifndef SSCI_RNG_HPP
#define SSCI_RNG_HPP

#include <cstdint>

#include "ssci/special_functions.hpp"

namespace ssci {

/// Counter-based uniform generator built on the SplitMix64 finalizer
/// (Steele, Lea & Flood 2014).  Output i of stream s is a pure function
/// of (seed, s, i): the state walks an arithmetic sequence and each
/// output is an avalanche mix of the counter, so substreams are
/// independent by construction and safe to evaluate in any order.
///
/// Stream derivation (part of the external contract):
///   state0 = mix(seed ^ mix(s * GAMMA)), state_{i+1} = state_i + GAMMA,
///   output_i = mix(state_{i+1}), with GAMMA = 0x9E3779B97F4A7C15.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed ^ mix(stream * gamma))) {}

  std::uint64_t next_u64() {
    state_ += gamma;
    return mix(state_);
  }

  /// Uniform in the open interval (0, 1).
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inverse-CDF transform, so draws are a monotone
  /// function of the underlying uniform (enables coupled comparisons).
  double next_normal() { return std_normal_quantile(next_uniform()); }

 private:
  static constexpr std::uint64_t gamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace ssci

#endif  // SSCI_RNG_HPP
