#pragma once

#include <cstdint>
#include <initializer_list>

namespace fbmclt {

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Domain tags that keep the sub-streams of unrelated consumers apart.
enum class StreamTag : std::uint64_t {
  paths = 0x70617468,      // fBm replications
  quad_mc = 0x71756164,    // Monte Carlo quadrature batches
  shuffle = 0x73687566,    // permutation tests
};

/// Keyed derivation of a stream seed from the master seed.
///
///   h0 = mix64(master ^ 0x6A09E667F3BCC909)
///   h_{i+1} = mix64(h_i ^ mix64(key_i + (i + 1) * 0x9E3779B97F4A7C15))
///
/// The rule is pure integer arithmetic, so streams are identical on every
/// platform and independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept;

/// Counter-based SplitMix64 stream. Every replication / batch owns one,
/// so no random state is ever shared between threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t stream_seed) noexcept : state_(stream_seed) {}

  static RandomStream keyed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
    return RandomStream(derive_seed(master, keys));
  }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by the Marsaglia polar method. Only +, *, sqrt and log
  /// are involved; the pair's second variate is cached.
  double normal() noexcept;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fbmclt
