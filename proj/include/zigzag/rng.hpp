#pragma once

#include <cstdint>
#include <limits>

namespace zigzag {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t s = h ^ (v * 0xd6e8feb86659fd93ULL);
  return splitmix64(s);
}

}  // namespace detail

/// Counter-based stream keyed by (seed, stream, index). Two generators built
/// from the same key produce the same sequence regardless of construction order,
/// which keeps per-cell draws reproducible under any scheduling.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : state_(detail::mix(detail::mix(detail::mix(0x243f6a8885a308d3ULL, seed), stream), index)) {}

  result_type operator()() { return detail::splitmix64(state_); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Stream identifiers used across the library.
enum : std::uint64_t {
  kStreamCell = 1,
  kStreamLine = 2,
  kStreamEdge = 3,
  kStreamTasep = 4,
  kStreamCorpus = 5,
  kStreamStart = 6,
};

}  // namespace zigzag
