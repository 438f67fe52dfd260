#pragma once

#include <cstdint>
#include <limits>

namespace raas {

// SplitMix64 bit generator. State is a single word, so constructing one per
// counter position costs nothing.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t s) : state_(s) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Keys a generator by a (seed, stream, a, b) counter; distinct tuples give
// decorrelated streams.
inline std::uint64_t counter_key(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t a, std::uint64_t b = 0) {
  SplitMix64 g(seed);
  std::uint64_t k = g();
  k ^= SplitMix64(k ^ (stream * 0xd1b54a32d192ed03ULL))();
  k ^= SplitMix64(k ^ (a * 0x8cb92ba72f3d8dd7ULL))();
  k ^= SplitMix64(k ^ (b * 0xaef17502108ef2d9ULL + 1))();
  return k;
}

// Stream identifiers.
enum Stream : std::uint64_t {
  kStreamGradient = 1,
  kStreamFunction = 2,
  kStreamBias = 3,
  kStreamProblem = 4,
  kStreamInit = 5,
  kStreamScalar = 6,
};

}  // namespace raas
