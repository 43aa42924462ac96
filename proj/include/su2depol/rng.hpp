#pragma once

#include <cmath>
#include <cstdint>

namespace su2depol {

// Counter-seeded SplitMix64 stream.  Each Monte Carlo sample gets its own
// stream derived from (seed, sample index), so results are bit-identical no
// matter how samples are partitioned across threads or batches.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  static RngStream for_sample(std::uint64_t seed, std::uint64_t index) {
    // Decorrelate seed and index through two mixing rounds before use.
    std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ull * (index + 1));
    return RngStream(mix(h ^ mix(index + 0x632be59bd9b4e019ull)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    double a = 6.283185307179586476925287 * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace su2depol
