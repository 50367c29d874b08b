#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gtplan {

/// Deterministic random source. Wraps mt19937_64 but draws uniform ints,
/// reals and gaussians through fixed code paths so that streams are
/// reproducible regardless of the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  /// Uniform double in [0, 1).
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller, one value per call (pair cached).
  double gaussian();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      std::swap(v[static_cast<std::size_t>(i)],
                v[static_cast<std::size_t>(uniform_int(i + 1))]);
    }
  }

  /// Derives an independent stream seed from a root seed and a stream id.
  static std::uint64_t derive(std::uint64_t root, std::uint64_t stream);

  /// Stream id from a short tag plus an index, for readable call sites.
  static std::uint64_t stream_id(std::string_view tag, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gtplan
