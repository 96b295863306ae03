#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace colorref {

/// Seeded pseudo-random stream.
///
/// Wraps mt19937_64 (whose output sequence is fixed by the standard) and
/// derives floats and bounded integers itself, so results do not depend on
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Stream keyed by several integers, e.g. (seed, chip_index).
  static Rng derive(std::initializer_list<std::uint64_t> keys);

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Rng::uniform_int.
template <typename Range>
void shuffle(Range& range, Rng& rng) {
  using std::swap;
  const auto n = static_cast<std::uint64_t>(std::size(range));
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = rng.uniform_int(i);
    swap(range[i - 1], range[j]);
  }
}

}  // namespace colorref
