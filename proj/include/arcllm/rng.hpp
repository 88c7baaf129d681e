#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace arcllm {

/// SplitMix64 finalizer; used to derive independent per-task seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Portable seeded generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; bounded draws use rejection sampling
/// instead of <random> distributions (those vary across standard libraries),
/// so a seed produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  int uniform(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("Rng::uniform: empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<int>(x % range);
  }

  bool chance(int numerator, int denominator) { return uniform(0, denominator - 1) < numerator; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items.at(static_cast<std::size_t>(uniform(0, static_cast<int>(items.size()) - 1)));
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[static_cast<std::size_t>(uniform(0, static_cast<int>(i) - 1))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace arcllm
