#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace classroom_ai {

/// The single random stream of a session. mt19937_64 output is fixed by the
/// standard; bounded draws use rejection sampling so results do not depend on
/// the standard library's distribution implementations.
class SessionRng {
 public:
  explicit SessionRng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound) {
    ++draws_;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  /// True with probability numerator/denominator.
  bool bernoulli(std::uint64_t numerator, std::uint64_t denominator) {
    return uniform_index(denominator) < numerator;
  }

  std::uint64_t draws() const { return draws_; }

  bool operator==(const SessionRng&) const = default;

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace classroom_ai
