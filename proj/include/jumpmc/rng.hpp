#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace jumpmc {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit key is the master seed; the upper half of the 128-bit counter
/// holds the stream index, so chain `i` of a run seeded with `s` draws from
/// `Philox4x32(s, i)` and is independent of how many other chains exist or
/// in which order they are executed.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Raw 4x32 block for counter `ctr` under key `key`.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential(1) by inverse CDF.
  double exponential();
  /// Standard normal (Box-Muller, no cached second value).
  double normal();
  /// Uniform integer on [0, n).
  std::size_t below(std::size_t n);
  /// Index sampled proportionally to non-negative `weights` (sum must be > 0).
  std::size_t categorical(std::span<const double> weights);
  /// Same, with the weight total already known.
  std::size_t categorical(std::span<const double> weights, double total);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t counter_ = 0;
  std::uint64_t stream_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace jumpmc
