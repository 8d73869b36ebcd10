#pragma once

#include <array>
#include <cstdint>

namespace mpp {

/// Philox4x32-10 counter-based generator.
///
/// Output depends only on (seed, stream, counter), so every stream can be
/// consumed independently and in any order. Parallel Monte Carlo assigns one
/// stream per path.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  /// Raw 128-bit block for a given counter value. Pure.
  std::array<std::uint32_t, 4> block(std::uint64_t counter) const noexcept;

  /// Uniform draw on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    if (cached_ == 0) {
      auto b = block(counter_++);
      buffer_[0] = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
      buffer_[1] = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
      cached_ = 2;
    }
    std::uint64_t bits = buffer_[2 - cached_--];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int cached_ = 0;
};

inline std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t counter) const noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::array<std::uint32_t, 4> c{static_cast<std::uint32_t>(counter),
                                 static_cast<std::uint32_t>(counter >> 32),
                                 static_cast<std::uint32_t>(stream_),
                                 static_cast<std::uint32_t>(stream_ >> 32)};
  std::uint32_t k0 = key_[0];
  std::uint32_t k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<std::uint32_t>(p0)};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

}  // namespace mpp
