#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, index), so results never depend on how work is split
// across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace regcomply {

// Philox4x32 with 10 rounds.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;

  static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kM0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

// Stateless stream addressed by (seed, stream id). Block b of item i yields
// four 32-bit words.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint32_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  constexpr Philox4x32::Counter block(std::uint64_t item, std::uint32_t b) const noexcept {
    return Philox4x32::generate({static_cast<std::uint32_t>(item),
                                 static_cast<std::uint32_t>(item >> 32), b, stream_},
                                key_);
  }

  // Two uniforms in (0, 1] with 53 random bits each.
  constexpr std::array<double, 2> uniform_pair(std::uint64_t item, std::uint32_t b) const noexcept {
    const auto w = block(item, b);
    const std::uint64_t a = (std::uint64_t{w[0]} << 32) | w[1];
    const std::uint64_t c = (std::uint64_t{w[2]} << 32) | w[3];
    constexpr double scale = 0x1.0p-53;
    return {(static_cast<double>(a >> 11) + 1.0) * scale,
            (static_cast<double>(c >> 11) + 1.0) * scale};
  }

  // Standard normal pair via Box-Muller.
  std::array<double, 2> normal_pair(std::uint64_t item, std::uint32_t b) const noexcept {
    const auto [u1, u2] = uniform_pair(item, b);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  // Fill `out` with i.i.d. standard normals belonging to `item`, starting at
  // block `first_block`.
  void normals(std::uint64_t item, std::span<double> out, std::uint32_t first_block = 0) const {
    std::uint32_t b = first_block;
    for (std::size_t i = 0; i < out.size(); i += 2, ++b) {
      const auto g = normal_pair(item, b);
      out[i] = g[0];
      if (i + 1 < out.size()) out[i + 1] = g[1];
    }
  }

  // Uniform in (0, 1].
  double uniform(std::uint64_t item, std::uint32_t b) const noexcept {
    return uniform_pair(item, b)[0];
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t stream_;
};

// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace regcomply
