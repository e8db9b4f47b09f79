#pragma once

#include <cstdint>
#include <string_view>

namespace roadjudge {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a, used for stable id hashing and content digests.
inline constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Counter-based stream: draw k of (key, stream id, tick) never depends on other streams.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t key, std::string_view stream, std::int64_t tick)
      : state_(splitmix64(key ^ splitmix64(fnv1a64(stream) ^ splitmix64(static_cast<std::uint64_t>(tick))))) {}

  constexpr std::uint64_t next() {
    state_ = splitmix64(state_);
    return state_;
  }
  constexpr double uniform() { return to_unit(next()); }
  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Sequential generator for seeding-time expansion (suite jitter, random agents).
class SeqRng {
 public:
  explicit constexpr SeqRng(std::uint64_t seed) : state_(seed) {}
  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }
  constexpr double uniform() { return to_unit(next()); }
  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace roadjudge
