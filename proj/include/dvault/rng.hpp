#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace dvault {

/// Anything that produces independent 64-bit words. Both the deterministic
/// test generator and the system entropy source satisfy this.
template <typename R>
concept RandomSource = requires(R r) {
  { r.next_u64() } -> std::convertible_to<std::uint64_t>;
};

/// splitmix64 finalizer; also used to derive stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Seedable deterministic generator (splitmix64). Reproducible draws for
/// tests and for seeded encryption.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Independent stream for (seed, index). Distinct indices give streams that
/// do not collide in practice; cell i of a seeded encryption uses stream i so
/// draws never depend on neighbouring cells.
inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL)));
}

/// Entropy-backed source (std::random_device, /dev/urandom on Linux).
class SystemRng {
 public:
  std::uint64_t next_u64() {
    return (static_cast<std::uint64_t>(dev_()) << 32) ^ dev_();
  }

 private:
  std::random_device dev_;
};

/// Unbiased draw from [0, n), n >= 1. Multiply-shift with rejection.
template <RandomSource R>
std::uint64_t bounded(R& rng, std::uint64_t n) {
  unsigned __int128 m =
      static_cast<unsigned __int128>(rng.next_u64()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t threshold = -n % n;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(rng.next_u64()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace dvault
