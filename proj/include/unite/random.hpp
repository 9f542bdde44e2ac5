#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace unite {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed keyed by (master, k0, k1, ...). Independent of evaluation order,
// so trials can run on any worker.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(master);
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream tags so that different consumers of one trial seed never collide.
enum class Stream : std::uint64_t {
  graph = 1,
  model = 2,
  assignment = 3,
  noise = 4,
  perturb = 5,
  market = 6,
  market_sim = 7,
  oracle = 8,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream s,
                                 std::initializer_list<std::uint64_t> keys = {}) {
  std::uint64_t h = derive_seed(master, {static_cast<std::uint64_t>(s)});
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace unite
