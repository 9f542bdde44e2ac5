#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "unite/errors.hpp"
#include "unite/random.hpp"

namespace unite {

// Binary treatment vector together with the design probability that
// produced it. p always comes from the design, never from z.
class Assignment {
 public:
  Assignment(std::vector<std::uint8_t> z, double p) : z_(std::move(z)), p_(p) {
    if (!(p > 0.0 && p < 1.0)) {
      throw PositivityViolation("Assignment: treatment probability must be in (0, 1), got " +
                                std::to_string(p));
    }
    for (auto v : z_) {
      if (v > 1) throw ArgumentError("Assignment: z entries must be 0 or 1");
    }
  }

  std::size_t size() const noexcept { return z_.size(); }
  double p() const noexcept { return p_; }
  std::uint8_t operator[](std::size_t i) const { return z_[i]; }
  const std::vector<std::uint8_t>& z() const noexcept { return z_; }

  std::size_t treated_count() const noexcept {
    std::size_t c = 0;
    for (auto v : z_) c += v;
    return c;
  }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<std::uint8_t> z_;
  double p_;
};

inline Assignment bernoulli_assign(std::size_t n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) {
    throw PositivityViolation("bernoulli_assign: p must be in (0, 1), got " + std::to_string(p));
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::uint8_t> z(n);
  for (auto& v : z) v = unif(rng) < p ? 1 : 0;
  return Assignment(std::move(z), p);
}

}  // namespace unite
