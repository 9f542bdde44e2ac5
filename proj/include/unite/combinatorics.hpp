#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <vector>

#include "unite/graph.hpp"

namespace unite {

// All subsets of `base` with 1 <= |S| <= max_size, ordered by size then
// lexicographically. `base` must be sorted.
inline std::vector<NodeSet> subsets_up_to(const NodeSet& base, std::size_t max_size) {
  std::vector<NodeSet> out;
  const std::size_t m = base.size();
  const std::size_t top = std::min(max_size, m);
  for (std::size_t k = 1; k <= top; ++k) {
    // index combinations of size k in lexicographic order
    std::vector<std::size_t> idx(k);
    for (std::size_t a = 0; a < k; ++a) idx[a] = a;
    while (true) {
      NodeSet s(k);
      for (std::size_t a = 0; a < k; ++a) s[a] = base[idx[a]];
      out.push_back(std::move(s));
      std::size_t a = k;
      while (a > 0 && idx[a - 1] == m - k + (a - 1)) --a;
      if (a == 0) break;
      ++idx[a - 1];
      for (std::size_t b = a; b < k; ++b) idx[b] = idx[b - 1] + 1;
    }
  }
  return out;
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline double factorial(std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 2; i <= k; ++i) r *= static_cast<double>(i);
  return r;
}

inline bool is_subset(const NodeSet& a, const NodeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace unite
