#pragma once

#include "unite/graph.hpp"
#include "unite/outcomes.hpp"

namespace fixtures {

// Two mutually connected nodes: Y_0 = z_0 + z_1, Y_1 = z_1.
inline unite::InterferenceGraph two_node_graph() {
  std::vector<std::pair<std::size_t, std::size_t>> e{{0, 1}};
  return unite::InterferenceGraph::from_edges(2, e);
}

inline unite::LinearAdditiveModel two_node_model() {
  const auto g = two_node_graph();
  auto m = unite::zero_linear_model(g);
  m.direct = {1.0, 1.0};
  unite::indirect_coefficient(m, 0, 1) = 1.0;
  return m;
}

inline unite::InterferenceGraph triangle() { return unite::generate_erdos_renyi(3, 1.0, 0); }

}  // namespace fixtures
