#pragma once

#include <vector>

#include "gfflab/network.hpp"

namespace testing_util {

inline gfflab::Network box(std::vector<int> sides) {
  return gfflab::build_lattice_box(static_cast<int>(sides.size()), sides);
}

inline gfflab::Network single_site() { return box({1, 1}); }
inline gfflab::Network two_site() { return box({2, 1}); }
inline gfflab::Network square() { return box({2, 2}); }

// 0 - 1 - 2 - 3 with unit conductances, ends on the boundary.
inline gfflab::Network unit_chain(int N) {
  std::vector<bool> flags(static_cast<std::size_t>(N + 1), false);
  flags.front() = flags.back() = true;
  std::vector<gfflab::Edge> edges;
  for (int i = 0; i < N; ++i) edges.push_back({i, i + 1, 1.0, 0});
  return gfflab::Network(flags, edges);
}

}  // namespace testing_util
