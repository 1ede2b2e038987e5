#pragma once

#include <vector>

#include "ndda/graph.hpp"

namespace toy {

inline ndda::Topology path(int n) {
  ndda::Topology t;
  t.n = n;
  for (int i = 1; i < n; ++i) t.edges.emplace_back(i, i + 1);
  return t;
}

inline ndda::Topology cycle(int n) {
  ndda::Topology t = path(n);
  if (n > 2) t.edges.emplace_back(1, n);
  return t;
}

inline ndda::Topology star(int n) {
  ndda::Topology t;
  t.n = n;
  for (int i = 2; i <= n; ++i) t.edges.emplace_back(1, i);
  return t;
}

inline ndda::Topology complete(int n) {
  ndda::Topology t;
  t.n = n;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) t.edges.emplace_back(i, j);
  return t;
}

/// Connected graphs with n <= 8 exercised by the spectral oracle suites.
inline std::vector<ndda::Topology> small_connected_set() {
  std::vector<ndda::Topology> out;
  for (int n = 2; n <= 8; ++n) {
    out.push_back(path(n));
    out.push_back(complete(n));
    if (n >= 3) {
      out.push_back(cycle(n));
      out.push_back(star(n));
    }
  }
  for (int n = 4; n <= 8; ++n)
    for (std::uint64_t seed = 0; seed < 3; ++seed)
      out.push_back(ndda::erdos_renyi(n, 0.5, seed));
  return out;
}

}  // namespace toy
