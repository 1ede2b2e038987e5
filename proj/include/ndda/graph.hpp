#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ndda {

/// Undirected communication graph on nodes {1, ..., n}.
/// Edges are stored as ordered pairs (i, j) with i < j, no self-loops.
struct Topology {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  bool is_connected() const;
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> neighbor_lists() const;

  std::string to_json() const;
  static Topology from_json(const std::string& text);
};

/// Doubly stochastic consensus matrix associated with a topology.
struct WeightMatrix {
  Eigen::MatrixXd P;

  int n() const { return static_cast<int>(P.rows()); }

  std::string to_json() const;
  static WeightMatrix from_json(const std::string& text);
};

struct SpectralInfo {
  double beta = 0.0;          // second-largest singular value of P
  double spectral_gap = 0.0;  // 1 - beta
};

/// Sample an Erdos-Renyi graph; each unordered pair (i,j), visited in
/// lexicographic order, is included independently with probability `ratio`
/// (one generator draw per pair). Disconnected samples are rejected and
/// re-drawn with seed+1, up to 1000 attempts.
Topology erdos_renyi(int n, double ratio, std::uint64_t seed);

/// Metropolis-Hastings weights: p_ij = 1/(1+max(d_i,d_j)) on edges,
/// diagonal fills the row to 1. Requires a connected topology.
WeightMatrix metropolis_weights(const Topology& topology);

/// Throws unless P has a positive diagonal, row/column sums equal to 1
/// within `tol`, and support contained in the edge set when one is given.
void validate_doubly_stochastic(const WeightMatrix& w, double tol = 1e-12);

/// beta = ||P - J/n||_2 = sigma_2(P) for doubly stochastic P, computed by
/// power iteration on the deflated matrix with a deterministic start.
SpectralInfo second_singular_value(const WeightMatrix& w);

}  // namespace ndda
