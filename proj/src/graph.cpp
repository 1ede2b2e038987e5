#include "ndda/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ndda/rng.hpp"

namespace ndda {

using json = nlohmann::json;

std::vector<std::vector<int>> Topology::neighbor_lists() const {
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(n) + 1);
  for (const auto& [i, j] : edges) {
    nbr[static_cast<std::size_t>(i)].push_back(j);
    nbr[static_cast<std::size_t>(j)].push_back(i);
  }
  return nbr;
}

std::vector<int> Topology::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [i, j] : edges) {
    ++deg[static_cast<std::size_t>(i)];
    ++deg[static_cast<std::size_t>(j)];
  }
  return deg;
}

bool Topology::is_connected() const {
  if (n <= 0) return false;
  if (n == 1) return true;
  const auto nbr = neighbor_lists();
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::queue<int> q;
  q.push(1);
  seen[1] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : nbr[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n;
}

std::string Topology::to_json() const {
  json j;
  j["n"] = n;
  j["edges"] = json::array();
  for (const auto& [a, b] : edges) j["edges"].push_back({a, b});
  return j.dump();
}

Topology Topology::from_json(const std::string& text) {
  const json j = json::parse(text);
  Topology t;
  t.n = j.at("n").get<int>();
  for (const auto& e : j.at("edges")) {
    int a = e.at(0).get<int>();
    int b = e.at(1).get<int>();
    if (a == b || a < 1 || b < 1 || a > t.n || b > t.n)
      throw std::runtime_error("topology: invalid edge in file");
    if (a > b) std::swap(a, b);
    t.edges.emplace_back(a, b);
  }
  std::sort(t.edges.begin(), t.edges.end());
  if (std::adjacent_find(t.edges.begin(), t.edges.end()) != t.edges.end())
    throw std::runtime_error("topology: duplicate edge in file");
  return t;
}

std::string WeightMatrix::to_json() const {
  json j;
  j["n"] = n();
  j["rows"] = json::array();
  for (int i = 0; i < n(); ++i) {
    json row = json::array();
    for (int k = 0; k < n(); ++k) row.push_back(P(i, k));
    j["rows"].push_back(std::move(row));
  }
  return j.dump();
}

WeightMatrix WeightMatrix::from_json(const std::string& text) {
  const json j = json::parse(text);
  const int n = j.at("n").get<int>();
  WeightMatrix w;
  w.P.resize(n, n);
  const auto& rows = j.at("rows");
  if (static_cast<int>(rows.size()) != n)
    throw std::runtime_error("weight matrix: row count mismatch");
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) w.P(i, k) = rows.at(i).at(k).get<double>();
  return w;
}

Topology erdos_renyi(int n, double ratio, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("erdos_renyi: n must be >= 2");
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw std::invalid_argument("erdos_renyi: ratio must be in (0,1]");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    Topology t;
    t.n = n;
    // lexicographic pair order, one draw per pair
    for (int i = 1; i < n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (rng.uniform() < ratio) t.edges.emplace_back(i, j);
    if (t.is_connected()) return t;
  }
  throw std::runtime_error(
      "erdos_renyi: no connected sample in 1000 attempts (ratio too small "
      "for n=" + std::to_string(n) + ")");
}

WeightMatrix metropolis_weights(const Topology& topology) {
  if (!topology.is_connected())
    throw std::invalid_argument("metropolis_weights: topology not connected");
  const int n = topology.n;
  const auto deg = topology.degrees();
  WeightMatrix w;
  w.P = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : topology.edges) {
    const double p = 1.0 / (1.0 + std::max(deg[static_cast<std::size_t>(i)],
                                           deg[static_cast<std::size_t>(j)]));
    w.P(i - 1, j - 1) = p;
    w.P(j - 1, i - 1) = p;
  }
  for (int i = 0; i < n; ++i) w.P(i, i) = 1.0 - w.P.row(i).sum();
  validate_doubly_stochastic(w);
  return w;
}

void validate_doubly_stochastic(const WeightMatrix& w, double tol) {
  const int n = w.n();
  if (n == 0) throw std::invalid_argument("weight matrix: empty");
  for (int i = 0; i < n; ++i) {
    if (!(w.P(i, i) > 0.0))
      throw std::runtime_error("weight matrix: nonpositive diagonal entry");
    if (std::abs(w.P.row(i).sum() - 1.0) > tol)
      throw std::runtime_error("weight matrix: row sum violates tolerance");
    if (std::abs(w.P.col(i).sum() - 1.0) > tol)
      throw std::runtime_error("weight matrix: column sum violates tolerance");
  }
}

SpectralInfo second_singular_value(const WeightMatrix& w) {
  const int n = w.n();
  const Eigen::MatrixXd M =
      w.P - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  // Power iteration on M^T M; beta^2 is its top eigenvalue. Deterministic
  // seeded start vector kept orthogonal to nothing in particular: the
  // deflation is already in M.
  Rng rng(0x5eedb001ULL);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
  double nv = v.norm();
  if (nv == 0.0) v.setOnes();
  v /= v.norm();
  double lambda = 0.0;
  const double rel_tol = 1e-10;
  bool converged = false;
  for (long it = 0; it < 100000; ++it) {
    Eigen::VectorXd u = M.transpose() * (M * v);
    const double lambda_new = u.norm();
    if (lambda_new == 0.0) {
      lambda = 0.0;
      converged = true;
      break;
    }
    v = u / lambda_new;
    if (std::abs(lambda_new - lambda) <= rel_tol * std::max(1.0, lambda_new)) {
      lambda = lambda_new;
      converged = true;
      break;
    }
    lambda = lambda_new;
  }
  if (!converged)
    throw std::runtime_error("second_singular_value: power iteration failed "
                             "to converge in 100000 iterations");
  SpectralInfo info;
  info.beta = std::sqrt(std::max(0.0, lambda));
  info.spectral_gap = 1.0 - info.beta;
  return info;
}

}  // namespace ndda
