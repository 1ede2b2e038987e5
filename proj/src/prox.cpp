#include "ndda/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ndda {

FeasibleSet FeasibleSet::unconstrained(int dim) {
  FeasibleSet s;
  s.kind = Kind::Unconstrained;
  s.dim = dim;
  return s;
}

FeasibleSet FeasibleSet::l1_ball(int dim, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("l1_ball: radius must be > 0");
  FeasibleSet s;
  s.kind = Kind::L1Ball;
  s.dim = dim;
  s.radius = radius;
  return s;
}

FeasibleSet FeasibleSet::box(const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size())
    throw std::invalid_argument("box: lo/hi dimension mismatch");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo(i) <= 0.0 && 0.0 <= hi(i)))
      throw std::invalid_argument("box: must contain the origin (lo <= 0 <= hi)");
  FeasibleSet s;
  s.kind = Kind::Box;
  s.dim = static_cast<int>(lo.size());
  s.lo = lo;
  s.hi = hi;
  return s;
}

bool FeasibleSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim) return false;
  switch (kind) {
    case Kind::Unconstrained:
      return true;
    case Kind::L1Ball:
      return x.lpNorm<1>() <= radius * (1.0 + tol) + tol;
    case Kind::Box:
      return (x.array() >= lo.array() - tol).all() &&
             (x.array() <= hi.array() + tol).all();
  }
  return false;
}

Eigen::VectorXd FeasibleSet::project(const Eigen::VectorXd& v) const {
  switch (kind) {
    case Kind::Unconstrained:
      return v;
    case Kind::L1Ball:
      return project_l1(v, radius);
    case Kind::Box:
      return v.cwiseMax(lo).cwiseMin(hi);
  }
  throw std::logic_error("FeasibleSet: unknown kind");
}

ProxFunction ProxFunction::quadratic() {
  ProxFunction d;
  d.name = "quadratic";
  d.value = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  d.gradient = [](const Eigen::VectorXd& x) { return x; };
  return d;
}

double bregman(const ProxFunction& d, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("bregman: dimension mismatch");
  return d.value(x) - d.value(y) - d.gradient(y).dot(x - y);
}

Eigen::VectorXd DualProjector::operator()(const Eigen::VectorXd& u) const {
  if (!u.allFinite())
    throw std::invalid_argument("da_project: non-finite dual vector");
  // quadratic prox: argmin <u,x> + ||x||^2/2 over X is the Euclidean
  // projection of -u
  return set.project(-u);
}

Eigen::VectorXd project_l1(const Eigen::VectorXd& v, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("project_l1: R must be > 0");
  if (!v.allFinite()) throw std::invalid_argument("project_l1: non-finite input");
  if (v.lpNorm<1>() <= R) return v;
  const Eigen::Index m = v.size();
  std::vector<double> mag(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) mag[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::stable_sort(mag.begin(), mag.end(), std::greater<double>());
  // largest k with mag[k-1] > (prefix_k - R)/k; theta from that prefix
  double prefix = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    prefix += mag[k];
    const double cand = (prefix - R) / static_cast<double>(k + 1);
    if (cand >= mag[k] && k > 0) {
      break;
    }
    theta = cand;
  }
  Eigen::VectorXd out(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double shrunk = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = v(i) < 0.0 ? -shrunk : shrunk;
  }
  return out;
}

bool nonexpansiveness_check(const DualProjector& proj, double a,
                            const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v) {
  if (!(a > 0.0)) throw std::invalid_argument("nonexpansiveness_check: a must be > 0");
  const double lhs = (proj(a * u) - proj(a * v)).norm();
  return lhs <= a * (u - v).norm() + 1e-12;
}

}  // namespace ndda
