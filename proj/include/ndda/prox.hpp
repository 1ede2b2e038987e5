#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace ndda {

/// Convex closed constraint set containing the origin.
struct FeasibleSet {
  enum class Kind { Unconstrained, L1Ball, Box };

  Kind kind = Kind::Unconstrained;
  int dim = 0;
  double radius = 0.0;   // L1Ball
  Eigen::VectorXd lo, hi;  // Box; must satisfy lo <= 0 <= hi

  static FeasibleSet unconstrained(int dim);
  static FeasibleSet l1_ball(int dim, double radius);
  static FeasibleSet box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

  bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;

  /// Euclidean projection onto the set.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
};

/// Nonnegative 1-strongly convex function with d(0)=0.
struct ProxFunction {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;

  /// d(x) = ||x||^2 / 2, the default for every experiment here.
  static ProxFunction quadratic();
};

/// D_d(x, y) = d(x) - d(y) - <grad d(y), x - y>.
double bregman(const ProxFunction& d, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y);

/// u -> argmin_{x in X} { <u, x> + d(x) }, for the quadratic prox.
struct DualProjector {
  FeasibleSet set;
  ProxFunction prox = ProxFunction::quadratic();

  Eigen::VectorXd operator()(const Eigen::VectorXd& u) const;
};

/// Exact Euclidean projection onto {||x||_1 <= R} by sorting |v| and
/// scanning for the soft-threshold breakpoint. Stable sort, ties broken by
/// coordinate index, so the output is deterministic.
Eigen::VectorXd project_l1(const Eigen::VectorXd& v, double R);

/// ||proj(a u) - proj(a v)|| <= a ||u - v|| + 1e-12 ?
bool nonexpansiveness_check(const DualProjector& proj, double a,
                            const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v);

}  // namespace ndda
