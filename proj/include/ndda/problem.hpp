#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ndda/prox.hpp"

namespace ndda {

/// One agent's private objective.
struct LocalObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  double smoothness = 0.0;  // Lipschitz constant of the gradient
};

/// Raw data behind a distributed LASSO instance: y_i = A_i x_sharp + b_i.
struct LassoData {
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::VectorXd> y;
  Eigen::VectorXd x_sharp;  // planted sparse vector (not the constrained optimum)
  double noise_sigma2 = 0.0;
  double radius = 0.0;  // R = 1.1 * ||x_sharp||_1
  std::uint64_t seed = 0;
};

struct ProblemInstance {
  std::vector<LocalObjective> locals;
  FeasibleSet set;
  double L = 0.0;  // max over local smoothness constants
  int m = 0;
  std::shared_ptr<LassoData> lasso;  // set when generated by generate_lasso

  int n() const { return static_cast<int>(locals.size()); }
  double objective(const Eigen::VectorXd& x) const;
  Eigen::VectorXd full_gradient(const Eigen::VectorXd& x) const;
};

struct ReferenceSolution {
  Eigen::VectorXd x_star;
  double f_star = 0.0;
  double tol = 0.0;  // certified projected-gradient residual
};

/// Distributed LASSO generator: A_i with iid N(0,1) entries, x_sharp with
/// `sparsity` nonzero N(0,1) entries at uniform positions, Gaussian noise,
/// f_i(x) = ||y_i - A_i x||^2 / 2 on the l1 ball of radius 1.1*||x_sharp||_1.
/// Pure function of its arguments including the seed.
ProblemInstance generate_lasso(int n, int m, int p_i, double noise_sigma2,
                               int sparsity, std::uint64_t seed);

Eigen::VectorXd local_gradient(const ProblemInstance& inst, int i,
                               const Eigen::VectorXd& x);

/// sigma_max(A)^2 by power iteration on A^T A, relative tolerance 1e-10.
double spectral_norm_squared(const Eigen::MatrixXd& A);

double smoothness_constant(const ProblemInstance& inst, int i);

/// Accelerated projected gradient (step 1/L, Nesterov momentum, restart on
/// objective increase) run until ||x - P_X(x - grad f(x)/L)|| <= tol.
ReferenceSolution reference_solution(const ProblemInstance& inst, double tol,
                                     long max_iters = 10000000);

/// Instance file: one JSON header line (dimensions, seed, R, L, sigma^2),
/// then the arrays A_1..A_n (row-major), y_1..y_n, x_sharp as consecutive
/// IEEE-754 little-endian doubles.
void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

}  // namespace ndda
