#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ndda/problem.hpp"
#include "ndda/rng.hpp"

using namespace ndda;

namespace {

ProblemInstance desk_instance(std::uint64_t seed = 1) {
  return generate_lasso(4, 30, 5, 0.01, 3, seed);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generate_lasso invariants") {
  const ProblemInstance inst = desk_instance();
  CHECK(inst.n() == 4);
  CHECK(inst.m == 30);
  REQUIRE(inst.lasso);
  CHECK(inst.lasso->A.size() == 4);
  CHECK(inst.lasso->A[0].rows() == 5);
  CHECK(inst.lasso->A[0].cols() == 30);
  CHECK((inst.lasso->x_sharp.array() != 0).count() == 3);
  CHECK(inst.lasso->radius == doctest::Approx(1.1 * inst.lasso->x_sharp.lpNorm<1>()));
  CHECK(inst.set.kind == FeasibleSet::Kind::L1Ball);
  CHECK(inst.set.contains(inst.lasso->x_sharp));
  CHECK(inst.L > 0);
  for (int i = 0; i < inst.n(); ++i)
    CHECK(inst.L >= inst.locals[static_cast<std::size_t>(i)].smoothness - 1e-12);
}

TEST_CASE("generate_lasso is a pure function of the seed") {
  const ProblemInstance a = desk_instance(3);
  const ProblemInstance b = desk_instance(3);
  const ProblemInstance c = desk_instance(4);
  CHECK(a.lasso->A[2] == b.lasso->A[2]);
  CHECK(a.lasso->y[0] == b.lasso->y[0]);
  CHECK(a.lasso->x_sharp == b.lasso->x_sharp);
  CHECK(a.lasso->A[2] != c.lasso->A[2]);
}

TEST_CASE("zero noise, zero sparsity degenerates to the origin") {
  const ProblemInstance inst = generate_lasso(3, 10, 4, 0.0, 0, 5);
  CHECK(inst.lasso->x_sharp.norm() == 0);
  for (const auto& y : inst.lasso->y) CHECK(y.norm() == 0);
  CHECK(inst.objective(Eigen::VectorXd::Zero(10)) == 0);
}

TEST_CASE("local gradients match finite differences") {
  const ProblemInstance inst = desk_instance();
  Rng rng(Rng::derive(11, 0));
  for (int i = 0; i < inst.n(); ++i) {
    Eigen::VectorXd x(inst.m);
    for (int k = 0; k < inst.m; ++k) x[k] = 0.3 * rng.gaussian();
    const Eigen::VectorXd g = local_gradient(inst, i, x);
    const double h = 1e-6;
    for (int k = 0; k < 5; ++k) {
      Eigen::VectorXd ep = x, em = x;
      ep[k] += h;
      em[k] -= h;
      const auto& f = inst.locals[static_cast<std::size_t>(i)].value;
      const double fd = (f(ep) - f(em)) / (2 * h);
      CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("objective and full gradient aggregate the locals") {
  const ProblemInstance inst = desk_instance();
  Rng rng(Rng::derive(11, 1));
  Eigen::VectorXd x(inst.m);
  for (int k = 0; k < inst.m; ++k) x[k] = rng.gaussian();
  double f = 0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(inst.m);
  for (int i = 0; i < inst.n(); ++i) {
    f += inst.locals[static_cast<std::size_t>(i)].value(x);
    g += local_gradient(inst, i, x);
  }
  CHECK(inst.objective(x) == doctest::Approx(f).epsilon(1e-14));
  CHECK((inst.full_gradient(x) - g).norm() < 1e-12 * (1 + g.norm()));
}

TEST_CASE("local objectives are convex and L-smooth") {
  const ProblemInstance inst = desk_instance();
  Rng rng(Rng::derive(11, 2));
  for (int trial = 0; trial < 50; ++trial) {
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.n())));
    const auto& loc = inst.locals[static_cast<std::size_t>(i)];
    Eigen::VectorXd x(inst.m), y(inst.m);
    for (int k = 0; k < inst.m; ++k) {
      x[k] = rng.gaussian();
      y[k] = rng.gaussian();
    }
    const double lam = rng.uniform();
    CHECK(loc.value(lam * x + (1 - lam) * y) <=
          lam * loc.value(x) + (1 - lam) * loc.value(y) + 1e-10);
    CHECK((local_gradient(inst, i, x) - local_gradient(inst, i, y)).norm() <=
          loc.smoothness * (x - y).norm() * (1 + 1e-12));
  }
}

TEST_CASE("spectral_norm_squared closed cases") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 3;
  CHECK(spectral_norm_squared(D) == doctest::Approx(9).epsilon(1e-10));

  Rng rng(Rng::derive(11, 3));
  Eigen::MatrixXd A(6, 9);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 9; ++c) A(r, c) = rng.gaussian();
  const double ref = A.jacobiSvd().singularValues()[0];
  CHECK(spectral_norm_squared(A) == doctest::Approx(ref * ref).epsilon(1e-9));
}

TEST_CASE("smoothness_constant equals the data matrix spectral norm") {
  const ProblemInstance inst = desk_instance();
  for (int i = 0; i < inst.n(); ++i) {
    const Eigen::MatrixXd& A = inst.lasso->A[static_cast<std::size_t>(i)];
    const double ref = A.jacobiSvd().singularValues()[0];
    CHECK(smoothness_constant(inst, i) == doctest::Approx(ref * ref).epsilon(1e-9));
  }
}

TEST_CASE("reference solution satisfies its fixed-point certificate") {
  const ProblemInstance inst = desk_instance();
  const ReferenceSolution ref = reference_solution(inst, 1e-10);
  CHECK(inst.set.contains(ref.x_star, 1e-9));
  CHECK(ref.f_star == doctest::Approx(inst.objective(ref.x_star)).epsilon(1e-14));

  // projected-gradient residual at unit step 1/L of the full objective
  Eigen::MatrixXd stacked(inst.n() * 5, inst.m);
  for (int i = 0; i < inst.n(); ++i)
    stacked.middleRows(i * 5, 5) = inst.lasso->A[static_cast<std::size_t>(i)];
  const double L_full = spectral_norm_squared(stacked);
  const Eigen::VectorXd step =
      inst.set.project(ref.x_star - inst.full_gradient(ref.x_star) / L_full);
  CHECK((ref.x_star - step).norm() <= 1e-10);

  // no feasible random point does better
  Rng rng(Rng::derive(11, 4));
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(inst.m);
    for (int k = 0; k < inst.m; ++k) x[k] = rng.gaussian();
    CHECK(inst.objective(inst.set.project(x)) >= ref.f_star - 1e-12);
  }
}

TEST_CASE("noise-free overdetermined instance recovers the planted vector") {
  // 4 agents x 10 rows >= m = 20 and no noise: the planted vector attains 0
  const ProblemInstance inst = generate_lasso(4, 20, 10, 0.0, 3, 2);
  const ReferenceSolution ref = reference_solution(inst, 1e-12);
  CHECK(ref.f_star <= 1e-18);
  CHECK((ref.x_star - inst.lasso->x_sharp).norm() < 1e-7);
}

TEST_CASE("instance files round-trip exactly") {
  const ProblemInstance inst = desk_instance(9);
  const std::string p1 = "test_problem_a.lasso";
  const std::string p2 = "test_problem_b.lasso";
  save_instance(inst, p1);
  const ProblemInstance back = load_instance(p1);
  CHECK(back.n() == inst.n());
  CHECK(back.m == inst.m);
  CHECK(back.lasso->A[1] == inst.lasso->A[1]);
  CHECK(back.lasso->y[3] == inst.lasso->y[3]);
  CHECK(back.lasso->radius == inst.lasso->radius);
  CHECK(back.L == inst.L);
  save_instance(back, p2);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
