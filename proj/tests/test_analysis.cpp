#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ndda/analysis.hpp"
#include "ndda/rng.hpp"

using namespace ndda;

namespace {

double rho_direct(double beta, double L, double a) {
  Eigen::Matrix2d E;
  E << beta, a, L * (beta + 1), beta + L * a;
  const auto ev = Eigen::EigenSolver<Eigen::Matrix2d>(E, false).eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

}  // namespace

TEST_CASE("rho_E closed form examples") {
  CHECK(rho_E(0, 1, 0.1) == doctest::Approx((0.1 + std::sqrt(0.41)) / 2).epsilon(1e-15));
  CHECK_THROWS(rho_E(0.5, 2, 0));  // the gain matrix is defined for a > 0
}

TEST_CASE("rho_E matches direct eigencomputation on a sweep") {
  Rng rng(Rng::derive(17, 0));
  double worst = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double beta = 0.99 * rng.uniform();
    const double L = 0.1 + 9.9 * rng.uniform();
    const double a = rng.uniform() * (beta + 1) / L;
    const double closed = rho_E(beta, L, a);
    worst = std::max(worst, std::abs(closed - rho_direct(beta, L, a)));
    if (closed < 1) CHECK(a * L < beta + 1);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("admissibility report") {
  const AdmissibilityReport good = check_admissible(0.5, 10, 1e-4);
  CHECK(good.rho_ok);
  CHECK(good.bound_ok);
  CHECK(good.admissible);
  CHECK(good.rho == doctest::Approx(rho_E(0.5, 10, 1e-4)));
  CHECK(good.bound_lhs ==
        doctest::Approx(1e-3 + 1e-3 / ((1 - good.rho) * (1 - good.rho))));
  CHECK(good.bound_margin == doctest::Approx(0.5 - good.bound_lhs));

  const AdmissibilityReport bad = check_admissible(0.5, 10, 2 * 1.5 / 10);
  CHECK_FALSE(bad.rho_ok);
  CHECK(bad.rho >= 1);
  CHECK_FALSE(bad.admissible);
}

TEST_CASE("max_admissible_a is maximal and scales like 1/L") {
  for (double beta : {0.0, 0.3, 0.7, 0.95}) {
    for (double L : {0.5, 10.0, 500.0}) {
      const double a = max_admissible_a(beta, L);
      CHECK(a > 0);
      CHECK(check_admissible(beta, L, a).admissible);
      CHECK_FALSE(check_admissible(beta, L, 1.01 * a).admissible);
      CHECK(max_admissible_a(beta, 10 * L) == doctest::Approx(a / 10).epsilon(1e-9));
    }
  }
}

TEST_CASE("theorem_bound arithmetic") {
  CHECK(theorem_bound(4, 2.0, 0.1, 100) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(theorem_bound(1, 0.0, 0.1, 5) == 0);
}

TEST_CASE("fit_rate recovers exact power laws") {
  for (double p : {-0.5, -1.0, -2.0}) {
    std::vector<std::pair<long, double>> series;
    for (long t = 1; t <= 5000; ++t)
      series.emplace_back(t, 3.7 * std::pow(static_cast<double>(t), p));
    int excluded = -1;
    CHECK(fit_rate(series, 10, 5000, &excluded) == doctest::Approx(p).epsilon(1e-12));
    CHECK(excluded == 0);
  }
}

TEST_CASE("fit_rate skips nonpositive points and rejects empty windows") {
  std::vector<std::pair<long, double>> series;
  for (long t = 1; t <= 100; ++t)
    series.emplace_back(t, t % 10 == 0 ? 0.0 : 1.0 / static_cast<double>(t));
  int excluded = 0;
  const double slope = fit_rate(series, 1, 100, &excluded);
  CHECK(excluded == 10);
  CHECK(slope == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK_THROWS(fit_rate(series, 200, 300));
}

TEST_CASE("verify_trace flags fabricated violations") {
  NddaTrace tr;
  tr.n = 2;
  tr.a = 0.1;
  tr.rho = 0.5;
  tr.has_reference = false;
  // a consensus error with no y-movement to justify it
  tr.consensus_err_sq = {1.0};
  tr.y_incr_sq = {0.0};
  tr.inner_ag_y = {0.0};
  tr.bregman_incr = {0.0};
  tr.lemma3_h_res = {0.0};
  tr.lemma3_s_res = {0.0};
  tr.gbar_norm = {1.0};
  tr.f_ytilde = {0.0};
  tr.xtilde_cons_sq = {0.0};
  const TraceChecks checks = verify_trace(tr);
  CHECK_FALSE(checks.ok);
  CHECK(checks.violations.size() >= 1);

  // conservation drift is caught too
  tr.consensus_err_sq = {0.0};
  tr.lemma3_h_res = {1e-3};
  const TraceChecks drift = verify_trace(tr);
  CHECK_FALSE(drift.ok);
}
