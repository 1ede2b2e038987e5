#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ndda {

/// rho(E(a)) for the 2x2 gain matrix E(a) = [[beta, a],[L(beta+1), beta+La]]
/// from its closed-form eigenvalues.
double rho_E(double beta, double L, double a);

struct AdmissibilityReport {
  double beta = 0.0, L = 0.0, a = 0.0;
  double rho = 0.0;
  bool rho_ok = false;    // rho(E(a)) < 1
  bool bound_ok = false;  // aL + aL/(1-rho)^2 <= 1/2
  bool admissible = false;
  double rho_margin = 0.0;    // 1 - rho
  double bound_lhs = 0.0;     // aL + aL/(1-rho)^2
  double bound_margin = 0.0;  // 1/2 - bound_lhs

  std::string to_json() const;
};

/// Evaluate both step-size conditions with their margins.
AdmissibilityReport check_admissible(double beta, double L, double a);

/// Largest admissible constant step, by bisection on (0, (beta+1)/L).
double max_admissible_a(double beta, double L, double rel_tol = 1e-12);

/// n * d(x*) / (a * t), the O(1/t) certificate value.
double theorem_bound(int n, double d_xstar, double a, long t);

/// Global-view scalars recorded while an N-DDA run and its auxiliary
/// sequence evolve in lockstep. Index t runs over completed rounds.
struct NddaTrace {
  int n = 0;
  double a = 0.0;
  double rho = 0.0;      // rho(E(a))
  double d_xstar = 0.0;  // d(x*) under the quadratic prox; valid with reference
  bool has_reference = false;
  double f_star = 0.0;

  // per round t = 0..T-1, indexed by t
  std::vector<double> consensus_err_sq;  // ||x_t - 1 y_t||^2 before the round
  std::vector<double> y_incr_sq;         // ||y_{t+1} - y_t||^2
  std::vector<double> inner_ag_y;        // <a g_t, y_{t+1} - x*>
  std::vector<double> bregman_incr;      // D_d(y_{t+1}, y_t)
  std::vector<double> lemma3_h_res;      // || hbar_{t+1} - gbar_{t+1} ||_inf
  std::vector<double> lemma3_s_res;      // || sbar_{t+1} - gbar_{t+1} ||_inf
  std::vector<double> gbar_norm;         // || gbar_{t+1} ||
  std::vector<double> f_ytilde;          // f(ytilde_{t+1})
  std::vector<double> xtilde_cons_sq;    // || xtilde_{t+1} - 1 ytilde_{t+1} ||^2
};

struct TraceViolation {
  long t = 0;
  std::string what;
};

struct TraceChecks {
  bool ok = true;
  std::vector<TraceViolation> violations;
  long rounds = 0;
  bool reference_checks_run = false;
  double worst_eq8_slack = 0.0;      // min relative slack over t (>= -tol when ok)
  double worst_eq9_slack = 0.0;
  double worst_eq10_slack = 0.0;
  double worst_theorem_slack = 0.0;
  double max_lemma3_res = 0.0;       // max_t residual / (1 + ||gbar||)

  std::string to_json() const;
};

/// Replay the lemma and theorem inequalities over a completed trace.
/// Relative slack tolerance 1e-8 of the right-hand side scale; Lemma 3
/// residual tolerance 1e-9 * (1 + ||gbar_t||).
TraceChecks verify_trace(const NddaTrace& trace);

/// Least-squares slope of log(gap) vs log(t) over t in [t_min, t_max].
/// Nonpositive gaps inside the window are excluded; their count is
/// reported through `excluded` when non-null.
double fit_rate(const std::vector<std::pair<long, double>>& series, long t_min,
                long t_max, int* excluded = nullptr);

}  // namespace ndda
