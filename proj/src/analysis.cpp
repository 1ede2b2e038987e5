#include "ndda/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ndda {

using json = nlohmann::json;

double rho_E(double beta, double L, double a) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("rho_E: beta must be in [0,1)");
  if (!(L > 0.0)) throw std::invalid_argument("rho_E: L must be > 0");
  if (!(a > 0.0)) throw std::invalid_argument("rho_E: a must be > 0");
  const double aL = a * L;
  return 0.5 * (2.0 * beta + aL + std::sqrt(aL * aL + 4.0 * (beta + 1.0) * aL));
}

AdmissibilityReport check_admissible(double beta, double L, double a) {
  AdmissibilityReport r;
  r.beta = beta;
  r.L = L;
  r.a = a;
  r.rho = rho_E(beta, L, a);
  r.rho_ok = r.rho < 1.0;
  r.rho_margin = 1.0 - r.rho;
  if (r.rho_ok) {
    const double denom = (1.0 - r.rho) * (1.0 - r.rho);
    r.bound_lhs = a * L + a * L / denom;
  } else {
    r.bound_lhs = std::numeric_limits<double>::infinity();
  }
  r.bound_ok = r.bound_lhs <= 0.5;
  r.bound_margin = 0.5 - r.bound_lhs;
  r.admissible = r.rho_ok && r.bound_ok;
  return r;
}

std::string AdmissibilityReport::to_json() const {
  json j;
  j["beta"] = beta;
  j["L"] = L;
  j["a"] = a;
  j["rho"] = rho;
  j["rho_ok"] = rho_ok;
  j["rho_margin"] = rho_margin;
  j["bound_lhs"] = bound_lhs;
  j["bound_ok"] = bound_ok;
  j["bound_margin"] = bound_margin;
  j["admissible"] = admissible;
  return j.dump(2);
}

double max_admissible_a(double beta, double L, double rel_tol) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("max_admissible_a: beta must be in [0,1)");
  if (!(L > 0.0)) throw std::invalid_argument("max_admissible_a: L must be > 0");
  double hi = (beta + 1.0) / L;  // rho >= 1 from here on
  double lo = hi * 1e-16;
  if (!check_admissible(beta, L, lo).admissible)
    throw std::runtime_error("max_admissible_a: no admissible step found");
  while ((hi - lo) > rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (check_admissible(beta, L, mid).admissible)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double theorem_bound(int n, double d_xstar, double a, long t) {
  if (t < 1) throw std::invalid_argument("theorem_bound: t must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("theorem_bound: a must be > 0");
  return static_cast<double>(n) * d_xstar / (a * static_cast<double>(t));
}

TraceChecks verify_trace(const NddaTrace& trace) {
  const long T = static_cast<long>(trace.consensus_err_sq.size());
  TraceChecks out;
  out.rounds = T;
  out.reference_checks_run = trace.has_reference;
  out.worst_eq8_slack = out.worst_eq9_slack = out.worst_eq10_slack =
      out.worst_theorem_slack = std::numeric_limits<double>::infinity();

  const double rel_tol = 1e-8;
  const double denom = (1.0 - trace.rho) * (1.0 - trace.rho);
  const double c8 = static_cast<double>(trace.n) / denom;

  auto flag = [&out](long t, const std::string& what) {
    out.ok = false;
    out.violations.push_back({t, what});
  };

  double cum_cons = 0.0, cum_incr = 0.0, cum_inner = 0.0, cum_breg = 0.0;
  for (long t = 0; t < T; ++t) {
    cum_cons += trace.consensus_err_sq[static_cast<std::size_t>(t)];
    cum_incr += trace.y_incr_sq[static_cast<std::size_t>(t)];

    // Lemma 2 / Eq. (8) at horizon t+1
    {
      const double rhs = c8 * cum_incr;
      const double slack = (rhs - cum_cons) / std::max(1.0, std::abs(rhs));
      out.worst_eq8_slack = std::min(out.worst_eq8_slack, slack);
      if (slack < -rel_tol) flag(t + 1, "consensus-error inequality (Eq. 8)");
    }

    // Lemma 3 residuals after round t+1
    {
      const double res = std::max(trace.lemma3_h_res[static_cast<std::size_t>(t)],
                                  trace.lemma3_s_res[static_cast<std::size_t>(t)]);
      const double tol =
          1e-9 * (1.0 + trace.gbar_norm[static_cast<std::size_t>(t)]);
      out.max_lemma3_res = std::max(
          out.max_lemma3_res,
          res / (1.0 + trace.gbar_norm[static_cast<std::size_t>(t)]));
      if (res > tol) flag(t + 1, "conservation identity (Lemma 3)");
    }

    if (trace.has_reference) {
      // Lemma 5 / Eq. (9) at horizon t+1
      cum_inner += trace.inner_ag_y[static_cast<std::size_t>(t)];
      cum_breg += trace.bregman_incr[static_cast<std::size_t>(t)];
      const double rhs9 = trace.d_xstar - cum_breg;
      const double slack9 =
          (rhs9 - cum_inner) / std::max(1.0, std::abs(rhs9));
      out.worst_eq9_slack = std::min(out.worst_eq9_slack, slack9);
      if (slack9 < -rel_tol) flag(t + 1, "dual-averaging inequality (Eq. 9)");

      // Theorem 4 at horizon t+1
      const double gap = trace.f_ytilde[static_cast<std::size_t>(t)] - trace.f_star;
      const double bound =
          theorem_bound(trace.n, trace.d_xstar, trace.a, t + 1);
      const double slackT = (bound - gap) / std::max(1.0, std::abs(bound));
      out.worst_theorem_slack = std::min(out.worst_theorem_slack, slackT);
      if (slackT < -rel_tol) flag(t + 1, "O(1/t) bound (Theorem 4)");
      if (gap < -1e-8 * (1.0 + std::abs(trace.f_star)))
        flag(t + 1, "negative objective gap beyond reference tolerance");
    }

    // Remark 1 / Eq. (10) at horizon t+1; its right side needs the next
    // y increment, so the final round is not checkable.
    if (t + 1 < T) {
      const double lhs =
          static_cast<double>(t + 1) * trace.xtilde_cons_sq[static_cast<std::size_t>(t)];
      const double rhs =
          c8 * (cum_incr + trace.y_incr_sq[static_cast<std::size_t>(t + 1)]);
      const double slack = (rhs - lhs) / std::max(1.0, std::abs(rhs));
      out.worst_eq10_slack = std::min(out.worst_eq10_slack, slack);
      if (slack < -rel_tol) flag(t + 1, "averaged-consensus inequality (Eq. 10)");
    }
  }
  return out;
}

std::string TraceChecks::to_json() const {
  json j;
  j["ok"] = ok;
  j["rounds"] = rounds;
  j["reference_checks_run"] = reference_checks_run;
  j["worst_eq8_slack"] = worst_eq8_slack;
  j["worst_eq9_slack"] = worst_eq9_slack;
  j["worst_eq10_slack"] = worst_eq10_slack;
  j["worst_theorem_slack"] = worst_theorem_slack;
  j["max_lemma3_res"] = max_lemma3_res;
  j["violations"] = json::array();
  for (const auto& v : violations)
    j["violations"].push_back({{"t", v.t}, {"what", v.what}});
  return j.dump(2);
}

double fit_rate(const std::vector<std::pair<long, double>>& series, long t_min,
                long t_max, int* excluded) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long count = 0;
  int skipped = 0;
  for (const auto& [t, gap] : series) {
    if (t < t_min || t > t_max) continue;
    if (!(gap > 0.0)) {
      ++skipped;
      continue;
    }
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (excluded) *excluded = skipped;
  if (count < 2)
    throw std::invalid_argument("fit_rate: fewer than two usable points in window");
  const double denom = static_cast<double>(count) * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_rate: degenerate window");
  return (static_cast<double>(count) * sxy - sx * sy) / denom;
}

}  // namespace ndda
