#include "ndda/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ndda/rng.hpp"

namespace ndda {

using json = nlohmann::json;

namespace {

constexpr std::uint64_t kProblemStream = 1000;
constexpr std::uint64_t kTopologyStream = 2000;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string read_file(const std::string& path, const char* field) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field, "cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::CDA: return "cda";
    case AlgorithmKind::DDA: return "dda";
    case AlgorithmKind::DPG: return "dpg";
    case AlgorithmKind::NDDA: return "ndda";
  }
  return "?";
}

AlgorithmKind algorithm_from_string(const std::string& name) {
  if (name == "cda") return AlgorithmKind::CDA;
  if (name == "dda") return AlgorithmKind::DDA;
  if (name == "dpg") return AlgorithmKind::DPG;
  if (name == "ndda") return AlgorithmKind::NDDA;
  throw ConfigError("algorithm", "unknown algorithm '" + name + "'");
}

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("(root)", std::string("invalid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
  } catch (const json::exception&) {
    throw ConfigError("schema_version", "missing or not an integer");
  }
  if (c.schema_version != 1)
    throw ConfigError("schema_version", "unsupported version");

  if (!j.contains("problem")) throw ConfigError("problem", "missing");
  const json& p = j["problem"];
  if (p.contains("path")) {
    c.problem.path = p.at("path").get<std::string>();
  } else {
    try {
      c.problem.n = p.at("n").get<int>();
      c.problem.m = p.at("m").get<int>();
      c.problem.p_i = p.at("p_i").get<int>();
      c.problem.sparsity = p.at("sparsity").get<int>();
      c.problem.noise_sigma2 = p.at("noise_sigma2").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError("problem", std::string("needs n, m, p_i, sparsity, "
                                               "noise_sigma2 (or path): ") +
                                       e.what());
    }
    if (c.problem.n < 1) throw ConfigError("problem.n", "must be >= 1");
    if (c.problem.m < 1) throw ConfigError("problem.m", "must be >= 1");
    if (c.problem.p_i < 1) throw ConfigError("problem.p_i", "must be >= 1");
    if (c.problem.sparsity < 0 || c.problem.sparsity > c.problem.m)
      throw ConfigError("problem.sparsity", "must be in [0, m]");
    if (c.problem.noise_sigma2 < 0)
      throw ConfigError("problem.noise_sigma2", "must be >= 0");
  }

  if (!j.contains("topology")) throw ConfigError("topology", "missing");
  const json& t = j["topology"];
  if (t.contains("path")) {
    c.topology.path = t.at("path").get<std::string>();
  } else {
    try {
      c.topology.ratio = t.at("ratio").get<double>();
    } catch (const json::exception&) {
      throw ConfigError("topology.ratio", "missing (or give topology.path)");
    }
    if (!(c.topology.ratio > 0.0 && c.topology.ratio <= 1.0))
      throw ConfigError("topology.ratio", "must be in (0,1]");
  }

  try {
    c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  } catch (const json::exception&) {
    throw ConfigError("algorithm", "missing or not a string");
  }

  if (!j.contains("control")) throw ConfigError("control", "missing");
  const json& ctl = j["control"];
  const std::string kind = ctl.value("kind", "");
  if (kind == "constant") {
    c.control.kind = ControlSequence::Kind::Constant;
    if (!ctl.contains("a")) throw ConfigError("control.a", "missing");
    if (ctl["a"].is_string()) {
      const std::string s = ctl["a"].get<std::string>();
      if (s == "max_admissible")
        c.control.rule = ControlSpec::ConstantRule::MaxAdmissible;
      else if (s == "1/m")
        c.control.rule = ControlSpec::ConstantRule::OneOverM;
      else
        throw ConfigError("control.a",
                          "symbolic value must be 'max_admissible' or '1/m'");
    } else {
      c.control.rule = ControlSpec::ConstantRule::Numeric;
      c.control.value = ctl["a"].get<double>();
      if (!(c.control.value > 0.0))
        throw ConfigError("control.a", "must be > 0");
    }
  } else if (kind == "inverse_sqrt") {
    c.control.kind = ControlSequence::Kind::InverseSqrt;
    c.control.value = ctl.value("c", 1.0);
    if (!(c.control.value > 0.0)) throw ConfigError("control.c", "must be > 0");
  } else {
    throw ConfigError("control.kind", "must be 'constant' or 'inverse_sqrt'");
  }

  c.horizon = j.value("horizon", 1L);
  if (c.horizon < 1) throw ConfigError("horizon", "must be >= 1");
  c.stride = j.value("stride", 1L);
  if (c.stride < 1) throw ConfigError("stride", "must be >= 1");
  c.seed = j.value("seed", std::uint64_t{0});
  c.out = j.value("out", std::string{});
  c.force = j.value("force", false);
  c.reference_tol = j.value("reference_tol", 1e-10);
  c.compute_reference = j.value("compute_reference", true);

  if (!c.problem.path.empty() && !std::filesystem::exists(c.problem.path))
    throw ConfigError("problem.path", "file not found: " + c.problem.path);
  if (!c.topology.path.empty() && !std::filesystem::exists(c.topology.path))
    throw ConfigError("topology.path", "file not found: " + c.topology.path);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  return from_json(read_file(path, "config"));
}

std::string RunConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  if (problem.from_file()) {
    j["problem"] = {{"path", problem.path}};
  } else {
    j["problem"] = {{"n", problem.n},
                    {"m", problem.m},
                    {"p_i", problem.p_i},
                    {"sparsity", problem.sparsity},
                    {"noise_sigma2", problem.noise_sigma2}};
  }
  if (topology.from_file())
    j["topology"] = {{"path", topology.path}};
  else
    j["topology"] = {{"ratio", topology.ratio}};
  j["algorithm"] = to_string(algorithm);
  if (control.kind == ControlSequence::Kind::Constant) {
    json a;
    switch (control.rule) {
      case ControlSpec::ConstantRule::Numeric: a = control.value; break;
      case ControlSpec::ConstantRule::MaxAdmissible: a = "max_admissible"; break;
      case ControlSpec::ConstantRule::OneOverM: a = "1/m"; break;
    }
    j["control"] = {{"kind", "constant"}, {"a", a}};
  } else {
    j["control"] = {{"kind", "inverse_sqrt"}, {"c", control.value}};
  }
  j["horizon"] = horizon;
  j["stride"] = stride;
  j["seed"] = seed;
  j["out"] = out;
  j["force"] = force;
  j["reference_tol"] = reference_tol;
  j["compute_reference"] = compute_reference;
  return j.dump(2);
}

PreparedExperiment prepare(const RunConfig& config) {
  PreparedExperiment prep;
  if (config.problem.from_file()) {
    prep.inst = load_instance(config.problem.path);
  } else {
    prep.inst = generate_lasso(config.problem.n, config.problem.m,
                               config.problem.p_i, config.problem.noise_sigma2,
                               config.problem.sparsity,
                               Rng::derive(config.seed, kProblemStream));
  }
  if (config.topology.from_file()) {
    prep.topo = Topology::from_json(read_file(config.topology.path, "topology.path"));
  } else {
    prep.topo = erdos_renyi(prep.inst.n(), config.topology.ratio,
                            Rng::derive(config.seed, kTopologyStream));
  }
  if (prep.topo.n != prep.inst.n())
    throw ConfigError("topology", "node count does not match the instance");
  prep.P = metropolis_weights(prep.topo);
  prep.spectral = second_singular_value(prep.P);
  if (config.compute_reference)
    prep.reference = reference_solution(prep.inst, config.reference_tol);
  return prep;
}

double resolve_constant_a(const RunConfig& config,
                          const PreparedExperiment& prep) {
  if (config.control.kind != ControlSequence::Kind::Constant)
    throw ConfigError("control", "constant control required here");
  switch (config.control.rule) {
    case ControlSpec::ConstantRule::Numeric:
      return config.control.value;
    case ControlSpec::ConstantRule::MaxAdmissible:
      return max_admissible_a(prep.spectral.beta, prep.inst.L);
    case ControlSpec::ConstantRule::OneOverM:
      return 1.0 / static_cast<double>(prep.inst.m);
  }
  throw std::logic_error("resolve_constant_a: unknown rule");
}

namespace {

struct Metrics {
  bool has_ref = false;
  Eigen::VectorXd x_star;
  double x_star_sq = 0.0;
  double f_star = 0.0;

  double residual(const Eigen::VectorXd& x) const {
    return (x - x_star).squaredNorm() / x_star_sq;
  }
};

RunResult run_ndda(const RunConfig& config, const PreparedExperiment& prep,
                   const Metrics& met) {
  RunResult result;
  result.config = config;
  result.beta = prep.spectral.beta;
  result.L = prep.inst.L;

  const double a = resolve_constant_a(config, prep);
  result.a_resolved = a;
  const auto adm = check_admissible(prep.spectral.beta, prep.inst.L, a);
  if (!adm.admissible) {
    if (!config.force)
      throw ConfigError("control.a",
                        "step fails the Theorem 4 admissibility check "
                        "(rho=" + std::to_string(adm.rho) +
                            "); pass force=true to run anyway");
    std::cerr << "warning: step a=" << a
              << " is not admissible (rho=" << adm.rho
              << ", bound_lhs=" << adm.bound_lhs << "); running anyway\n";
  }

  const ProblemInstance& inst = prep.inst;
  const int n = inst.n();
  const DualProjector proj{inst.set};
  NddaState st = ndda_init(inst, prep.P);
  AuxState aux = aux_init(inst.m);

  NddaTrace trace;
  trace.n = n;
  trace.a = a;
  trace.rho = adm.rho;
  trace.has_reference = met.has_ref;
  if (met.has_ref) {
    trace.d_xstar = 0.5 * met.x_star_sq;
    trace.f_star = met.f_star;
  }

  Eigen::VectorXd y_sum = Eigen::VectorXd::Zero(inst.m);
  Eigen::MatrixXd x_sum = Eigen::MatrixXd::Zero(n, inst.m);

  for (long t = 0; t < config.horizon; ++t) {
    const Eigen::VectorXd g_t = st.GradPrev.colwise().mean().transpose();
    double cons = 0.0;
    for (int i = 0; i < n; ++i)
      cons += (st.X.row(i).transpose() - aux.y).squaredNorm();
    trace.consensus_err_sq.push_back(cons);

    const Eigen::VectorXd y_old = aux.y;
    auxiliary_round(aux, g_t, a, proj);
    trace.y_incr_sq.push_back((aux.y - y_old).squaredNorm());
    if (met.has_ref) {
      trace.inner_ag_y.push_back(a * g_t.dot(aux.y - met.x_star));
      trace.bregman_incr.push_back(0.5 * (aux.y - y_old).squaredNorm());
    } else {
      trace.inner_ag_y.push_back(0.0);
      trace.bregman_incr.push_back(0.0);
    }

    ndda_round(st, inst, prep.P, a, proj);

    const Eigen::VectorXd gbar = st.GradPrev.colwise().mean().transpose();
    const Eigen::VectorXd hbar = st.H.colwise().mean().transpose();
    const Eigen::VectorXd sbar = st.S.colwise().mean().transpose();
    trace.lemma3_h_res.push_back((hbar - gbar).lpNorm<Eigen::Infinity>());
    trace.lemma3_s_res.push_back((sbar - gbar).lpNorm<Eigen::Infinity>());
    trace.gbar_norm.push_back(gbar.norm());

    y_sum += aux.y;
    x_sum += st.X;
    const double inv_t = 1.0 / static_cast<double>(t + 1);
    const Eigen::VectorXd ytilde = y_sum * inv_t;
    trace.f_ytilde.push_back(inst.objective(ytilde));
    double xt_cons = 0.0;
    for (int i = 0; i < n; ++i)
      xt_cons += (x_sum.row(i).transpose() * inv_t - ytilde).squaredNorm();
    trace.xtilde_cons_sq.push_back(xt_cons);

    if ((t + 1) % config.stride == 0) {
      TraceRow row;
      row.t = t + 1;
      if (met.has_ref) {
        row.res_agent1 = met.residual(st.X.row(0).transpose());
        row.res_max = row.res_agent1;
        for (int i = 1; i < n; ++i)
          row.res_max =
              std::max(row.res_max, met.residual(st.X.row(i).transpose()));
        row.gap_avg = trace.f_ytilde.back() - met.f_star;
        row.bound = theorem_bound(n, trace.d_xstar, a, t + 1);
      } else {
        row.res_agent1 = row.res_max = row.gap_avg = row.bound = kNaN;
      }
      row.f_agent1 = inst.objective(st.X.row(0).transpose());
      row.f_avg = trace.f_ytilde.back();
      row.consensus_err_sq = cons;
      result.rows.push_back(row);
    }
  }

  result.checks = verify_trace(trace);
  result.checks_run = true;
  return result;
}

RunResult run_baseline(const RunConfig& config, const PreparedExperiment& prep,
                       const Metrics& met) {
  RunResult result;
  result.config = config;
  result.beta = prep.spectral.beta;
  result.L = prep.inst.L;

  const ProblemInstance& inst = prep.inst;
  const int n = inst.n();
  const DualProjector proj{inst.set};
  ControlSequence ctl;
  if (config.control.kind == ControlSequence::Kind::Constant) {
    ctl = ControlSequence::constant(resolve_constant_a(config, prep));
    result.a_resolved = ctl.c;
  } else {
    ctl = ControlSequence::inverse_sqrt(config.control.value);
  }

  const bool centralized = config.algorithm == AlgorithmKind::CDA;
  CdaState cda;
  DdaState dda;
  DpgState dpg;
  if (centralized)
    cda = cda_init(inst);
  else if (config.algorithm == AlgorithmKind::DDA)
    dda = dda_init(inst, prep.P);
  else
    dpg = dpg_init(inst, prep.P);

  RunningMean avg1(inst.m);  // running average of agent 1 (or the CDA iterate)

  for (long t = 0; t < config.horizon; ++t) {
    const double a_t = ctl.at(t);
    Eigen::MatrixXd* X = nullptr;
    if (centralized) {
      cda_round(cda, inst, a_t, proj);
      avg1.add(cda.x);
    } else if (config.algorithm == AlgorithmKind::DDA) {
      dda_round(dda, inst, prep.P, a_t, proj);
      X = &dda.X;
    } else {
      dpg_round(dpg, inst, prep.P, a_t);
      X = &dpg.X;
    }
    if (X) avg1.add(X->row(0).transpose());

    if ((t + 1) % config.stride == 0) {
      TraceRow row;
      row.t = t + 1;
      const Eigen::VectorXd x1 =
          centralized ? cda.x : Eigen::VectorXd(X->row(0).transpose());
      if (met.has_ref) {
        row.res_agent1 = met.residual(x1);
        row.res_max = row.res_agent1;
        if (X)
          for (int i = 1; i < n; ++i)
            row.res_max =
                std::max(row.res_max, met.residual(X->row(i).transpose()));
      } else {
        row.res_agent1 = row.res_max = kNaN;
      }
      row.f_agent1 = inst.objective(x1);
      row.f_avg = inst.objective(avg1.mean());
      row.gap_avg = met.has_ref ? row.f_avg - met.f_star : kNaN;
      if (X) {
        const Eigen::VectorXd xbar = X->colwise().mean().transpose();
        double cons = 0.0;
        for (int i = 0; i < n; ++i)
          cons += (X->row(i).transpose() - xbar).squaredNorm();
        row.consensus_err_sq = cons;
      } else {
        row.consensus_err_sq = 0.0;
      }
      row.bound = kNaN;
      result.rows.push_back(row);
    }
  }
  return result;
}

void fit_result_slope(RunResult& result) {
  if (result.rows.empty() || !result.has_reference) return;
  std::vector<std::pair<long, double>> series;
  for (const auto& row : result.rows) series.emplace_back(row.t, row.gap_avg);
  const long T = result.rows.back().t;
  const long t_min = std::max<long>(10, T / 100);
  try {
    result.fitted_slope = fit_rate(series, t_min, T);
    result.slope_fitted = true;
  } catch (const std::invalid_argument&) {
    result.slope_fitted = false;
  }
}

}  // namespace

RunResult run_prepared(const RunConfig& config, const PreparedExperiment& prep) {
  const auto start = std::chrono::steady_clock::now();
  Metrics met;
  if (prep.reference) {
    met.has_ref = true;
    met.x_star = prep.reference->x_star;
    met.x_star_sq = met.x_star.squaredNorm();
    met.f_star = prep.reference->f_star;
  }
  RunResult result = config.algorithm == AlgorithmKind::NDDA
                         ? run_ndda(config, prep, met)
                         : run_baseline(config, prep, met);
  result.has_reference = met.has_ref;
  result.f_star = met.f_star;
  fit_result_slope(result);
  if (!config.out.empty()) write_trace(result.rows, config.out);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

RunResult run(const RunConfig& config) {
  return run_prepared(config, prepare(config));
}

std::string RunResult::to_json() const {
  json j;
  j["format"] = "ndda-run-v1";
  j["config"] = json::parse(config.to_json());
  j["beta"] = beta;
  j["L"] = L;
  j["a_resolved"] = a_resolved;
  j["has_reference"] = has_reference;
  j["f_star"] = f_star;
  j["rows_recorded"] = rows.size();
  if (!rows.empty()) {
    j["final_t"] = rows.back().t;
    j["final_gap_avg"] = rows.back().gap_avg;
    j["final_res_agent1"] = rows.back().res_agent1;
  }
  if (slope_fitted) j["fitted_slope"] = fitted_slope;
  if (checks_run) j["checks"] = json::parse(checks.to_json());
  return j.dump(2);
}

CompareReport compare(const std::vector<RunConfig>& configs,
                      std::vector<RunResult>* results) {
  if (configs.empty()) throw ConfigError("(compare)", "no configs given");
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const auto& a = configs[0];
    const auto& b = configs[i];
    if (a.seed != b.seed)
      throw ConfigError("seed", "compare configs must share the seed");
    if (a.problem.path != b.problem.path || a.problem.n != b.problem.n ||
        a.problem.m != b.problem.m || a.problem.p_i != b.problem.p_i ||
        a.problem.sparsity != b.problem.sparsity ||
        a.problem.noise_sigma2 != b.problem.noise_sigma2)
      throw ConfigError("problem", "compare configs must share the problem");
    if (a.topology.path != b.topology.path ||
        a.topology.ratio != b.topology.ratio)
      throw ConfigError("topology", "compare configs must share the topology");
  }
  const PreparedExperiment prep = prepare(configs[0]);
  CompareReport report;
  for (const auto& cfg : configs) {
    RunResult r = run_prepared(cfg, prep);
    CompareEntry e;
    e.algorithm = to_string(cfg.algorithm);
    e.final_gap = r.rows.empty() ? kNaN : r.rows.back().gap_avg;
    e.final_res_agent1 = r.rows.empty() ? kNaN : r.rows.back().res_agent1;
    e.fitted_slope = r.fitted_slope;
    e.slope_fitted = r.slope_fitted;
    report.entries.push_back(e);
    if (results) results->push_back(std::move(r));
  }
  return report;
}

std::string CompareReport::to_json() const {
  json j;
  j["format"] = "ndda-compare-v1";
  j["entries"] = json::array();
  for (const auto& e : entries) {
    json je;
    je["algorithm"] = e.algorithm;
    je["final_gap"] = e.final_gap;
    je["final_res_agent1"] = e.final_res_agent1;
    if (e.slope_fitted) je["fitted_slope"] = e.fitted_slope;
    j["entries"].push_back(je);
  }
  return j.dump(2);
}

CertifyReport certify(const RunConfig& config) {
  RunConfig cfg = config;
  cfg.compute_reference = false;  // the certificate needs only beta and L
  const PreparedExperiment prep = prepare(cfg);
  CertifyReport rep;
  rep.beta = prep.spectral.beta;
  rep.L = prep.inst.L;
  double a;
  if (config.control.kind == ControlSequence::Kind::Constant)
    a = resolve_constant_a(config, prep);
  else
    a = config.control.value;  // certify the scale of a decaying schedule
  rep.report = check_admissible(rep.beta, rep.L, a);
  rep.max_a = max_admissible_a(rep.beta, rep.L);
  return rep;
}

std::string CertifyReport::to_json() const {
  json j;
  j["format"] = "ndda-certify-v1";
  j["beta"] = beta;
  j["L"] = L;
  j["report"] = json::parse(report.to_json());
  j["max_admissible_a"] = max_a;
  return j.dump(2);
}

void write_trace(const std::vector<TraceRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace: cannot open " + path);
  out << "t,res_agent1,res_max,f_agent1,f_avg,gap_avg,consensus_err_sq,bound\n";
  for (const auto& r : rows) {
    out << r.t << ',' << fmt17(r.res_agent1) << ',' << fmt17(r.res_max) << ','
        << fmt17(r.f_agent1) << ',' << fmt17(r.f_avg) << ','
        << fmt17(r.gap_avg) << ',' << fmt17(r.consensus_err_sq) << ','
        << fmt17(r.bound) << '\n';
  }
  if (!out) throw std::runtime_error("write_trace: write failed for " + path);
}

std::vector<TraceRow> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_trace: empty file " + path);
  if (line !=
      "t,res_agent1,res_max,f_agent1,f_avg,gap_avg,consensus_err_sq,bound")
    throw std::runtime_error("read_trace: unexpected header in " + path);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow r;
    double* fields[] = {&r.res_agent1, &r.res_max,  &r.f_agent1, &r.f_avg,
                        &r.gap_avg,    &r.consensus_err_sq, &r.bound};
    std::istringstream ss(line);
    std::string tok;
    if (!std::getline(ss, tok, ',')) break;
    r.t = std::stol(tok);
    for (double* f : fields) {
      if (!std::getline(ss, tok, ','))
        throw std::runtime_error("read_trace: short row in " + path);
      *f = std::stod(tok);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ndda
