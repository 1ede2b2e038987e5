#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndda/algorithms.hpp"
#include "ndda/analysis.hpp"
#include "ndda/graph.hpp"
#include "ndda/problem.hpp"

namespace ndda {

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(const std::string& field_, const std::string& what_)
      : std::runtime_error(field_ + ": " + what_), field(field_) {}
};

struct ProblemSpec {
  // either inline LASSO parameters or a path to a saved instance
  std::string path;
  int n = 0, m = 0, p_i = 0, sparsity = 0;
  double noise_sigma2 = 0.0;

  bool from_file() const { return !path.empty(); }
};

struct TopologySpec {
  // either an Erdos-Renyi ratio or a path to a saved topology
  std::string path;
  double ratio = 0.0;

  bool from_file() const { return !path.empty(); }
};

enum class AlgorithmKind { CDA, DDA, DPG, NDDA };

std::string to_string(AlgorithmKind kind);
AlgorithmKind algorithm_from_string(const std::string& name);

struct ControlSpec {
  ControlSequence::Kind kind = ControlSequence::Kind::Constant;
  // for constant controls the value may be symbolic
  enum class ConstantRule { Numeric, MaxAdmissible, OneOverM };
  ConstantRule rule = ConstantRule::Numeric;
  double value = 0.0;  // numeric a, or c of c/sqrt(t+1)
};

struct RunConfig {
  int schema_version = 1;
  ProblemSpec problem;
  TopologySpec topology;
  AlgorithmKind algorithm = AlgorithmKind::NDDA;
  ControlSpec control;
  long horizon = 1;
  long stride = 1;
  std::uint64_t seed = 0;
  std::string out;  // trace path, empty = no file
  bool force = false;
  double reference_tol = 1e-10;
  bool compute_reference = true;

  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string to_json() const;
};

/// One row of the trace file, recorded every `stride` rounds.
struct TraceRow {
  long t = 0;
  double res_agent1 = 0.0;  // ||x_{1,t} - x*||^2 / ||x*||^2
  double res_max = 0.0;
  double f_agent1 = 0.0;
  double f_avg = 0.0;  // f at ytilde_t (N-DDA/CDA) or xtilde_{1,t} (DDA/DPG)
  double gap_avg = 0.0;
  double consensus_err_sq = 0.0;
  double bound = 0.0;  // Theorem 4 value; NaN for baselines
};

struct RunResult {
  RunConfig config;
  double beta = 0.0;
  double L = 0.0;
  double a_resolved = 0.0;  // constant step after symbolic resolution
  bool has_reference = false;
  double f_star = 0.0;
  std::vector<TraceRow> rows;
  bool checks_run = false;
  TraceChecks checks;
  double fitted_slope = 0.0;  // log-log slope of gap_avg over the tail window
  bool slope_fitted = false;
  double wall_seconds = 0.0;

  std::string to_json() const;
};

/// Fully resolved experiment inputs shared by run/compare/certify.
struct PreparedExperiment {
  ProblemInstance inst;
  Topology topo;
  WeightMatrix P;
  SpectralInfo spectral;
  std::optional<ReferenceSolution> reference;
};

PreparedExperiment prepare(const RunConfig& config);

/// Resolve a constant control value ("max_admissible", "1/m", or numeric).
double resolve_constant_a(const RunConfig& config, const PreparedExperiment& prep);

RunResult run(const RunConfig& config);
RunResult run_prepared(const RunConfig& config, const PreparedExperiment& prep);

struct CompareEntry {
  std::string algorithm;
  double final_gap = 0.0;
  double final_res_agent1 = 0.0;
  double fitted_slope = 0.0;
  bool slope_fitted = false;
};

struct CompareReport {
  std::vector<CompareEntry> entries;
  std::string to_json() const;
};

/// Run several configs against the same instance/topology and align results.
CompareReport compare(const std::vector<RunConfig>& configs,
                      std::vector<RunResult>* results = nullptr);

/// Theorem 4 certificate for a config: beta, L, rho, margins, max step.
struct CertifyReport {
  double beta = 0.0, L = 0.0;
  AdmissibilityReport report;
  double max_a = 0.0;
  std::string to_json() const;
};

CertifyReport certify(const RunConfig& config);

void write_trace(const std::vector<TraceRow>& rows, const std::string& path);
std::vector<TraceRow> read_trace(const std::string& path);

}  // namespace ndda
