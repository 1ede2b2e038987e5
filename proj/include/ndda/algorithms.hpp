#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ndda/graph.hpp"
#include "ndda/problem.hpp"
#include "ndda/prox.hpp"

namespace ndda {

/// Positive step/control parameters a_t.
struct ControlSequence {
  enum class Kind { Constant, InverseSqrt };
  Kind kind = Kind::Constant;
  double c = 0.0;  // the constant a, or the scale of c/sqrt(t+1)

  static ControlSequence constant(double a);
  static ControlSequence inverse_sqrt(double c);

  double at(long t) const {
    return kind == Kind::Constant ? c
                                  : c / std::sqrt(static_cast<double>(t) + 1.0);
  }
};

/// Raised when an iterate or tracker turns non-finite.
struct DivergenceError : std::runtime_error {
  int agent;   // 1-based; 0 when not agent-specific
  long round;
  DivergenceError(int agent_, long round_, const std::string& what_)
      : std::runtime_error(what_), agent(agent_), round(round_) {}
};

/// All agents' N-DDA state, rows indexed by agent: primal X, trackers S and
/// H, dual accumulator Z = sum_k a h_k, and the cached gradients at X.
struct NddaState {
  Eigen::MatrixXd X, S, H, Z, GradPrev;  // each n x m
  long t = 0;

  int n() const { return static_cast<int>(X.rows()); }
};

NddaState ndda_init(const ProblemInstance& inst, const WeightMatrix& P);

/// One synchronous round: primal projection from the round-t dual, then the
/// two tracker consensus updates, all reads from the round-t snapshot.
void ndda_round(NddaState& state, const ProblemInstance& inst,
                const WeightMatrix& P, double a, const DualProjector& proj);

/// Centralized dual averaging, the n=1 reference.
struct CdaState {
  Eigen::VectorXd x, u;  // u accumulates the unscaled full gradients
  long t = 0;
};

CdaState cda_init(const ProblemInstance& inst);
void cda_round(CdaState& state, const ProblemInstance& inst, double a_t,
               const DualProjector& proj);

/// Classical distributed dual averaging baseline.
struct DdaState {
  Eigen::MatrixXd X, Q;  // n x m
  long t = 0;
};

DdaState dda_init(const ProblemInstance& inst, const WeightMatrix& P);
void dda_round(DdaState& state, const ProblemInstance& inst,
               const WeightMatrix& P, double a_t, const DualProjector& proj);

/// Distributed projected gradient baseline.
struct DpgState {
  Eigen::MatrixXd X;  // n x m
  long t = 0;
};

DpgState dpg_init(const ProblemInstance& inst, const WeightMatrix& P);
void dpg_round(DpgState& state, const ProblemInstance& inst,
               const WeightMatrix& P, double alpha_t);

/// Auxiliary sequence y_t driven by the exact mean gradient g_t.
struct AuxState {
  Eigen::VectorXd y, u;  // u accumulates the unscaled mean gradients
  long t = 0;
};

AuxState aux_init(int m);
void auxiliary_round(AuxState& state, const Eigen::VectorXd& g_t, double a,
                     const DualProjector& proj);

/// Incremental running mean of a vector sequence.
struct RunningMean {
  Eigen::VectorXd sum;
  long count = 0;

  explicit RunningMean(int m) : sum(Eigen::VectorXd::Zero(m)) {}
  void add(const Eigen::VectorXd& v) {
    sum += v;
    ++count;
  }
  Eigen::VectorXd mean() const {
    if (count == 0) throw std::logic_error("RunningMean: empty");
    return sum / static_cast<double>(count);
  }
};

}  // namespace ndda
