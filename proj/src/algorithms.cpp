#include "ndda/algorithms.hpp"

#include <cmath>

namespace ndda {

ControlSequence ControlSequence::constant(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("ControlSequence: a must be > 0");
  ControlSequence s;
  s.kind = Kind::Constant;
  s.c = a;
  return s;
}

ControlSequence ControlSequence::inverse_sqrt(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("ControlSequence: c must be > 0");
  ControlSequence s;
  s.kind = Kind::InverseSqrt;
  s.c = c;
  return s;
}

namespace {

void check_finite(const Eigen::MatrixXd& M, long round, const char* what) {
  if (M.allFinite()) return;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (!M.row(i).allFinite())
      throw DivergenceError(static_cast<int>(i) + 1, round,
                            std::string(what) + " diverged at agent " +
                                std::to_string(i + 1) + ", round " +
                                std::to_string(round));
  throw DivergenceError(0, round, std::string(what) + " diverged");
}

}  // namespace

NddaState ndda_init(const ProblemInstance& inst, const WeightMatrix& P) {
  if (inst.n() != P.n())
    throw std::invalid_argument("ndda_init: instance/weight-matrix n mismatch");
  const int n = inst.n();
  NddaState st;
  st.X = Eigen::MatrixXd::Zero(n, inst.m);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(inst.m);
  st.GradPrev.resize(n, inst.m);
  for (int i = 0; i < n; ++i)
    st.GradPrev.row(i) = inst.locals[static_cast<std::size_t>(i)].gradient(zero);
  st.S = st.GradPrev;
  st.H = st.GradPrev;
  st.Z = Eigen::MatrixXd::Zero(n, inst.m);
  st.t = 0;
  return st;
}

void ndda_round(NddaState& state, const ProblemInstance& inst,
                const WeightMatrix& P, double a, const DualProjector& proj) {
  const int n = state.n();
  // (1) dual accumulation and primal projection, Z now holds sum_{k<=t} a h_k
  state.Z.noalias() += a * state.H;
  check_finite(state.Z, state.t + 1, "N-DDA dual accumulator z");
  for (int i = 0; i < n; ++i)
    state.X.row(i) = proj(state.Z.row(i).transpose()).transpose();
  // (2)-(3) tracker updates; all consensus sums read the round-t snapshot
  Eigen::MatrixXd G_new(n, inst.m);
  for (int i = 0; i < n; ++i)
    G_new.row(i) = inst.locals[static_cast<std::size_t>(i)]
                       .gradient(state.X.row(i).transpose())
                       .transpose();
  Eigen::MatrixXd S_new = P.P * state.S + G_new - state.GradPrev;
  Eigen::MatrixXd H_new = P.P * state.H + S_new - state.S;
  state.S = std::move(S_new);
  state.H = std::move(H_new);
  state.GradPrev = std::move(G_new);
  ++state.t;
  check_finite(state.S, state.t, "N-DDA tracker s");
  check_finite(state.H, state.t, "N-DDA tracker h");
  check_finite(state.X, state.t, "N-DDA iterate x");
}

CdaState cda_init(const ProblemInstance& inst) {
  CdaState st;
  st.x = Eigen::VectorXd::Zero(inst.m);
  st.u = Eigen::VectorXd::Zero(inst.m);
  st.t = 0;
  return st;
}

void cda_round(CdaState& state, const ProblemInstance& inst, double a_t,
               const DualProjector& proj) {
  state.u += inst.full_gradient(state.x);
  state.x = proj(a_t * state.u);
  ++state.t;
  if (!state.x.allFinite())
    throw DivergenceError(0, state.t, "CDA iterate diverged");
}

DdaState dda_init(const ProblemInstance& inst, const WeightMatrix& P) {
  if (inst.n() != P.n())
    throw std::invalid_argument("dda_init: instance/weight-matrix n mismatch");
  DdaState st;
  st.X = Eigen::MatrixXd::Zero(inst.n(), inst.m);
  st.Q = Eigen::MatrixXd::Zero(inst.n(), inst.m);
  st.t = 0;
  return st;
}

void dda_round(DdaState& state, const ProblemInstance& inst,
               const WeightMatrix& P, double a_t, const DualProjector& proj) {
  const int n = static_cast<int>(state.X.rows());
  Eigen::MatrixXd G(n, inst.m);
  for (int i = 0; i < n; ++i)
    G.row(i) = inst.locals[static_cast<std::size_t>(i)]
                   .gradient(state.X.row(i).transpose())
                   .transpose();
  state.Q = P.P * state.Q + G;
  for (int i = 0; i < n; ++i)
    state.X.row(i) = proj(a_t * state.Q.row(i).transpose()).transpose();
  ++state.t;
  check_finite(state.Q, state.t, "DDA dual estimate");
  check_finite(state.X, state.t, "DDA iterate");
}

DpgState dpg_init(const ProblemInstance& inst, const WeightMatrix& P) {
  if (inst.n() != P.n())
    throw std::invalid_argument("dpg_init: instance/weight-matrix n mismatch");
  DpgState st;
  st.X = Eigen::MatrixXd::Zero(inst.n(), inst.m);
  st.t = 0;
  return st;
}

void dpg_round(DpgState& state, const ProblemInstance& inst,
               const WeightMatrix& P, double alpha_t) {
  const int n = static_cast<int>(state.X.rows());
  const Eigen::MatrixXd V = P.P * state.X;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = V.row(i).transpose();
    const Eigen::VectorXd g =
        inst.locals[static_cast<std::size_t>(i)].gradient(v);
    state.X.row(i) = inst.set.project(v - alpha_t * g).transpose();
  }
  ++state.t;
  check_finite(state.X, state.t, "DPG iterate");
}

AuxState aux_init(int m) {
  AuxState st;
  st.y = Eigen::VectorXd::Zero(m);
  st.u = Eigen::VectorXd::Zero(m);
  st.t = 0;
  return st;
}

void auxiliary_round(AuxState& state, const Eigen::VectorXd& g_t, double a,
                     const DualProjector& proj) {
  state.u += g_t;
  state.y = proj(a * state.u);
  ++state.t;
}

}  // namespace ndda
