#include "ndda/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ndda/rng.hpp"

namespace ndda {

using json = nlohmann::json;

namespace {

// stream ids for generate_lasso
constexpr std::uint64_t kStreamSupport = 0;
constexpr std::uint64_t kStreamNoise = 1;
constexpr std::uint64_t kStreamMatrixBase = 100;

LocalObjective make_lasso_local(const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& y) {
  LocalObjective f;
  f.value = [A, y](const Eigen::VectorXd& x) {
    return 0.5 * (y - A * x).squaredNorm();
  };
  f.gradient = [A, y](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(A.transpose() * (A * x - y));
  };
  f.smoothness = spectral_norm_squared(A);
  return f;
}

}  // namespace

double ProblemInstance::objective(const Eigen::VectorXd& x) const {
  double f = 0.0;
  for (const auto& loc : locals) f += loc.value(x);
  return f;
}

Eigen::VectorXd ProblemInstance::full_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (const auto& loc : locals) g += loc.gradient(x);
  return g;
}

ProblemInstance generate_lasso(int n, int m, int p_i, double noise_sigma2,
                               int sparsity, std::uint64_t seed) {
  if (n < 1 || m < 1 || p_i < 1 || sparsity < 0 || sparsity > m ||
      noise_sigma2 < 0.0)
    throw std::invalid_argument("generate_lasso: invalid parameters");

  auto data = std::make_shared<LassoData>();
  data->noise_sigma2 = noise_sigma2;
  data->seed = seed;

  // planted sparse vector: support positions then values, one stream
  Rng support_rng = Rng(seed).stream(kStreamSupport);
  data->x_sharp = Eigen::VectorXd::Zero(m);
  std::vector<int> indices(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) indices[static_cast<std::size_t>(i)] = i;
  // partial Fisher-Yates picks `sparsity` distinct positions
  for (int k = 0; k < sparsity; ++k) {
    const auto j = k + static_cast<int>(support_rng.below(
                           static_cast<std::uint64_t>(m - k)));
    std::swap(indices[static_cast<std::size_t>(k)],
              indices[static_cast<std::size_t>(j)]);
    data->x_sharp(indices[static_cast<std::size_t>(k)]) = support_rng.gaussian();
  }
  data->radius = 1.1 * data->x_sharp.lpNorm<1>();

  Rng noise_rng = Rng(seed).stream(kStreamNoise);
  const double noise_std = std::sqrt(noise_sigma2);

  ProblemInstance inst;
  inst.m = m;
  data->A.reserve(static_cast<std::size_t>(n));
  data->y.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng a_rng = Rng(seed).stream(kStreamMatrixBase + static_cast<std::uint64_t>(i));
    Eigen::MatrixXd A(p_i, m);
    for (int r = 0; r < p_i; ++r)
      for (int c = 0; c < m; ++c) A(r, c) = a_rng.gaussian();
    Eigen::VectorXd b(p_i);
    for (int r = 0; r < p_i; ++r) b(r) = noise_std * noise_rng.gaussian();
    Eigen::VectorXd y = A * data->x_sharp + b;
    data->A.push_back(A);
    data->y.push_back(y);
    inst.locals.push_back(make_lasso_local(A, y));
  }

  // degenerate all-zero instance still needs a valid feasible set
  const double R = data->radius > 0.0 ? data->radius : 1.0;
  inst.set = FeasibleSet::l1_ball(m, R);
  inst.L = 0.0;
  for (const auto& loc : inst.locals) inst.L = std::max(inst.L, loc.smoothness);
  inst.lasso = std::move(data);
  return inst;
}

Eigen::VectorXd local_gradient(const ProblemInstance& inst, int i,
                               const Eigen::VectorXd& x) {
  if (i < 0 || i >= inst.n())
    throw std::out_of_range("local_gradient: agent index");
  if (x.size() != inst.m)
    throw std::invalid_argument("local_gradient: dimension mismatch");
  return inst.locals[static_cast<std::size_t>(i)].gradient(x);
}

double spectral_norm_squared(const Eigen::MatrixXd& A) {
  const Eigen::Index m = A.cols();
  Rng rng(0x5eedb002ULL);
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = rng.gaussian();
  v /= v.norm();
  double lambda = 0.0;
  for (long it = 0; it < 100000; ++it) {
    Eigen::VectorXd u = A.transpose() * (A * v);
    const double lambda_new = u.norm();
    if (lambda_new == 0.0) return 0.0;
    v = u / lambda_new;
    if (std::abs(lambda_new - lambda) <= 1e-10 * std::max(1.0, lambda_new))
      return lambda_new;
    lambda = lambda_new;
  }
  throw std::runtime_error("spectral_norm_squared: power iteration failed");
}

double smoothness_constant(const ProblemInstance& inst, int i) {
  if (i < 0 || i >= inst.n())
    throw std::out_of_range("smoothness_constant: agent index");
  return inst.locals[static_cast<std::size_t>(i)].smoothness;
}

ReferenceSolution reference_solution(const ProblemInstance& inst, double tol,
                                     long max_iters) {
  if (!(inst.L > 0.0))
    throw std::invalid_argument("reference_solution: instance has L <= 0");

  // LASSO fast path: one stacked least-squares system instead of n
  // std::function round trips per gradient
  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  double L_full = 0.0;  // Lipschitz constant of the FULL gradient, not max_i L_i
  if (inst.lasso) {
    Eigen::Index rows = 0;
    for (const auto& A : inst.lasso->A) rows += A.rows();
    auto A_all = std::make_shared<Eigen::MatrixXd>(rows, inst.m);
    auto y_all = std::make_shared<Eigen::VectorXd>(rows);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < inst.lasso->A.size(); ++i) {
      const auto& A = inst.lasso->A[i];
      A_all->middleRows(at, A.rows()) = A;
      y_all->segment(at, A.rows()) = inst.lasso->y[i];
      at += A.rows();
    }
    objective = [A_all, y_all](const Eigen::VectorXd& x) {
      return 0.5 * (*y_all - *A_all * x).squaredNorm();
    };
    gradient = [A_all, y_all](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(A_all->transpose() * (*A_all * x - *y_all));
    };
    L_full = spectral_norm_squared(*A_all);
  } else {
    objective = [&inst](const Eigen::VectorXd& x) { return inst.objective(x); };
    gradient = [&inst](const Eigen::VectorXd& x) { return inst.full_gradient(x); };
    for (const auto& loc : inst.locals) L_full += loc.smoothness;
  }
  const double step = 1.0 / L_full;

  // FISTA with gradient-based adaptive restart: the step is always
  // accepted, momentum resets when it points against the gradient mapping
  Eigen::VectorXd x = Eigen::VectorXd::Zero(inst.m);
  Eigen::VectorXd z = x;
  double theta = 1.0;
  for (long it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd x_new = inst.set.project(z - step * gradient(z));
    if ((z - x_new).dot(x_new - x) > 0.0) theta = 1.0;
    const double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    z = x_new + ((theta - 1.0) / theta_new) * (x_new - x);
    x = x_new;
    theta = theta_new;
    if ((it & 0xF) == 0) {
      const double resid = (x - inst.set.project(x - step * gradient(x))).norm();
      if (resid <= tol) {
        ReferenceSolution ref;
        ref.x_star = x;
        ref.f_star = objective(x);
        ref.tol = tol;
        return ref;
      }
    }
  }
  throw std::runtime_error("reference_solution: iteration cap exceeded");
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  if (!inst.lasso)
    throw std::invalid_argument("save_instance: only LASSO instances serialize");
  const auto& d = *inst.lasso;
  json header;
  header["format"] = "ndda-lasso-v1";
  header["n"] = inst.n();
  header["m"] = inst.m;
  header["p"] = json::array();
  for (const auto& A : d.A) header["p"].push_back(A.rows());
  header["seed"] = d.seed;
  header["R"] = d.radius;
  header["L"] = inst.L;
  header["noise_sigma2"] = d.noise_sigma2;
  header["layout"] = "A_1..A_n row-major, y_1..y_n, x_sharp; float64 little-endian";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << header.dump() << "\n";
  auto write_block = [&out](const double* p, std::size_t count) {
    out.write(reinterpret_cast<const char*>(p),
              static_cast<std::streamsize>(count * sizeof(double)));
  };
  for (const auto& A : d.A) {
    // Eigen is column-major; emit row-major as documented
    for (Eigen::Index r = 0; r < A.rows(); ++r)
      for (Eigen::Index c = 0; c < A.cols(); ++c) {
        const double v = A(r, c);
        write_block(&v, 1);
      }
  }
  for (const auto& y : d.y) write_block(y.data(), static_cast<std::size_t>(y.size()));
  write_block(d.x_sharp.data(), static_cast<std::size_t>(d.x_sharp.size()));
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  std::string header_line;
  std::getline(in, header_line);
  const json header = json::parse(header_line);
  if (header.at("format").get<std::string>() != "ndda-lasso-v1")
    throw std::runtime_error("load_instance: unknown format tag");
  const int n = header.at("n").get<int>();
  const int m = header.at("m").get<int>();

  auto data = std::make_shared<LassoData>();
  data->seed = header.at("seed").get<std::uint64_t>();
  data->radius = header.at("R").get<double>();
  data->noise_sigma2 = header.at("noise_sigma2").get<double>();

  auto read_block = [&in, &path](double* p, std::size_t count) {
    in.read(reinterpret_cast<char*>(p),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("load_instance: truncated file " + path);
  };
  ProblemInstance inst;
  inst.m = m;
  for (int i = 0; i < n; ++i) {
    const int p_i = header.at("p").at(static_cast<std::size_t>(i)).get<int>();
    Eigen::MatrixXd A(p_i, m);
    for (int r = 0; r < p_i; ++r)
      for (int c = 0; c < m; ++c) read_block(&A(r, c), 1);
    data->A.push_back(std::move(A));
  }
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd y(data->A[static_cast<std::size_t>(i)].rows());
    read_block(y.data(), static_cast<std::size_t>(y.size()));
    data->y.push_back(std::move(y));
  }
  data->x_sharp.resize(m);
  read_block(data->x_sharp.data(), static_cast<std::size_t>(m));

  for (int i = 0; i < n; ++i)
    inst.locals.push_back(make_lasso_local(data->A[static_cast<std::size_t>(i)],
                                           data->y[static_cast<std::size_t>(i)]));
  const double R = data->radius > 0.0 ? data->radius : 1.0;
  inst.set = FeasibleSet::l1_ball(m, R);
  inst.L = 0.0;
  for (const auto& loc : inst.locals) inst.L = std::max(inst.L, loc.smoothness);
  inst.lasso = std::move(data);
  return inst;
}

}  // namespace ndda
