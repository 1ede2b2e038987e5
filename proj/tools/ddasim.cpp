// Command-line driver: generate instances, certify step sizes, run and
// compare algorithms, and fit empirical convergence rates from trace files.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndda/harness.hpp"
#include "ndda/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitVerification = 3;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed dual averaging simulator"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Emit instance and topology files");
  int g_n = 10, g_m = 100, g_p = 10, g_sparsity = 5;
  double g_noise = 0.01, g_ratio = 0.4;
  std::uint64_t g_seed = 0;
  std::string g_out = "instance";
  gen->add_option("--n", g_n, "agent count");
  gen->add_option("--m", g_m, "dimension");
  gen->add_option("--p-i", g_p, "rows per local data matrix");
  gen->add_option("--sparsity", g_sparsity, "nonzeros in the planted vector");
  gen->add_option("--noise-sigma2", g_noise, "Gaussian noise variance");
  gen->add_option("--ratio", g_ratio, "Erdos-Renyi edge probability");
  gen->add_option("--seed", g_seed, "master seed");
  gen->add_option("--out", g_out, "output prefix (<out>.lasso, <out>.topo.json, <out>.weights.json)");

  // certify
  auto* cert = app.add_subcommand("certify", "Theorem step-size certificate for a config");
  std::string c_config;
  cert->add_option("--config", c_config, "run config (JSON)")->required();

  // run
  auto* runcmd = app.add_subcommand("run", "Run one algorithm and write its trace");
  std::string r_config, r_out_override, r_result;
  bool r_force = false;
  std::uint64_t r_seed_override = 0;
  bool r_seed_set = false;
  runcmd->add_option("--config", r_config, "run config (JSON)")->required();
  runcmd->add_option("--out", r_out_override, "override trace output path");
  runcmd->add_option("--result", r_result, "write the run summary JSON here");
  runcmd->add_flag("--force", r_force, "run even if the step is inadmissible");
  runcmd->add_option("--seed", r_seed_override, "override the config seed");

  // compare
  auto* cmp = app.add_subcommand("compare", "Run several configs on a shared instance");
  std::vector<std::string> m_configs;
  cmp->add_option("--config", m_configs, "run configs (repeatable)")->required();

  // fit-rate
  auto* fit = app.add_subcommand("fit-rate", "Log-log slope of a trace column");
  std::string f_trace, f_column = "gap_avg";
  long f_tmin = 100, f_tmax = 10000;
  fit->add_option("--trace", f_trace, "trace CSV file")->required();
  fit->add_option("--column", f_column, "gap_avg | res_agent1 | f_agent1");
  fit->add_option("--tmin", f_tmin, "window start");
  fit->add_option("--tmax", f_tmax, "window end");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto inst = ndda::generate_lasso(
          g_n, g_m, g_p, g_noise, g_sparsity,
          ndda::Rng::derive(g_seed, 1000));
      ndda::save_instance(inst, g_out + ".lasso");
      const auto topo =
          ndda::erdos_renyi(g_n, g_ratio, ndda::Rng::derive(g_seed, 2000));
      write_file(g_out + ".topo.json", topo.to_json());
      const auto P = ndda::metropolis_weights(topo);
      write_file(g_out + ".weights.json", P.to_json());
      std::cout << "wrote " << g_out << ".lasso, " << g_out << ".topo.json, "
                << g_out << ".weights.json\n";
      return kExitOk;
    }
    if (*cert) {
      const auto config = ndda::RunConfig::load(c_config);
      std::cout << ndda::certify(config).to_json() << "\n";
      return kExitOk;
    }
    if (*runcmd) {
      auto config = ndda::RunConfig::load(r_config);
      if (!r_out_override.empty()) config.out = r_out_override;
      if (r_force) config.force = true;
      r_seed_set = runcmd->count("--seed") > 0;
      if (r_seed_set) config.seed = r_seed_override;
      const auto result = ndda::run(config);
      const std::string summary = result.to_json();
      if (!r_result.empty())
        write_file(r_result, summary);
      else
        std::cout << summary << "\n";
      if (result.checks_run && !result.checks.ok) {
        std::cerr << "verification failed: " << result.checks.violations.size()
                  << " inequality violations\n";
        return kExitVerification;
      }
      return kExitOk;
    }
    if (*cmp) {
      std::vector<ndda::RunConfig> configs;
      for (const auto& path : m_configs)
        configs.push_back(ndda::RunConfig::load(path));
      std::vector<ndda::RunResult> results;
      const auto report = ndda::compare(configs, &results);
      std::cout << report.to_json() << "\n";
      for (const auto& r : results)
        if (r.checks_run && !r.checks.ok) return kExitVerification;
      return kExitOk;
    }
    if (*fit) {
      const auto rows = ndda::read_trace(f_trace);
      std::vector<std::pair<long, double>> series;
      for (const auto& row : rows) {
        double v;
        if (f_column == "gap_avg") v = row.gap_avg;
        else if (f_column == "res_agent1") v = row.res_agent1;
        else if (f_column == "f_agent1") v = row.f_agent1;
        else throw ndda::ConfigError("column", "unknown column " + f_column);
        series.emplace_back(row.t, v);
      }
      int excluded = 0;
      const double slope = ndda::fit_rate(series, f_tmin, f_tmax, &excluded);
      std::cout << "slope " << slope << " (excluded " << excluded
                << " nonpositive points)\n";
      return kExitOk;
    }
  } catch (const ndda::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ndda::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
