#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ndda/harness.hpp"

using namespace ndda;

namespace {

RunConfig tiny_config() {
  RunConfig c;
  c.problem.n = 4;
  c.problem.m = 30;
  c.problem.p_i = 5;
  c.problem.sparsity = 3;
  c.problem.noise_sigma2 = 0.01;
  c.topology.ratio = 0.6;
  c.algorithm = AlgorithmKind::NDDA;
  c.control.rule = ControlSpec::ConstantRule::MaxAdmissible;
  c.horizon = 200;
  c.stride = 1;
  c.seed = 5;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config json round trip") {
  RunConfig c = tiny_config();
  c.control.kind = ControlSequence::Kind::InverseSqrt;
  c.control.rule = ControlSpec::ConstantRule::Numeric;
  c.control.value = 0.5;
  c.out = "x.csv";
  const RunConfig back = RunConfig::from_json(c.to_json());
  CHECK(back.problem.n == 4);
  CHECK(back.topology.ratio == 0.6);
  CHECK(back.algorithm == AlgorithmKind::NDDA);
  CHECK(back.control.kind == ControlSequence::Kind::InverseSqrt);
  CHECK(back.control.value == 0.5);
  CHECK(back.horizon == 200);
  CHECK(back.out == "x.csv");
}

TEST_CASE("config errors carry field paths") {
  try {
    RunConfig::from_json(R"({"schema_version": 1})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "problem");
  }

  try {
    RunConfig::from_json(R"({"schema_version": 1,
      "problem": {"n": 0, "m": 30, "p_i": 5, "sparsity": 3, "noise_sigma2": 0.01},
      "topology": {"ratio": 0.5}, "algorithm": "ndda",
      "control": {"kind": "constant", "a": 0.1}, "horizon": 10, "seed": 1})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "problem.n");
  }

  try {
    RunConfig c = tiny_config();
    const std::string text = c.to_json();
    std::string broken = text;
    broken.replace(broken.find("\"ndda\""), 6, "\"newton\"");
    RunConfig::from_json(broken);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "algorithm");
  }
}

TEST_CASE("symbolic step rules resolve against the prepared instance") {
  const RunConfig c = tiny_config();
  const PreparedExperiment prep = prepare(c);
  CHECK(resolve_constant_a(c, prep) ==
        doctest::Approx(max_admissible_a(prep.spectral.beta, prep.inst.L)));

  RunConfig om = c;
  om.control.rule = ControlSpec::ConstantRule::OneOverM;
  CHECK(resolve_constant_a(om, prep) == doctest::Approx(1.0 / 30));

  RunConfig num = c;
  num.control.rule = ControlSpec::ConstantRule::Numeric;
  num.control.value = 3e-4;
  CHECK(resolve_constant_a(num, prep) == 3e-4);
}

TEST_CASE("certify reports the theorem certificate") {
  const RunConfig c = tiny_config();
  const CertifyReport rep = certify(c);
  CHECK(rep.beta > 0);
  CHECK(rep.beta < 1);
  CHECK(rep.L > 0);
  CHECK(rep.report.admissible);
  CHECK(rep.max_a == doctest::Approx(max_admissible_a(rep.beta, rep.L)));
}

TEST_CASE("ndda run passes its own inequality checks") {
  const RunConfig c = tiny_config();
  const RunResult r = run(c);
  CHECK(r.checks_run);
  CHECK(r.checks.ok);
  CHECK(r.checks.rounds == 200);
  CHECK(r.has_reference);
  CHECK(r.rows.size() == 200);
  CHECK(r.rows.back().bound >= r.rows.back().f_avg - r.f_star);
}

TEST_CASE("inadmissible constant steps need force") {
  RunConfig c = tiny_config();
  c.control.rule = ControlSpec::ConstantRule::Numeric;
  c.control.value = 1.0;  // far beyond the certificate
  CHECK_THROWS_AS(run(c), ConfigError);
  c.force = true;
  c.horizon = 5;
  CHECK_NOTHROW(run(c));
}

TEST_CASE("stride subsamples the stride-1 trace exactly") {
  RunConfig c1 = tiny_config();
  RunConfig c10 = tiny_config();
  c10.stride = 10;
  const RunResult r1 = run(c1);
  const RunResult r10 = run(c10);
  REQUIRE(r10.rows.size() == 20);
  for (const TraceRow& row : r10.rows) {
    const TraceRow& full = r1.rows[static_cast<std::size_t>(row.t - 1)];
    CHECK(full.t == row.t);
    CHECK(full.f_agent1 == row.f_agent1);
    CHECK(full.f_avg == row.f_avg);
    CHECK(full.gap_avg == row.gap_avg);
    CHECK(full.consensus_err_sq == row.consensus_err_sq);
  }
}

TEST_CASE("identical configs give byte-identical traces") {
  RunConfig a = tiny_config();
  RunConfig b = tiny_config();
  a.out = "harness_trace_a.csv";
  b.out = "harness_trace_b.csv";
  run(a);
  run(b);
  const std::string ta = slurp(a.out);
  CHECK(ta == slurp(b.out));
  CHECK(ta.rfind("t,res_agent1,res_max,f_agent1,f_avg,gap_avg,consensus_err_sq,bound", 0) == 0);
  std::remove(a.out.c_str());
  std::remove(b.out.c_str());
}

TEST_CASE("trace files round-trip to full precision") {
  RunConfig c = tiny_config();
  c.out = "harness_trace_rt.csv";
  c.stride = 7;
  const RunResult r = run(c);
  const std::vector<TraceRow> back = read_trace(c.out);
  REQUIRE(back.size() == r.rows.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].t == r.rows[k].t);
    CHECK(back[k].res_agent1 == r.rows[k].res_agent1);
    CHECK(back[k].f_avg == r.rows[k].f_avg);
    CHECK(back[k].gap_avg == r.rows[k].gap_avg);
    CHECK(back[k].bound == r.rows[k].bound);
  }
  std::remove(c.out.c_str());
}

TEST_CASE("compare shares one instance across algorithms") {
  RunConfig ndda = tiny_config();
  RunConfig dda = tiny_config();
  dda.algorithm = AlgorithmKind::DDA;
  dda.control.kind = ControlSequence::Kind::InverseSqrt;
  dda.control.rule = ControlSpec::ConstantRule::Numeric;
  dda.control.value = 1.0;
  const CompareReport rep = compare({ndda, dda});
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].algorithm == "ndda");
  CHECK(rep.entries[1].algorithm == "dda");

  RunConfig other = dda;
  other.seed = 6;
  CHECK_THROWS_AS(compare({ndda, other}), ConfigError);
}

TEST_CASE("problem and topology files feed a run") {
  const RunConfig base = tiny_config();
  const PreparedExperiment prep = prepare(base);
  save_instance(prep.inst, "harness_shared.lasso");
  {
    std::ofstream out("harness_shared.topo.json");
    out << prep.topo.to_json() << "\n";
  }
  RunConfig c = tiny_config();
  c.problem = ProblemSpec{};
  c.problem.path = "harness_shared.lasso";
  c.topology = TopologySpec{};
  c.topology.path = "harness_shared.topo.json";
  const RunResult r = run(c);
  CHECK(r.checks.ok);
  const RunResult direct = run(base);
  CHECK(r.rows.back().f_avg == direct.rows.back().f_avg);
  std::remove("harness_shared.lasso");
  std::remove("harness_shared.topo.json");
}
