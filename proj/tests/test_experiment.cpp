#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ppdac/experiment.hpp"

using namespace ppdac;

TEST_CASE("montecarlo engine determinism") {
  auto fill = [](std::uint64_t trial, Eigen::Ref<Eigen::RowVectorXd> row) {
    RngStream stream(3, trial, Draw::PrivateData);
    row(0) = stream.gaussian(1.0);
    row(1) = stream.uniform01();
  };
  const SampleMatrix sequential = montecarlo(500, 2, fill, 1);
  const SampleMatrix parallel = montecarlo(500, 2, fill, 2);
  const SampleMatrix repeat = montecarlo(500, 2, fill, 2);
  CHECK(sequential.data == parallel.data);
  CHECK(parallel.data == repeat.data);

  const SampleMatrix one = montecarlo(1, 2, fill, 1);
  CHECK(one.trials() == 1);
  CHECK(one.data(0, 0) == sequential.data(0, 0));

  CHECK_THROWS_AS(montecarlo(0, 1, fill, 1), std::invalid_argument);
}

TEST_CASE("spec files parse, resolve, and round-trip") {
  std::stringstream text;
  text << "# comment\n"
       << "experiment = tradeoff\n"
       << "n = 10\n"
       << "trials = 500\n"
       << "target_node = 3\n"
       << "master_seed = 42\n"
       << "sigma_grid = 0.1, 1, 10\n";
  ExperimentSpec spec = parse_spec(text);
  CHECK(spec.experiment == ExperimentKind::DpTradeoff);
  CHECK(spec.target == 2);  // 1-based in files
  CHECK(spec.sigma_grid == std::vector<double>{0.1, 1.0, 10.0});

  const ExperimentSpec resolved = resolve_spec(spec);
  CHECK(resolved.solver == SolverKind::Linear);  // tradeoff default
  CHECK(resolved.trials == 500);

  std::stringstream round(spec_to_text(resolved));
  const ExperimentSpec again = resolve_spec(parse_spec(round));
  CHECK(spec_to_text(again) == spec_to_text(resolved));
  CHECK(spec_hash(again) == spec_hash(resolved));

  std::stringstream bad("nonsense = 1\n");
  CHECK_THROWS_AS(parse_spec(bad), std::invalid_argument);
  std::stringstream bad2("trials ten\n");
  CHECK_THROWS_AS(parse_spec(bad2), std::invalid_argument);
}

TEST_CASE("spec validation") {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::Convergence;
  spec.solver = SolverKind::Linear;
  spec.solver_explicit = true;
  spec.mechanisms = {MechanismKind::DOSP};
  CHECK_THROWS_AS(resolve_spec(spec), ModelViolation);

  ExperimentSpec negative;
  negative.sigma_grid = {-1.0};
  CHECK_THROWS_AS(resolve_spec(negative), std::invalid_argument);
}

TEST_CASE("bundled topology graphs have the documented structure") {
  const Graph g = bundled_topology_graph();
  const Graph gp = bundled_topology_graph_prime();
  const std::vector<int> corrupted = bundled_topology_corrupted();

  CHECK(g.n() == 10);
  CHECK(gp.n() == 10);
  CHECK(g.m() == gp.m() + 1);
  CHECK(g.m() >= g.n());  // non-empty noise subspace for DOSP
  CHECK(is_connected(g));
  CHECK(is_connected(gp));

  // G-prime is G minus exactly one edge.
  for (const auto& edge : gp.edges())
    CHECK(std::find(g.edges().begin(), g.edges().end(), edge) != g.edges().end());

  const CorruptionModel cm_g(g, corrupted);
  const CorruptionModel cm_gp(gp, corrupted);
  CHECK(assumption2_violation(g, cm_g) == -1);
  CHECK(assumption2_violation(gp, cm_gp) == -1);

  // Honest subgraph: connected in G, split in G-prime.
  CHECK(honest_component(g, cm_g, 0) == cm_g.honest());
  const auto split = honest_component(gp, cm_gp, 0);
  CHECK(split.size() < cm_gp.honest().size());
  CHECK(split == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("bundled graphs match the shipped data files") {
  const std::string dir = PPDAC_DATA_DIR;
  const Graph g = load_graph_file(dir + "/topology_G.txt");
  const Graph gp = load_graph_file(dir + "/topology_Gprime.txt");
  CHECK(g.edges() == bundled_topology_graph().edges());
  CHECK(gp.edges() == bundled_topology_graph_prime().edges());
}

TEST_CASE("convergence experiment") {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::Convergence;
  spec.trials = 30;
  spec.T = 200;
  spec.sigma_grid = {0.0, 1.0, 1000.0};
  const ResultTable table = run_convergence(spec, 2);

  auto value = [&](const std::string& mech, double sigma,
                   const std::string& metric, int t) {
    for (const auto& row : table.rows)
      if (row.mechanism == mech && row.sigma_sq == sigma &&
          row.metric == metric && row.t == t)
        return row.value;
    FAIL("row not found");
    return 0.0;
  };

  SUBCASE("zero noise coincides with the baseline") {
    for (const std::string mech : {"dp", "smpc", "dosp"})
      for (int t : {0, 10, 100, 200})
        CHECK(std::abs(value(mech, 0.0, "err2_mean", t) -
                       value("none", 0.0, "err2_mean", t)) < 1e-10);
  }
  SUBCASE("exact zero-sum mechanisms keep full accuracy under huge noise") {
    CHECK(value("smpc", 1000.0, "final_err_inf_max", -1) < 1e-6);
    CHECK(value("dosp", 1000.0, "final_err_inf_max", -1) < 1e-6);
  }
  SUBCASE("dp error grows with the noise") {
    CHECK(value("dp", 1000.0, "final_err_inf_mean", -1) >
          100.0 * value("dp", 1.0, "final_err_inf_mean", -1) / 2.0);
  }
}

TEST_CASE("dp final error scales as sigma over sqrt(n)") {
  // Paired trials at two noise levels; the error std ratio follows the
  // sigma ratio closely because the same standard draws are scaled.
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::Convergence;
  spec.trials = 1000;
  spec.T = 200;
  spec.mechanisms = {MechanismKind::DP};
  spec.sigma_grid = {1.0, 100.0};
  const ResultTable table = run_convergence(spec, 2);

  auto mean_err = [&](double sigma) {
    for (const auto& row : table.rows)
      if (row.mechanism == "dp" && row.sigma_sq == sigma &&
          row.metric == "final_err_inf_mean")
        return row.value;
    FAIL("row not found");
    return 0.0;
  };
  const double ratio = mean_err(100.0) / mean_err(1.0);
  CHECK(ratio == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("calibration experiment analytic rows") {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::Calibration;
  spec.trials = 200;  // keep the unit test light; values checked exactly
  const ResultTable table = run_calibration(spec, 2);

  auto analytic = [&](const std::string& metric) {
    for (const auto& row : table.rows)
      if (row.metric == metric && row.method == "analytic") return row.value;
    FAIL("row not found");
    return 0.0;
  };
  CHECK(analytic("noise_floor_eps_0.5_bits") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(analytic("noise_floor_eps_1_bits") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(analytic("gauss_corr_0.9_bits") ==
        doctest::Approx(gaussian_mi_corr(0.9)).epsilon(1e-12));

  // sigma_R^2 column for eps = 1 is 1/3.
  bool found = false;
  for (const auto& row : table.rows)
    if (row.metric == "noise_floor_eps_1_bits" && row.method == "analytic") {
      CHECK(row.sigma_sq == doctest::Approx(1.0 / 3).epsilon(1e-12));
      found = true;
    }
  CHECK(found);
}

TEST_CASE("experiment tables are byte-identical across reruns and thread counts") {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::DpTradeoff;
  spec.trials = 200;
  spec.sigma_grid = {0.1, 1.0, 10.0};

  auto csv = [&](unsigned threads) {
    const ResultTable table = run_dp_tradeoff(spec, threads);
    std::ostringstream out;
    write_result_csv(table, out);
    return out.str();
  };
  const std::string a = csv(1);
  const std::string b = csv(2);
  const std::string c = csv(2);
  CHECK(a == b);
  CHECK(b == c);
  CHECK(a.find("experiment,mechanism,sigma_sq,metric,node,t,value,method,seed") !=
        std::string::npos);
  CHECK(a.find("# spec_hash=") != std::string::npos);
}

TEST_CASE("tradeoff grid endpoints and bound ordering at low trial count") {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::DpTradeoff;
  spec.trials = 2000;
  spec.sigma_grid = {1e-3, 1.0, 1e3};
  const ResultTable table = run_dp_tradeoff(spec, 2);

  auto knn = [&](double sigma, const std::string& metric) {
    for (const auto& row : table.rows)
      if (row.sigma_sq == sigma && row.metric == metric && row.method == "knn")
        return row.value;
    FAIL("row not found");
    return 0.0;
  };
  CHECK(knn(1e-3, "utility_nmi") > 0.9);
  CHECK(knn(1e3, "utility_nmi") < 0.1);
  CHECK(knn(1e-3, "privacy_nmi") > 0.9);
  CHECK(knn(1e3, "privacy_nmi") < 0.1);
  for (double sigma : {1e-3, 1.0, 1e3})
    CHECK(knn(sigma, "privacy_bits") >= knn(sigma, "privacy_lb_bits") - 0.1);
}

TEST_CASE("topology experiment validates the corrupted set") {
  ExperimentSpec spec;
  spec.experiment = ExperimentKind::Topology;
  spec.trials = 50;
  spec.sigma_grid = {1.0};
  spec.corrupted = {7};  // leaves honest nodes without corrupted neighbors
  CHECK_THROWS_AS(run_topology(spec, 2), ModelViolation);

  spec.corrupted = {4, 7};
  spec.target = 4;  // corrupted target
  CHECK_THROWS_AS(run_topology(spec, 2), ModelViolation);
}
