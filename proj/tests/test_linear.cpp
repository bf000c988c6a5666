#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ppdac/linear.hpp"
#include "ppdac/rng.hpp"

using namespace ppdac;

namespace {

Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }

// Power-iteration spectral-radius oracle, independent of the
// eigen-decomposition used by check_consensus_conditions.
double power_iteration_radius(const Eigen::MatrixXd& a) {
  RngStream stream(424242);
  double best = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = stream.gaussian(1.0);
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < 3000; ++it) {
      const Eigen::VectorXd next = a * v;
      estimate = next.norm();
      if (estimate == 0.0) break;
      v = next / estimate;
    }
    best = std::max(best, estimate);
  }
  return best;
}

}  // namespace

TEST_CASE("metropolis weights formula") {
  const Eigen::MatrixXd k2 = metropolis_weights(Graph(2, {{0, 1}}));
  CHECK((k2 - (Eigen::MatrixXd(2, 2) << 0.5, 0.5, 0.5, 0.5).finished())
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  const Eigen::MatrixXd w = metropolis_weights(path3());
  Eigen::MatrixXd expected(3, 3);
  expected << 2.0 / 3, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 1.0 / 3, 2.0 / 3;
  CHECK((w - expected).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(metropolis_weights(Graph(3, {{0, 1}})), ModelViolation);
}

TEST_CASE("consensus conditions") {
  SUBCASE("one-step averaging matrix") {
    const auto report =
        check_consensus_conditions(Eigen::MatrixXd::Constant(4, 4, 0.25));
    CHECK(report.all());
    CHECK(report.rho == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("identity mixes nothing") {
    const auto report = check_consensus_conditions(Eigen::MatrixXd::Identity(4, 4));
    CHECK(report.cond_i);
    CHECK(report.cond_ii);
    CHECK_FALSE(report.cond_iii);
    CHECK(report.rho == doctest::Approx(1.0));
  }
  SUBCASE("metropolis path: rho = 2/3 (hand eigenvalues 1, 2/3, 0)") {
    const Eigen::MatrixXd w = metropolis_weights(path3());
    const auto report = check_consensus_conditions(w);
    CHECK(report.all());
    CHECK(report.rho == doctest::Approx(2.0 / 3).epsilon(1e-12));
    const Eigen::MatrixXd deviation =
        w - Eigen::MatrixXd::Constant(3, 3, 1.0 / 3);
    CHECK(power_iteration_radius(deviation) == doctest::Approx(2.0 / 3).epsilon(1e-6));
  }
  SUBCASE("metropolis satisfies all conditions on random connected graphs") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
      const auto [g, s] = connected_geometric_graph(4 + 3 * (seed % 4), 0.7, seed);
      const auto report = check_consensus_conditions(metropolis_weights(g));
      CHECK(report.all());
    }
  }
  SUBCASE("non-square input is rejected") {
    CHECK_THROWS_AS(check_consensus_conditions(Eigen::MatrixXd::Zero(2, 3)),
                    std::invalid_argument);
  }
}

TEST_CASE("linear iterations") {
  SUBCASE("one-step averaging") {
    const Eigen::VectorXd x0 = (Eigen::VectorXd(4) << 3, -1, 2, 0).finished();
    const auto run = run_linear(Eigen::MatrixXd::Constant(4, 4, 0.25), x0, 1);
    CHECK((run.final_x().array() - 1.0).abs().maxCoeff() < 1e-15);
  }
  SUBCASE("consensus is a fixed point") {
    const Eigen::MatrixXd w = metropolis_weights(path3());
    const auto run = run_linear(w, Eigen::VectorXd::Constant(3, 0.7), 10);
    for (int t = 0; t <= 10; ++t)
      CHECK((run.x(t).array() - 0.7).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("state is initialized with the data (the leakage property)") {
    const Eigen::VectorXd x0 = (Eigen::VectorXd(3) << 0.3, -1.2, 5.0).finished();
    const auto run = run_linear(metropolis_weights(path3()), x0, 3);
    CHECK(run.x(0) == x0);
  }
  SUBCASE("contraction at the spectral rate, average preserved") {
    const Eigen::MatrixXd w = metropolis_weights(path3());
    const double rho = check_consensus_conditions(w).rho;
    const Eigen::VectorXd x0 = (Eigen::VectorXd(3) << 1, 0, 0).finished();
    const int T = 50;
    const auto run = run_linear(w, x0, T);
    const double avg = x0.mean();
    const Eigen::VectorXd target = Eigen::VectorXd::Constant(3, avg);

    CHECK((run.final_x() - target).cwiseAbs().maxCoeff() <=
          std::pow(rho, T) * (x0 - target).norm());
    for (int t = 1; t <= T; ++t) {
      const double before = (run.x(t - 1) - target).norm();
      const double after = (run.x(t) - target).norm();
      // Below ~1e-8 the ratio is dominated by cancellation noise.
      if (before > 1e-8) CHECK(after / before <= rho + 1e-8);
      CHECK(run.x(t).sum() == doctest::Approx(x0.sum()).epsilon(1e-10));
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(
        run_linear(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(2), 1),
        std::invalid_argument);
  }
}
