#include "ppdac/linear.hpp"

#include <Eigen/Eigenvalues>

namespace ppdac {

Eigen::MatrixXd metropolis_weights(const Graph& g) {
  if (!is_connected(g)) throw ModelViolation("graph is disconnected");
  const int n = g.n();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : g.edges()) {
    const double wij = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

ConsensusConditionReport check_consensus_conditions(
    const Eigen::Ref<const Eigen::MatrixXd>& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("weight matrix not square");
  const int n = static_cast<int>(w.rows());
  constexpr double tol = 1e-10;

  ConsensusConditionReport report;
  report.cond_i = ((w.colwise().sum().array() - 1.0).abs() < tol).all();
  report.cond_ii = ((w.rowwise().sum().array() - 1.0).abs() < tol).all();

  const Eigen::MatrixXd deviation =
      w - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(deviation, false);
  report.rho = es.eigenvalues().cwiseAbs().maxCoeff();
  report.cond_iii = report.rho < 1.0;
  return report;
}

ConsensusRun run_linear(const Eigen::Ref<const Eigen::MatrixXd>& w,
                        const Eigen::Ref<const Eigen::VectorXd>& x0, int T) {
  if (w.rows() != w.cols()) throw std::invalid_argument("weight matrix not square");
  if (w.cols() != x0.size()) throw std::invalid_argument("dimension mismatch");
  if (T < 0) throw std::invalid_argument("negative iteration count");

  ConsensusRun run;
  run.solver = SolverKind::Linear;
  run.s = x0;
  run.x_traj.resize(x0.size(), T + 1);
  run.x_traj.col(0) = x0;
  for (int t = 0; t < T; ++t)
    run.x_traj.col(t + 1).noalias() = w * run.x_traj.col(t);
  return run;
}

}  // namespace ppdac
