#include "ppdac/pdmm.hpp"

#include <Eigen/SVD>

namespace ppdac {

namespace {

void check_state(const PdmmState& state, Eigen::Index n, Eigen::Index m) {
  if (state.c <= 0) throw std::invalid_argument("penalty c must be positive");
  if (state.x.size() != n || state.lambda.size() != 2 * m)
    throw std::invalid_argument("dimension mismatch");
}

}  // namespace

PdmmState pdmm_step(const PdmmState& state,
                    const Eigen::Ref<const Eigen::VectorXd>& s,
                    const Graph& g) {
  const int n = g.n(), m = g.m();
  check_state(state, n, m);
  if (s.size() != n) throw std::invalid_argument("dimension mismatch");
  const double c = state.c;

  PdmmState next = state;
  for (int i = 0; i < n; ++i) {
    double acc = s(i);
    for (int j : g.neighbors(i)) {
      const int l = g.edge_index(i, j);
      acc += c * state.x(j) -
             incidence_sign(i, j) * state.lambda(dual_index(g, l, j));
    }
    next.x(i) = acc / (1.0 + c * g.degree(i));
  }
  for (int l = 0; l < m; ++l) {
    const auto& [i, j] = g.edges()[l];
    next.lambda(l) = state.lambda(l + m) + c * (next.x(i) - state.x(j));
    next.lambda(l + m) = state.lambda(l) + c * (state.x(i) - next.x(j));
  }
  next.t = state.t + 1;
  return next;
}

PdmmState pdmm_step_matrix(const PdmmState& state,
                           const Eigen::Ref<const Eigen::VectorXd>& s,
                           const PdmmEdgeMatrices& mats) {
  const Eigen::Index n = mats.C.cols(), m = mats.C.rows() / 2;
  check_state(state, n, m);
  if (s.size() != n) throw std::invalid_argument("dimension mismatch");
  const double c = state.c;

  // I + c C^T C is diagonal: C^T C = diag(d).
  const Eigen::VectorXd gain =
      (Eigen::VectorXd::Ones(n) + c * mats.C.colwise().squaredNorm().transpose())
          .cwiseInverse();

  PdmmState next = state;
  const Eigen::VectorXd pcx = mats.P * (mats.C * state.x);
  next.x = gain.asDiagonal() *
           (s - c * (mats.C.transpose() * pcx) -
            mats.C.transpose() * (mats.P * state.lambda));
  next.lambda = mats.P * state.lambda + c * (mats.C * next.x + pcx);
  next.t = state.t + 1;
  return next;
}

ConsensusRun run_pdmm(const Eigen::Ref<const Eigen::VectorXd>& s, double c,
                      const Eigen::Ref<const Eigen::VectorXd>& lambda0, int T,
                      const Graph& g) {
  if (T < 1) throw std::invalid_argument("need T >= 1");
  PdmmState state;
  state.x = Eigen::VectorXd::Zero(g.n());
  state.lambda = lambda0;
  state.c = c;
  check_state(state, g.n(), g.m());
  if (s.size() != g.n()) throw std::invalid_argument("dimension mismatch");

  ConsensusRun run;
  run.solver = SolverKind::PDMM;
  run.c = c;
  run.s = s;
  run.x_traj.resize(g.n(), T + 1);
  run.lambda_traj.resize(2 * g.m(), T + 1);
  run.x_traj.col(0) = state.x;
  run.lambda_traj.col(0) = state.lambda;
  for (int t = 1; t <= T; ++t) {
    state = pdmm_step(state, s, g);
    run.x_traj.col(t) = state.x;
    run.lambda_traj.col(t) = state.lambda;
  }
  return run;
}

SubspaceProjector subspace_projector(const PdmmEdgeMatrices& mats) {
  const Eigen::Index rows = mats.C.rows(), cols = mats.C.cols();
  Eigen::MatrixXd span(rows, 2 * cols);
  span << mats.C, mats.P * mats.C;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeThinU);
  const double cutoff = 1e-12 * svd.singularValues()(0);
  int rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()(rank) > cutoff)
    ++rank;

  SubspaceProjector proj;
  proj.rank = rank;
  const Eigen::MatrixXd basis = svd.matrixU().leftCols(rank);
  proj.Pi_H = basis * basis.transpose();
  return proj;
}

Eigen::VectorXd dual_optimum(const Eigen::Ref<const Eigen::VectorXd>& s,
                             double c, const PdmmEdgeMatrices& mats) {
  const Eigen::Index n = mats.C.cols(), m = mats.C.rows() / 2;
  if (s.size() != n) throw std::invalid_argument("dimension mismatch");
  const Eigen::VectorXd x_star =
      Eigen::VectorXd::Constant(n, s.mean());

  Eigen::MatrixXd stacked(2 * n, 2 * m);
  stacked.topRows(n) = mats.C.transpose();
  stacked.bottomRows(n) = (mats.P * mats.C).transpose();

  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = x_star - s + c * (mats.C.transpose() * (mats.C * x_star));
  rhs.tail(n) =
      x_star - s + c * (mats.C.transpose() * (mats.P * (mats.C * x_star)));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  const Eigen::VectorXd lambda_star =
      -svd.solve(rhs) + c * (mats.C * x_star);

  // Fixed-point residual guard: lambda* must reproduce x* in the x-update.
  const Eigen::VectorXd gain =
      (Eigen::VectorXd::Ones(n) + c * mats.C.colwise().squaredNorm().transpose())
          .cwiseInverse();
  const Eigen::VectorXd x_fix =
      gain.asDiagonal() *
      (s - c * (mats.C.transpose() * (mats.P * (mats.C * x_star))) -
       mats.C.transpose() * (mats.P * lambda_star));
  if ((x_fix - x_star).cwiseAbs().maxCoeff() > 1e-8)
    throw std::logic_error("dual optimum failed the fixed-point check");
  return lambda_star;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> decompose_dual(
    const Eigen::Ref<const Eigen::VectorXd>& lambda,
    const SubspaceProjector& proj) {
  if (lambda.size() != proj.Pi_H.rows())
    throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXd conv = proj.Pi_H * lambda;
  Eigen::VectorXd nonconv = lambda - conv;
  return {std::move(conv), std::move(nonconv)};
}

}  // namespace ppdac
