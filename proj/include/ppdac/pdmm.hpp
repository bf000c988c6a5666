#pragma once

#include <Eigen/Dense>
#include <utility>

#include "ppdac/graph.hpp"
#include "ppdac/run.hpp"

namespace ppdac {

/// State of the primal-dual solver. The dual vector has one entry per
/// directed edge: entry l is lambda_{i|j} and entry l+m is lambda_{j|i}
/// for edge l=(i,j) with i<j.
struct PdmmState {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  int t = 0;
  double c = 0.4;
};

/// Orthogonal projector onto the convergent dual subspace
/// span(C) + span(PC). Its complement carries the non-convergent dual
/// component that subspace perturbation uses as noise.
struct SubspaceProjector {
  Eigen::MatrixXd Pi_H;
  int rank = 0;
};

/// One synchronous update of all nodes, per-node form:
///   x_i <- (s_i + sum_j (c x_j - B_{i|j} lambda_{j|i})) / (1 + c d_i)
///   lambda_{i|j} <- lambda_{j|i} + c (B_{i|j} x_i' + B_{j|i} x_j)
PdmmState pdmm_step(const PdmmState& state,
                    const Eigen::Ref<const Eigen::VectorXd>& s,
                    const Graph& g);

/// Same update in matrix form,
///   x' = (I + c C^T C)^{-1} (s - c C^T P C x - C^T P lambda)
///   lambda' = P lambda + c (C x' + P C x).
/// Agrees with pdmm_step to rounding; kept for cross-checks.
PdmmState pdmm_step_matrix(const PdmmState& state,
                           const Eigen::Ref<const Eigen::VectorXd>& s,
                           const PdmmEdgeMatrices& mats);

/// Runs T iterations from x^(0) = 0 and the given initial dual, recording
/// the full trajectory.
ConsensusRun run_pdmm(const Eigen::Ref<const Eigen::VectorXd>& s, double c,
                      const Eigen::Ref<const Eigen::VectorXd>& lambda0, int T,
                      const Graph& g);

/// Projector built from a rank-revealing SVD of [C  PC]; singular values
/// below 1e-12 times the largest are treated as zero.
SubspaceProjector subspace_projector(const PdmmEdgeMatrices& mats);

/// Dual optimum for the consensus problem:
///   lambda* = -pinv([C^T; (PC)^T]) [x*-s+cC^TCx*; x*-s+cC^TPCx*] + cCx*
/// with x* = mean(s) 1. Verified against the solver fixed point.
Eigen::VectorXd dual_optimum(const Eigen::Ref<const Eigen::VectorXd>& s,
                             double c, const PdmmEdgeMatrices& mats);

/// Splits lambda into (convergent, non-convergent) = (Pi lambda, rest).
std::pair<Eigen::VectorXd, Eigen::VectorXd> decompose_dual(
    const Eigen::Ref<const Eigen::VectorXd>& lambda,
    const SubspaceProjector& proj);

}  // namespace ppdac
