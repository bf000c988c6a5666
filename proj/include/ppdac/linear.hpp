#pragma once

#include <Eigen/Dense>

#include "ppdac/graph.hpp"
#include "ppdac/run.hpp"

namespace ppdac {

/// Result of checking the averaging conditions on a weight matrix:
/// (i) columns sum to one, (ii) rows sum to one, (iii) spectral radius of
/// W - 11^T/n below one.
struct ConsensusConditionReport {
  bool cond_i = false;
  bool cond_ii = false;
  bool cond_iii = false;
  double rho = 0.0;

  bool all() const { return cond_i && cond_ii && cond_iii; }
};

/// Metropolis-Hastings weights: W_ij = 1/(1+max(d_i,d_j)) on edges,
/// diagonal filled to make rows sum to one. Symmetric and doubly
/// stochastic, so conditions (i)-(iii) hold on connected graphs.
Eigen::MatrixXd metropolis_weights(const Graph& g);

/// rho is computed by full eigen-decomposition; (i) and (ii) use
/// tolerance 1e-10.
ConsensusConditionReport check_consensus_conditions(
    const Eigen::Ref<const Eigen::MatrixXd>& w);

/// Synchronous linear iterations x^(t+1) = W x^(t), trajectory recorded
/// for t = 0..T.
ConsensusRun run_linear(const Eigen::Ref<const Eigen::MatrixXd>& w,
                        const Eigen::Ref<const Eigen::VectorXd>& x0, int T);

}  // namespace ppdac
