#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppdac/graph.hpp"
#include "ppdac/info_metrics.hpp"
#include "ppdac/run.hpp"

namespace ppdac {

/// One trial's worth of adversary knowledge about a target node: the raw
/// flattened observation vector and the sufficient-statistic reduction.
struct AdversaryView {
  int target = 0;
  MechanismKind kind = MechanismKind::None;
  Eigen::VectorXd raw;
  Eigen::VectorXd reduced;
};

/// Everything the corrupted coalition observes, flattened in a fixed
/// order. `iterations` selects which state (and dual) snapshots enter the
/// vector; pass {} for all of them.
///
///   DP:   {yhat_j, s_j, r_j}_{j in N_c}, X^(t)
///   SMPC: {s_j}_{j in N_c}, sum_j s_j, directed draws on corrupted
///         edges, X^(t)
///   DOSP: {s_j}_{j in N_c}, sum_j s_j, duals on corrupted edges at the
///         selected iterations, X^(t)
///
/// SMPC and DOSP views require every honest node to have a corrupted
/// neighbor; violations throw ModelViolation.
AdversaryView collect_view(const ConsensusRun& run, const Graph& g,
                           const CorruptionModel& cm, int target,
                           const std::vector<int>& iterations = {});

/// Fills view.reduced with the mechanism's sufficient statistic:
///   DP:   s_i + r_i (scalar)
///   SMPC: {s_j + sum over honest neighbors of r_{j|k}} for j in the
///         honest component of the target
///   DOSP: {s_j - sum over honest neighbors of B_{j|k) lambda^(t)_{k|j}}
///         for all honest j and t in {0,1}, followed by the conditioning
///         variables {s_j}_{j in N_c} and the corrupted-edge initial duals
AdversaryView& reduce_view(AdversaryView& view, const ConsensusRun& run,
                           const Graph& g, const CorruptionModel& cm);

/// Partial sum over the target's honest component, reconstructed from
/// adversary observables alone (noise cancels for SMPC; the two-step dual
/// identity recovers it for DOSP).
double observable_partial_sum(const ConsensusRun& run, const Graph& g,
                              const CorruptionModel& cm, int target);

struct PrivacyParams {
  int n = 0;                      // network size
  double sigma_sq = 0.0;          // mechanism noise variance
  double sigma_s_sq = 1.0;        // private-data variance
  int honest_component_size = 0;  // h = |N_h'|
  int honest_count = 0;           // n_h = |N_h|
};

/// Closed-form Gaussian metrics for one node under one mechanism.
struct PrivacyReport {
  MechanismKind kind = MechanismKind::None;
  double sigma_sq = 0.0;
  MIEstimate utility;
  MIEstimate privacy;
  MIEstimate privacy_lb;
  int robustness = 0;
  bool assumption2_ok = true;
};

/// Table-1 closed forms under i.i.d. Gaussian private data:
///   DP:        rho = MI(sigma_s^2/sigma^2), lb = MI(sigma_s^2/(n sigma^2)),
///              u = MI(sigma_s^2/sigma^2)
///   SMPC/DOSP: rho = 0.5 log2(h/(h-1)) (infinite for h=1),
///              lb = 0.5 log2(n_h/(n_h-1)), full utility
PrivacyReport analytic_privacy(MechanismKind kind, const PrivacyParams& params);

/// Maximum tolerable corrupted-node count for the target: n-1 for DP,
/// d_i - 1 for SMPC/DOSP, 0 without a mechanism.
int robustness(MechanismKind kind, const Graph& g, int i);

}  // namespace ppdac
