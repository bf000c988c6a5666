#pragma once

#include <Eigen/Dense>
#include <utility>

#include "ppdac/graph.hpp"
#include "ppdac/pdmm.hpp"
#include "ppdac/rng.hpp"
#include "ppdac/run.hpp"

namespace ppdac {

/// Which mechanism to run, how much noise, and which solver carries it.
struct MechanismConfig {
  MechanismKind kind = MechanismKind::None;
  double sigma_sq = 0.0;
  SolverKind solver = SolverKind::PDMM;
  double c = 0.4;  // PDMM penalty
  int T = 400;

  void validate() const;
};

/// Smallest Gaussian noise variance that keeps the leakage I(S;S+R) at or
/// below epsilon bits: sigma_S^2 / (2^(2 eps) - 1).
double gaussian_noise_floor(double sigma_s_sq, double epsilon_bits);

/// One-shot statistical zero-sum insertion: x_i^(0) = s_i + r_i with
/// r_i i.i.d. Gaussian(0, sigma_sq).
std::pair<Eigen::VectorXd, NoiseRecord> dp_init(
    const Eigen::Ref<const Eigen::VectorXd>& s, double sigma_sq,
    RngStream& stream);

/// Coordinated exact zero-sum insertion: every node sends each neighbor an
/// independent Gaussian(0, sigma_sq) draw; node i keeps
/// r_i = sum_j (r_j^i - r_i^j). The draws are made per edge in edge-list
/// order, lower-endpoint direction first, so transcripts are reproducible.
NoiseRecord smpc_noise(const Graph& g, double sigma_sq, RngStream& stream);

/// Subspace perturbation: i.i.d. Gaussian(0, sigma_sq) initial duals. The
/// record keeps the non-convergent component (I - Pi) lambda0 in lambda0's
/// place alongside the raw draw; the warning flag is set when m < n.
std::pair<Eigen::VectorXd, NoiseRecord> dosp_init(const Graph& g,
                                                  double sigma_sq,
                                                  RngStream& stream,
                                                  const SubspaceProjector& proj);

/// Draws the mechanism noise, runs the configured solver on the (possibly
/// perturbed) data, and returns the full transcript with the true private
/// data and noise record attached.
ConsensusRun apply_mechanism(const MechanismConfig& cfg, const Graph& g,
                             const Eigen::Ref<const Eigen::VectorXd>& s,
                             RngStream& stream);

}  // namespace ppdac
