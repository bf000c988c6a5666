#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace ppdac {

enum class MechanismKind { None, DP, SMPC, DOSP };
enum class SolverKind { Linear, PDMM };

std::string to_string(MechanismKind kind);
std::string to_string(SolverKind kind);
MechanismKind mechanism_from_string(const std::string& name);
SolverKind solver_from_string(const std::string& name);

/// Shortest round-trip decimal form ("%.17g"), used by all CSV writers so
/// identical runs produce byte-identical files.
std::string format_double(double v);

/// Noise drawn by a mechanism, kept for transcript audits and adversary
/// views. Fields are empty when the mechanism does not use them.
struct NoiseRecord {
  /// Per-node noise r_i (DP and SMPC).
  Eigen::VectorXd r;
  /// SMPC: one draw per directed edge. Entry l holds what node i sends to
  /// j for edge l=(i,j) with i<j; entry l+m what j sends to i. The
  /// pairwise difference r_{i|j} = r_j^i - r_i^j follows from these.
  Eigen::VectorXd r_directed;
  /// DOSP: random initial dual vector (2m) and its non-convergent
  /// component (I - Pi) lambda0, the part that acts as subspace noise.
  Eigen::VectorXd lambda0;
  Eigen::VectorXd lambda0_nonconv;
  /// Set when the graph has m < n, where the non-convergent dual subspace
  /// may be empty and subspace noise gives no protection.
  bool subspace_warning = false;
};

/// Full per-iteration transcript of one solver execution.
struct ConsensusRun {
  SolverKind solver = SolverKind::Linear;
  MechanismKind mechanism = MechanismKind::None;
  double sigma_sq = 0.0;
  double c = 0.0;  // PDMM penalty constant; 0 for linear runs
  std::uint64_t seed = 0;
  /// Private data of the run. Bare solver calls set this to their input;
  /// mechanism dispatch overwrites it with the unperturbed data.
  Eigen::VectorXd s;
  /// States x^(0)..x^(T), one column per iteration.
  Eigen::MatrixXd x_traj;
  /// Duals lambda^(0)..lambda^(T) (PDMM only), one column per iteration.
  Eigen::MatrixXd lambda_traj;
  NoiseRecord noise;

  int iterations() const { return static_cast<int>(x_traj.cols()) - 1; }
  Eigen::VectorXd x(int t) const { return x_traj.col(t); }
  Eigen::VectorXd final_x() const { return x_traj.col(x_traj.cols() - 1); }
};

/// CSV with columns t, x_0..x_{n-1}, lambda columns for PDMM runs, and the
/// noise record repeated per row for audit.
void export_run_csv(const ConsensusRun& run, std::ostream& out);

}  // namespace ppdac
