#include "ppdac/run.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ppdac {

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::None: return "none";
    case MechanismKind::DP: return "dp";
    case MechanismKind::SMPC: return "smpc";
    case MechanismKind::DOSP: return "dosp";
  }
  return "?";
}

std::string to_string(SolverKind kind) {
  return kind == SolverKind::Linear ? "linear" : "pdmm";
}

MechanismKind mechanism_from_string(const std::string& name) {
  if (name == "none") return MechanismKind::None;
  if (name == "dp") return MechanismKind::DP;
  if (name == "smpc") return MechanismKind::SMPC;
  if (name == "dosp") return MechanismKind::DOSP;
  throw std::invalid_argument("unknown mechanism: " + name);
}

SolverKind solver_from_string(const std::string& name) {
  if (name == "linear") return SolverKind::Linear;
  if (name == "pdmm") return SolverKind::PDMM;
  throw std::invalid_argument("unknown solver: " + name);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void export_run_csv(const ConsensusRun& run, std::ostream& out) {
  const Eigen::Index n = run.x_traj.rows();
  const Eigen::Index two_m = run.lambda_traj.rows();

  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  for (Eigen::Index l = 0; l < two_m; ++l) out << ",lam_" << l;
  for (Eigen::Index i = 0; i < run.noise.r.size(); ++i) out << ",r_" << i;
  for (Eigen::Index l = 0; l < run.noise.r_directed.size(); ++l)
    out << ",rdir_" << l;
  for (Eigen::Index l = 0; l < run.noise.lambda0.size(); ++l)
    out << ",lam0_" << l;
  out << '\n';

  for (Eigen::Index t = 0; t < run.x_traj.cols(); ++t) {
    out << t;
    for (Eigen::Index i = 0; i < n; ++i)
      out << ',' << format_double(run.x_traj(i, t));
    for (Eigen::Index l = 0; l < two_m; ++l)
      out << ',' << format_double(run.lambda_traj(l, t));
    for (Eigen::Index i = 0; i < run.noise.r.size(); ++i)
      out << ',' << format_double(run.noise.r(i));
    for (Eigen::Index l = 0; l < run.noise.r_directed.size(); ++l)
      out << ',' << format_double(run.noise.r_directed(l));
    for (Eigen::Index l = 0; l < run.noise.lambda0.size(); ++l)
      out << ',' << format_double(run.noise.lambda0(l));
    out << '\n';
  }
}

}  // namespace ppdac
