#include "ppdac/mechanism.hpp"

#include <cmath>

#include "ppdac/linear.hpp"

namespace ppdac {

void MechanismConfig::validate() const {
  if (sigma_sq < 0) throw std::invalid_argument("sigma_sq must be >= 0");
  if (kind == MechanismKind::DOSP && solver != SolverKind::PDMM)
    throw ModelViolation("subspace perturbation requires the PDMM solver");
  if (solver == SolverKind::PDMM && c <= 0)
    throw std::invalid_argument("penalty c must be positive");
  if (T < 1) throw std::invalid_argument("need T >= 1");
}

double gaussian_noise_floor(double sigma_s_sq, double epsilon_bits) {
  if (sigma_s_sq <= 0) throw std::invalid_argument("sigma_s_sq must be positive");
  if (epsilon_bits <= 0)
    throw std::invalid_argument("the bound needs epsilon > 0");
  return sigma_s_sq / (std::exp2(2.0 * epsilon_bits) - 1.0);
}

std::pair<Eigen::VectorXd, NoiseRecord> dp_init(
    const Eigen::Ref<const Eigen::VectorXd>& s, double sigma_sq,
    RngStream& stream) {
  if (sigma_sq < 0) throw std::invalid_argument("sigma_sq must be >= 0");
  const double sd = std::sqrt(sigma_sq);
  NoiseRecord noise;
  noise.r.resize(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) noise.r(i) = stream.gaussian(sd);
  return {s + noise.r, std::move(noise)};
}

NoiseRecord smpc_noise(const Graph& g, double sigma_sq, RngStream& stream) {
  if (sigma_sq < 0) throw std::invalid_argument("sigma_sq must be >= 0");
  const int m = g.m();
  const double sd = std::sqrt(sigma_sq);
  NoiseRecord noise;
  noise.r_directed.resize(2 * m);
  for (int l = 0; l < m; ++l) {
    noise.r_directed(l) = stream.gaussian(sd);      // i sends j, i < j
    noise.r_directed(l + m) = stream.gaussian(sd);  // j sends i
  }
  noise.r = Eigen::VectorXd::Zero(g.n());
  for (int i = 0; i < g.n(); ++i)
    for (int j : g.neighbors(i)) {
      const int l = g.edge_index(i, j);
      // r_{i|j} = r_j^i - r_i^j (received minus sent).
      const double sent = noise.r_directed(dual_index(g, l, i));
      const double received = noise.r_directed(dual_index(g, l, j));
      noise.r(i) += received - sent;
    }
  return noise;
}

std::pair<Eigen::VectorXd, NoiseRecord> dosp_init(
    const Graph& g, double sigma_sq, RngStream& stream,
    const SubspaceProjector& proj) {
  if (sigma_sq < 0) throw std::invalid_argument("sigma_sq must be >= 0");
  const double sd = std::sqrt(sigma_sq);
  Eigen::VectorXd lambda0(2 * g.m());
  for (Eigen::Index l = 0; l < lambda0.size(); ++l)
    lambda0(l) = stream.gaussian(sd);
  NoiseRecord noise;
  noise.lambda0 = lambda0;
  noise.lambda0_nonconv = lambda0 - proj.Pi_H * lambda0;
  noise.subspace_warning = g.m() < g.n();
  return {std::move(lambda0), std::move(noise)};
}

ConsensusRun apply_mechanism(const MechanismConfig& cfg, const Graph& g,
                             const Eigen::Ref<const Eigen::VectorXd>& s,
                             RngStream& stream) {
  cfg.validate();
  if (s.size() != g.n()) throw std::invalid_argument("dimension mismatch");

  ConsensusRun run;
  switch (cfg.kind) {
    case MechanismKind::None: {
      if (cfg.solver == SolverKind::Linear) {
        run = run_linear(metropolis_weights(g), s, cfg.T);
      } else {
        run = run_pdmm(s, cfg.c, Eigen::VectorXd::Zero(2 * g.m()), cfg.T, g);
      }
      break;
    }
    case MechanismKind::DP: {
      auto [x0, noise] = dp_init(s, cfg.sigma_sq, stream);
      if (cfg.solver == SolverKind::Linear) {
        run = run_linear(metropolis_weights(g), x0, cfg.T);
      } else {
        run = run_pdmm(x0, cfg.c, Eigen::VectorXd::Zero(2 * g.m()), cfg.T, g);
      }
      run.noise = std::move(noise);
      break;
    }
    case MechanismKind::SMPC: {
      NoiseRecord noise = smpc_noise(g, cfg.sigma_sq, stream);
      const Eigen::VectorXd x0 = s + noise.r;
      if (cfg.solver == SolverKind::Linear) {
        run = run_linear(metropolis_weights(g), x0, cfg.T);
      } else {
        run = run_pdmm(x0, cfg.c, Eigen::VectorXd::Zero(2 * g.m()), cfg.T, g);
      }
      run.noise = std::move(noise);
      break;
    }
    case MechanismKind::DOSP: {
      auto [lambda0, noise] =
          dosp_init(g, cfg.sigma_sq, stream, subspace_projector(pdmm_edge_matrices(g)));
      run = run_pdmm(s, cfg.c, lambda0, cfg.T, g);
      run.noise = std::move(noise);
      break;
    }
  }
  run.mechanism = cfg.kind;
  run.sigma_sq = cfg.sigma_sq;
  run.s = s;
  return run;
}

}  // namespace ppdac
