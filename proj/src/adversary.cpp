#include "ppdac/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ppdac {

namespace {

std::vector<int> resolve_iterations(const ConsensusRun& run,
                                    const std::vector<int>& iterations) {
  if (!iterations.empty()) {
    for (int t : iterations)
      if (t < 0 || t > run.iterations())
        throw std::invalid_argument("iteration index out of range");
    return iterations;
  }
  std::vector<int> all(run.iterations() + 1);
  for (int t = 0; t <= run.iterations(); ++t) all[t] = t;
  return all;
}

void require_honest_target(const CorruptionModel& cm, int target) {
  if (cm.is_corrupted(target))
    throw ModelViolation("target node is corrupted");
}

void require_assumption2(const Graph& g, const CorruptionModel& cm) {
  const int violator = assumption2_violation(g, cm);
  if (violator >= 0)
    throw ModelViolation("honest node " + std::to_string(violator + 1) +
                         " has no corrupted neighbor");
}

/// r_{j|k} = (what j received from k) - (what j sent to k).
double pairwise_noise(const ConsensusRun& run, const Graph& g, int j, int k) {
  const int l = g.edge_index(j, k);
  return run.noise.r_directed(dual_index(g, l, k)) -
         run.noise.r_directed(dual_index(g, l, j));
}

}  // namespace

AdversaryView collect_view(const ConsensusRun& run, const Graph& g,
                           const CorruptionModel& cm, int target,
                           const std::vector<int>& iterations) {
  require_honest_target(cm, target);
  const std::vector<int> iters = resolve_iterations(run, iterations);
  const int n = g.n();

  AdversaryView view;
  view.target = target;
  view.kind = run.mechanism;

  std::vector<double> raw;
  switch (run.mechanism) {
    case MechanismKind::None:
    case MechanismKind::DP: {
      for (int j : cm.corrupted()) raw.push_back(run.final_x()(j));
      for (int j : cm.corrupted()) raw.push_back(run.s(j));
      if (run.noise.r.size() > 0)
        for (int j : cm.corrupted()) raw.push_back(run.noise.r(j));
      break;
    }
    case MechanismKind::SMPC: {
      require_assumption2(g, cm);
      for (int j : cm.corrupted()) raw.push_back(run.s(j));
      raw.push_back(run.s.sum());
      for (int l : cm.corrupted_edges()) {
        raw.push_back(run.noise.r_directed(l));
        raw.push_back(run.noise.r_directed(l + g.m()));
      }
      break;
    }
    case MechanismKind::DOSP: {
      require_assumption2(g, cm);
      for (int j : cm.corrupted()) raw.push_back(run.s(j));
      raw.push_back(run.s.sum());
      for (int l : cm.corrupted_edges())
        for (int t : iters) {
          raw.push_back(run.lambda_traj(l, t));
          raw.push_back(run.lambda_traj(l + g.m(), t));
        }
      break;
    }
  }
  for (int t : iters)
    for (int i = 0; i < n; ++i) raw.push_back(run.x_traj(i, t));

  view.raw = Eigen::Map<Eigen::VectorXd>(raw.data(), raw.size());
  return view;
}

AdversaryView& reduce_view(AdversaryView& view, const ConsensusRun& run,
                           const Graph& g, const CorruptionModel& cm) {
  require_honest_target(cm, view.target);
  std::vector<double> reduced;

  switch (run.mechanism) {
    case MechanismKind::None:
    case MechanismKind::DP: {
      const double r = run.noise.r.size() > 0 ? run.noise.r(view.target) : 0.0;
      reduced.push_back(run.s(view.target) + r);
      break;
    }
    case MechanismKind::SMPC: {
      for (int j : honest_component(g, cm, view.target)) {
        double value = run.s(j);
        for (int k : g.neighbors(j))
          if (!cm.is_corrupted(k)) value += pairwise_noise(run, g, j, k);
        reduced.push_back(value);
      }
      break;
    }
    case MechanismKind::DOSP: {
      for (int t : {0, 1})
        for (int j : cm.honest()) {
          double value = run.s(j);
          for (int k : g.neighbors(j)) {
            if (cm.is_corrupted(k)) continue;
            const int l = g.edge_index(j, k);
            value -= incidence_sign(j, k) *
                     run.lambda_traj(dual_index(g, l, k), t);
          }
          reduced.push_back(value);
        }
      for (int j : cm.corrupted()) reduced.push_back(run.s(j));
      for (int l : cm.corrupted_edges()) {
        reduced.push_back(run.lambda_traj(l, 0));
        reduced.push_back(run.lambda_traj(l + g.m(), 0));
      }
      break;
    }
  }

  view.reduced = Eigen::Map<Eigen::VectorXd>(reduced.data(), reduced.size());
  return view;
}

double observable_partial_sum(const ConsensusRun& run, const Graph& g,
                              const CorruptionModel& cm, int target) {
  require_honest_target(cm, target);
  const std::vector<int> component = honest_component(g, cm, target);

  if (run.mechanism == MechanismKind::SMPC) {
    // Honest-to-honest noise cancels pairwise inside the component.
    double total = 0.0;
    for (int j : component) {
      total += run.s(j);
      for (int k : g.neighbors(j))
        if (!cm.is_corrupted(k)) total += pairwise_noise(run, g, j, k);
    }
    return total;
  }

  if (run.mechanism == MechanismKind::DOSP) {
    // Two-step dual identity: with x^(0)=0,
    //   lambda^(1)_{j|k} = lambda^(0)_{k|j} + c B_{j|k} x_j^(1),
    // so summing the observable terms over t=0,1 double-counts the data
    // and turns the dual sums into -c(x_j^(1)+x_k^(1)) per internal edge.
    double term_sum = 0.0;
    for (int t : {0, 1})
      for (int j : component) {
        term_sum += run.s(j);
        for (int k : g.neighbors(j)) {
          if (cm.is_corrupted(k)) continue;
          const int l = g.edge_index(j, k);
          term_sum -= incidence_sign(j, k) *
                      run.lambda_traj(dual_index(g, l, k), t);
        }
      }
    double edge_sum = 0.0;
    for (const auto& [j, k] : g.edges())
      if (!cm.is_corrupted(j) && !cm.is_corrupted(k) &&
          std::binary_search(component.begin(), component.end(), j))
        edge_sum += run.x_traj(j, 1) + run.x_traj(k, 1);
    return 0.5 * (term_sum - run.c * edge_sum);
  }

  throw std::invalid_argument("partial-sum reconstruction needs SMPC or DOSP");
}

PrivacyReport analytic_privacy(MechanismKind kind,
                               const PrivacyParams& params) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (params.sigma_s_sq <= 0)
    throw std::invalid_argument("sigma_s_sq must be positive");

  PrivacyReport report;
  report.kind = kind;
  report.sigma_sq = params.sigma_sq;

  switch (kind) {
    case MechanismKind::DP: {
      if (params.n < 2) throw std::invalid_argument("need n >= 2");
      const double snr = params.sigma_sq > 0
                             ? params.sigma_s_sq / params.sigma_sq
                             : inf;
      report.utility = make_analytic_estimate(gaussian_mi(snr));
      report.privacy = make_analytic_estimate(gaussian_mi(snr));
      report.privacy_lb = make_analytic_estimate(
          params.sigma_sq > 0
              ? gaussian_mi(params.sigma_s_sq / (params.n * params.sigma_sq))
              : inf);
      report.robustness = params.n - 1;
      break;
    }
    case MechanismKind::None:
    case MechanismKind::SMPC:
    case MechanismKind::DOSP: {
      const int h = params.honest_component_size;
      const int n_h = params.honest_count;
      if (h < 1) throw std::invalid_argument("honest component is empty");
      if (n_h < h) throw std::invalid_argument("n_h must be >= h");
      report.utility = make_analytic_estimate(inf);
      if (kind == MechanismKind::None) {
        report.privacy = make_analytic_estimate(inf);  // state is the data
      } else {
        report.privacy = make_analytic_estimate(
            h >= 2 ? 0.5 * std::log2(static_cast<double>(h) / (h - 1)) : inf);
      }
      report.privacy_lb = make_analytic_estimate(
          n_h >= 2 ? 0.5 * std::log2(static_cast<double>(n_h) / (n_h - 1))
                   : inf);
      break;
    }
  }
  return report;
}

int robustness(MechanismKind kind, const Graph& g, int i) {
  if (i < 0 || i >= g.n()) throw std::invalid_argument("node out of range");
  switch (kind) {
    case MechanismKind::DP: return g.n() - 1;
    case MechanismKind::SMPC:
    case MechanismKind::DOSP: return g.degree(i) - 1;
    case MechanismKind::None: return 0;
  }
  return 0;
}

}  // namespace ppdac
