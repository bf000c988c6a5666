#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppdac/adversary.hpp"
#include "ppdac/graph.hpp"
#include "ppdac/info_metrics.hpp"
#include "ppdac/mechanism.hpp"

namespace ppdac {

enum class ExperimentKind { Convergence, DpTradeoff, Topology, Calibration };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

/// Fully describes one experiment. Node ids in spec files and CLI output
/// are 1-based; this struct stores them 0-based.
struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::Convergence;

  // Graph source: an explicit file wins over generation.
  std::string graph_file;
  int n = 10;
  double radius_sq = 0.0;  // 0 resolves to 2 ln(n) / n
  std::uint64_t graph_seed = 7;

  std::vector<MechanismKind> mechanisms;
  std::vector<double> sigma_grid;
  int trials = 0;  // 0 resolves to the per-experiment default
  int T = 400;
  double c = 0.4;
  SolverKind solver = SolverKind::PDMM;
  bool solver_explicit = false;  // set when a spec file names the solver
  int target = 0;
  std::vector<int> corrupted;
  int estimator_k = 3;
  std::uint64_t master_seed = 1;
  double sigma_s_sq = 1.0;

  double resolved_radius_sq() const;
};

/// Fills unset fields with the per-experiment defaults and validates.
ExperimentSpec resolve_spec(ExperimentSpec spec);

/// Key-value text format, one "key = value" per line, '#' comments.
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec parse_spec_file(const std::string& path);
/// Canonical text of a resolved spec; hashing this gives the provenance id.
std::string spec_to_text(const ExperimentSpec& spec);
std::uint64_t spec_hash(const ExperimentSpec& spec);

struct ResultRow {
  std::string experiment;
  std::string mechanism;
  double sigma_sq = 0.0;
  std::string metric;
  int node = 0;  // 1-based; 0 means whole-network
  int t = -1;    // iteration; -1 when not applicable
  double value = 0.0;
  std::string method;  // "analytic" | "knn" | "sim"
  std::uint64_t seed = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::string spec_text;
  std::uint64_t hash = 0;
};

/// Long-format CSV with a provenance comment header.
void write_result_csv(const ResultTable& table, std::ostream& out);

/// Runs per_trial for each trial index with deterministic derived streams;
/// rows are filled in trial order regardless of thread count.
SampleMatrix montecarlo(
    int trials, int columns,
    const std::function<void(std::uint64_t trial, Eigen::Ref<Eigen::RowVectorXd>)>&
        per_trial,
    unsigned threads = 0);

/// The two fixed 10-node topology-experiment graphs. G keeps the honest
/// subgraph connected; Gprime drops one honest edge so the target's honest
/// component splits off. Both satisfy the corrupted-neighbor assumption
/// with corrupted set {5, 8} (1-based).
Graph bundled_topology_graph();
Graph bundled_topology_graph_prime();
std::vector<int> bundled_topology_corrupted();  // 0-based

ResultTable run_convergence(const ExperimentSpec& spec, unsigned threads = 0);
ResultTable run_dp_tradeoff(const ExperimentSpec& spec, unsigned threads = 0);
ResultTable run_topology(const ExperimentSpec& spec, unsigned threads = 0);
ResultTable run_calibration(const ExperimentSpec& spec, unsigned threads = 0);
ResultTable run_experiment(const ExperimentSpec& spec, unsigned threads = 0);

/// Resolves the spec's graph: loads graph_file when set, otherwise the
/// seeded geometric graph, resampled until connected.
Graph resolve_graph(const ExperimentSpec& spec);

}  // namespace ppdac
