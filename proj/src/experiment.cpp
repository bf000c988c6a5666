#include "ppdac/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ppdac/linear.hpp"
#include "ppdac/parallel.hpp"
#include "ppdac/pdmm.hpp"
#include "ppdac/rng.hpp"

namespace ppdac {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::DpTradeoff: return "tradeoff";
    case ExperimentKind::Topology: return "topology";
    case ExperimentKind::Calibration: return "calibrate";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "convergence") return ExperimentKind::Convergence;
  if (name == "tradeoff") return ExperimentKind::DpTradeoff;
  if (name == "topology") return ExperimentKind::Topology;
  if (name == "calibrate") return ExperimentKind::Calibration;
  throw std::invalid_argument("unknown experiment: " + name);
}

double ExperimentSpec::resolved_radius_sq() const {
  return radius_sq > 0 ? radius_sq : 2.0 * std::log(n) / n;
}

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> grid(points);
  const double step = (std::log10(hi) - std::log10(lo)) / (points - 1);
  for (int i = 0; i < points; ++i)
    grid[i] = std::pow(10.0, std::log10(lo) + i * step);
  return grid;
}

}  // namespace

ExperimentSpec resolve_spec(ExperimentSpec spec) {
  switch (spec.experiment) {
    case ExperimentKind::Convergence:
      if (spec.mechanisms.empty())
        spec.mechanisms = {MechanismKind::DP, MechanismKind::SMPC,
                           MechanismKind::DOSP};
      if (spec.sigma_grid.empty()) spec.sigma_grid = {0.0, 1.0, 100.0};
      if (spec.trials == 0) spec.trials = 100;
      break;
    case ExperimentKind::DpTradeoff:
      spec.mechanisms = {MechanismKind::DP};
      if (spec.sigma_grid.empty()) spec.sigma_grid = log_grid(1e-3, 1e3, 13);
      if (spec.trials == 0) spec.trials = 10000;
      if (!spec.solver_explicit) spec.solver = SolverKind::Linear;
      break;
    case ExperimentKind::Topology:
      if (spec.mechanisms.empty())
        spec.mechanisms = {MechanismKind::SMPC, MechanismKind::DOSP};
      if (spec.sigma_grid.empty())
        spec.sigma_grid = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
      if (spec.trials == 0) spec.trials = 10000;
      spec.solver = SolverKind::PDMM;
      if (spec.corrupted.empty()) spec.corrupted = bundled_topology_corrupted();
      break;
    case ExperimentKind::Calibration:
      if (spec.trials == 0) spec.trials = 10000;
      break;
  }
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (double s : spec.sigma_grid)
    if (s < 0) throw std::invalid_argument("sigma_sq must be >= 0");
  if (spec.sigma_s_sq <= 0)
    throw std::invalid_argument("sigma_s_sq must be positive");
  if (spec.estimator_k < 1) throw std::invalid_argument("estimator_k >= 1");
  for (MechanismKind mech : spec.mechanisms)
    if (mech == MechanismKind::DOSP && spec.solver != SolverKind::PDMM)
      throw ModelViolation("subspace perturbation requires the PDMM solver");
  return spec;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

ExperimentSpec parse_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("spec line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "experiment") {
        spec.experiment = experiment_from_string(value);
      } else if (key == "graph_file") {
        spec.graph_file = value;
      } else if (key == "n") {
        spec.n = std::stoi(value);
      } else if (key == "radius_sq") {
        spec.radius_sq = std::stod(value);
      } else if (key == "graph_seed") {
        spec.graph_seed = std::stoull(value);
      } else if (key == "mechanisms") {
        spec.mechanisms.clear();
        for (const auto& item : split_list(value))
          spec.mechanisms.push_back(mechanism_from_string(item));
      } else if (key == "sigma_grid") {
        spec.sigma_grid.clear();
        for (const auto& item : split_list(value))
          spec.sigma_grid.push_back(std::stod(item));
      } else if (key == "trials") {
        spec.trials = std::stoi(value);
      } else if (key == "iterations") {
        spec.T = std::stoi(value);
      } else if (key == "c") {
        spec.c = std::stod(value);
      } else if (key == "solver") {
        spec.solver = solver_from_string(value);
        spec.solver_explicit = true;
      } else if (key == "target_node") {
        spec.target = std::stoi(value) - 1;  // spec files are 1-based
        if (spec.target < 0)
          throw std::invalid_argument("target_node is 1-based");
      } else if (key == "corrupted") {
        spec.corrupted.clear();
        for (const auto& item : split_list(value)) {
          const int node = std::stoi(item) - 1;
          if (node < 0) throw std::invalid_argument("corrupted is 1-based");
          spec.corrupted.push_back(node);
        }
      } else if (key == "estimator_k") {
        spec.estimator_k = std::stoi(value);
      } else if (key == "master_seed") {
        spec.master_seed = std::stoull(value);
      } else if (key == "sigma_s_sq") {
        spec.sigma_s_sq = std::stod(value);
      } else {
        throw std::invalid_argument("unknown key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("spec line " + std::to_string(line_no) +
                                  ": bad value for " + key);
    }
  }
  return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file: " + path);
  return parse_spec(in);
}

std::string spec_to_text(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "experiment = " << to_string(spec.experiment) << '\n';
  if (!spec.graph_file.empty()) out << "graph_file = " << spec.graph_file << '\n';
  out << "n = " << spec.n << '\n';
  out << "radius_sq = " << format_double(spec.resolved_radius_sq()) << '\n';
  out << "graph_seed = " << spec.graph_seed << '\n';
  out << "mechanisms = ";
  for (std::size_t i = 0; i < spec.mechanisms.size(); ++i)
    out << (i ? "," : "") << to_string(spec.mechanisms[i]);
  out << '\n';
  out << "sigma_grid = ";
  for (std::size_t i = 0; i < spec.sigma_grid.size(); ++i)
    out << (i ? "," : "") << format_double(spec.sigma_grid[i]);
  out << '\n';
  out << "trials = " << spec.trials << '\n';
  out << "iterations = " << spec.T << '\n';
  out << "c = " << format_double(spec.c) << '\n';
  out << "solver = " << to_string(spec.solver) << '\n';
  out << "target_node = " << spec.target + 1 << '\n';
  out << "corrupted = ";
  for (std::size_t i = 0; i < spec.corrupted.size(); ++i)
    out << (i ? "," : "") << spec.corrupted[i] + 1;
  out << '\n';
  out << "estimator_k = " << spec.estimator_k << '\n';
  out << "master_seed = " << spec.master_seed << '\n';
  out << "sigma_s_sq = " << format_double(spec.sigma_s_sq) << '\n';
  return out.str();
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
  // FNV-1a over the canonical text.
  const std::string text = spec_to_text(spec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_result_csv(const ResultTable& table, std::ostream& out) {
  out << "# spec_hash=" << table.hash << '\n';
  std::istringstream spec(table.spec_text);
  std::string line;
  while (std::getline(spec, line)) out << "# " << line << '\n';
  out << "experiment,mechanism,sigma_sq,metric,node,t,value,method,seed\n";
  for (const auto& row : table.rows) {
    out << row.experiment << ',' << row.mechanism << ','
        << format_double(row.sigma_sq) << ',' << row.metric << ',' << row.node
        << ',' << row.t << ',' << format_double(row.value) << ',' << row.method
        << ',' << row.seed << '\n';
  }
}

SampleMatrix montecarlo(
    int trials, int columns,
    const std::function<void(std::uint64_t, Eigen::Ref<Eigen::RowVectorXd>)>&
        per_trial,
    unsigned threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  SampleMatrix samples;
  samples.data.resize(trials, columns);
  const unsigned nthreads = threads == 0 ? default_thread_count() : threads;
  parallel_for(
      static_cast<std::size_t>(trials),
      [&](std::size_t trial) {
        Eigen::RowVectorXd row(columns);
        per_trial(static_cast<std::uint64_t>(trial), row);
        samples.data.row(static_cast<Eigen::Index>(trial)) = row;
      },
      nthreads);
  return samples;
}

Graph bundled_topology_graph() {
  // Honest nodes 1,2,3,4,6,7,9,10 (1-based) form a path; the two corrupted
  // hubs 5 and 8 cover every honest node and bridge the halves.
  return Graph(10, {{0, 1}, {1, 2}, {2, 3}, {3, 5}, {5, 6}, {6, 8}, {8, 9},
                    {0, 4}, {1, 4}, {2, 4}, {3, 4},
                    {4, 7}, {5, 7}, {6, 7}, {7, 8}, {7, 9}});
}

Graph bundled_topology_graph_prime() {
  // Same graph minus the honest bridge {4, 6} (1-based), splitting the
  // honest subgraph into {1..4} and {6,7,9,10}.
  return Graph(10, {{0, 1}, {1, 2}, {2, 3}, {5, 6}, {6, 8}, {8, 9},
                    {0, 4}, {1, 4}, {2, 4}, {3, 4},
                    {4, 7}, {5, 7}, {6, 7}, {7, 8}, {7, 9}});
}

std::vector<int> bundled_topology_corrupted() { return {4, 7}; }

Graph resolve_graph(const ExperimentSpec& spec) {
  if (!spec.graph_file.empty()) {
    Graph g = load_graph_file(spec.graph_file);
    if (!is_connected(g))
      throw ModelViolation("graph file " + spec.graph_file + " is disconnected");
    return g;
  }
  return connected_geometric_graph(spec.n, spec.resolved_radius_sq(),
                                   spec.graph_seed)
      .first;
}

namespace {

Eigen::VectorXd draw_private_data(const ExperimentSpec& spec, int n,
                                  std::uint64_t trial) {
  RngStream stream(spec.master_seed, trial, Draw::PrivateData);
  const double sd = std::sqrt(spec.sigma_s_sq);
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s(i) = stream.gaussian(sd);
  return s;
}

void push_metric_rows(ResultTable& table, const ResultRow& base,
                      const std::string& metric, const MIEstimate& estimate) {
  ResultRow row = base;
  row.method = estimate.method == MiMethod::Analytic ? "analytic" : "knn";
  row.metric = metric + "_bits";
  row.value = estimate.value_bits;
  table.rows.push_back(row);
  row.metric = metric + "_nmi";
  row.value = estimate.nmi;
  table.rows.push_back(row);
}

}  // namespace

ResultTable run_convergence(const ExperimentSpec& raw_spec, unsigned threads) {
  const ExperimentSpec spec = resolve_spec(raw_spec);
  if (spec.experiment != ExperimentKind::Convergence)
    throw std::invalid_argument("spec is not a convergence experiment");
  const Graph g = resolve_graph(spec);

  ResultTable table;
  table.spec_text = spec_to_text(spec);
  table.hash = spec_hash(spec);

  std::vector<std::pair<MechanismKind, double>> cells;
  cells.emplace_back(MechanismKind::None, 0.0);
  for (MechanismKind mech : spec.mechanisms)
    for (double sigma_sq : spec.sigma_grid) cells.emplace_back(mech, sigma_sq);

  for (const auto& [mech, sigma_sq] : cells) {
    MechanismConfig cfg;
    cfg.kind = mech;
    cfg.sigma_sq = sigma_sq;
    cfg.solver = spec.solver;
    cfg.c = spec.c;
    cfg.T = spec.T;

    Eigen::MatrixXd curves(spec.T + 1, spec.trials);
    Eigen::VectorXd final_inf(spec.trials);
    parallel_for(
        static_cast<std::size_t>(spec.trials),
        [&](std::size_t trial) {
          const Eigen::VectorXd s = draw_private_data(spec, g.n(), trial);
          RngStream noise(spec.master_seed, trial, Draw::Noise);
          const ConsensusRun run = apply_mechanism(cfg, g, s, noise);
          const Eigen::VectorXd target =
              Eigen::VectorXd::Constant(g.n(), s.mean());
          for (int t = 0; t <= spec.T; ++t)
            curves(t, trial) = (run.x_traj.col(t) - target).norm();
          final_inf(trial) =
              (run.final_x() - target).cwiseAbs().maxCoeff();
        },
        threads == 0 ? default_thread_count() : threads);

    ResultRow base;
    base.experiment = to_string(spec.experiment);
    base.mechanism = to_string(mech);
    base.sigma_sq = sigma_sq;
    base.node = 0;
    base.method = "sim";
    base.seed = spec.master_seed;
    for (int t = 0; t <= spec.T; ++t) {
      ResultRow row = base;
      row.metric = "err2_mean";
      row.t = t;
      row.value = curves.row(t).mean();
      table.rows.push_back(row);
    }
    ResultRow row = base;
    row.metric = "final_err_inf_mean";
    row.value = final_inf.mean();
    table.rows.push_back(row);
    row.metric = "final_err_inf_max";
    row.value = final_inf.maxCoeff();
    table.rows.push_back(row);
  }
  return table;
}

ResultTable run_dp_tradeoff(const ExperimentSpec& raw_spec, unsigned threads) {
  const ExperimentSpec spec = resolve_spec(raw_spec);
  if (spec.experiment != ExperimentKind::DpTradeoff)
    throw std::invalid_argument("spec is not a tradeoff experiment");
  const Graph g = resolve_graph(spec);
  const int n = g.n();
  const int target = spec.target;
  if (target < 0 || target >= n)
    throw std::invalid_argument("target node out of range");
  if (!spec.corrupted.empty() &&
      static_cast<int>(spec.corrupted.size()) != n - 1)
    throw std::invalid_argument(
        "the tradeoff experiment corrupts all nodes but the target");

  ResultTable table;
  table.spec_text = spec_to_text(spec);
  table.hash = spec_hash(spec);

  MechanismConfig cfg;
  cfg.kind = MechanismKind::DP;
  cfg.solver = spec.solver;
  cfg.c = spec.c;
  cfg.T = spec.T;

  KnnOptions knn;
  knn.k = spec.estimator_k;
  knn.jitter_seed = spec.master_seed;
  knn.threads = threads;

  for (double sigma_sq : spec.sigma_grid) {
    cfg.sigma_sq = sigma_sq;
    // Columns: s_i, x_i^(0) = s_i + r_i, y, yhat, adversary-reconstructed
    // s_i + R (from n yhat and the corrupted data).
    const SampleMatrix samples = montecarlo(
        spec.trials, 5,
        [&](std::uint64_t trial, Eigen::Ref<Eigen::RowVectorXd> row) {
          const Eigen::VectorXd s = draw_private_data(spec, n, trial);
          RngStream noise(spec.master_seed, trial, Draw::Noise);
          const ConsensusRun run = apply_mechanism(cfg, g, s, noise);
          const double y_hat = run.final_x()(target);
          row(0) = s(target);
          row(1) = s(target) + run.noise.r(target);
          row(2) = s.mean();
          row(3) = y_hat;
          row(4) = n * y_hat - (s.sum() - s(target));
        },
        threads);

    PrivacyParams params;
    params.n = n;
    params.sigma_sq = sigma_sq;
    params.sigma_s_sq = spec.sigma_s_sq;
    const PrivacyReport analytic = analytic_privacy(MechanismKind::DP, params);

    ResultRow base;
    base.experiment = to_string(spec.experiment);
    base.mechanism = "dp";
    base.sigma_sq = sigma_sq;
    base.node = target + 1;
    base.seed = spec.master_seed;

    push_metric_rows(table, base, "utility", analytic.utility);
    push_metric_rows(table, base, "privacy", analytic.privacy);
    push_metric_rows(table, base, "privacy_lb", analytic.privacy_lb);

    push_metric_rows(table, base, "utility",
                     utility(samples.data.col(2), samples.data.col(3),
                             MiMethod::KNN, knn));
    push_metric_rows(table, base, "privacy", knn_mi(samples, {0}, {1}, knn));
    push_metric_rows(table, base, "privacy_lb",
                     knn_mi(samples, {0}, {4}, knn));
  }
  return table;
}

ResultTable run_topology(const ExperimentSpec& raw_spec, unsigned threads) {
  const ExperimentSpec spec = resolve_spec(raw_spec);
  if (spec.experiment != ExperimentKind::Topology)
    throw std::invalid_argument("spec is not a topology experiment");

  std::vector<std::pair<std::string, Graph>> graphs;
  if (!spec.graph_file.empty()) {
    graphs.emplace_back("file", load_graph_file(spec.graph_file));
  } else {
    graphs.emplace_back("G", bundled_topology_graph());
    graphs.emplace_back("Gprime", bundled_topology_graph_prime());
  }

  ResultTable table;
  table.spec_text = spec_to_text(spec);
  table.hash = spec_hash(spec);

  KnnOptions knn;
  knn.k = spec.estimator_k;
  knn.jitter_seed = spec.master_seed;
  knn.threads = threads;

  for (const auto& [label, g] : graphs) {
    if (!is_connected(g))
      throw ModelViolation("topology graph " + label + " is disconnected");
    const CorruptionModel cm(g, spec.corrupted);
    const int violator = assumption2_violation(g, cm);
    if (violator >= 0)
      throw ModelViolation("honest node " + std::to_string(violator + 1) +
                           " has no corrupted neighbor in graph " + label);
    const int target = spec.target;
    if (cm.is_corrupted(target))
      throw ModelViolation("target node is corrupted");

    const int n = g.n();
    const int h = static_cast<int>(honest_component(g, cm, target).size());
    const int n_h = static_cast<int>(cm.honest().size());
    const std::string experiment_label =
        to_string(spec.experiment) + ":" + label;

    for (MechanismKind mech : spec.mechanisms) {
      MechanismConfig cfg;
      cfg.kind = mech;
      cfg.solver = SolverKind::PDMM;
      cfg.c = spec.c;
      cfg.T = spec.T;

      // Reduced-view width is fixed per (graph, mechanism).
      int reduced_dim = 0;
      {
        cfg.sigma_sq = 1.0;
        RngStream probe_stream(spec.master_seed, 0, Draw::Noise);
        const ConsensusRun probe =
            apply_mechanism(cfg, g, Eigen::VectorXd::Zero(n), probe_stream);
        AdversaryView view = collect_view(probe, g, cm, target, {0, 1});
        reduce_view(view, probe, g, cm);
        reduced_dim = static_cast<int>(view.reduced.size());
      }

      for (double sigma_sq : spec.sigma_grid) {
        cfg.sigma_sq = sigma_sq;
        // Columns: s_i, y, yhat, sum of corrupted data, reduced view.
        const SampleMatrix samples = montecarlo(
            spec.trials, 4 + reduced_dim,
            [&](std::uint64_t trial, Eigen::Ref<Eigen::RowVectorXd> row) {
              const Eigen::VectorXd s = draw_private_data(spec, n, trial);
              RngStream noise(spec.master_seed, trial, Draw::Noise);
              const ConsensusRun run = apply_mechanism(cfg, g, s, noise);
              AdversaryView view = collect_view(run, g, cm, target, {0, 1});
              reduce_view(view, run, g, cm);
              row(0) = s(target);
              row(1) = s.mean();
              row(2) = run.final_x()(target);
              double corrupted_sum = 0.0;
              for (int j : cm.corrupted()) corrupted_sum += s(j);
              row(3) = corrupted_sum;
              row.segment(4, reduced_dim) = view.reduced.transpose();
            },
            threads);

        PrivacyParams params;
        params.n = n;
        params.sigma_sq = sigma_sq;
        params.sigma_s_sq = spec.sigma_s_sq;
        params.honest_component_size = h;
        params.honest_count = n_h;
        PrivacyReport analytic = analytic_privacy(mech, params);
        analytic.robustness = robustness(mech, g, target);

        ResultRow base;
        base.experiment = experiment_label;
        base.mechanism = to_string(mech);
        base.sigma_sq = sigma_sq;
        base.node = target + 1;
        base.seed = spec.master_seed;

        push_metric_rows(table, base, "utility", analytic.utility);
        push_metric_rows(table, base, "privacy", analytic.privacy);
        push_metric_rows(table, base, "privacy_lb", analytic.privacy_lb);
        {
          ResultRow row = base;
          row.metric = "robustness_k";
          row.method = "analytic";
          row.value = analytic.robustness;
          table.rows.push_back(row);
        }

        std::vector<int> view_cols(reduced_dim);
        for (int i = 0; i < reduced_dim; ++i) view_cols[i] = 4 + i;
        push_metric_rows(table, base, "utility",
                         utility(samples.data.col(1), samples.data.col(2),
                                 MiMethod::KNN, knn));
        // The reduced views span dozens of dimensions; the Gaussian
        // sufficient projection keeps the kNN estimator in its reliable
        // low-dimensional regime.
        KnnOptions view_knn = knn;
        view_knn.gaussian_compress_view = true;
        push_metric_rows(table, base, "privacy",
                         knn_mi(samples, {0}, view_cols, view_knn));
        // Lower-bound view: the honest-node data sum, reconstructed from
        // the blackbox observables as n*yhat minus the corrupted data.
        SampleMatrix lb(samples);
        lb.data.conservativeResize(Eigen::NoChange, lb.data.cols() + 1);
        lb.data.col(lb.data.cols() - 1) =
            static_cast<double>(n) * samples.data.col(2) - samples.data.col(3);
        push_metric_rows(
            table, base, "privacy_lb",
            knn_mi(lb, {0}, {static_cast<int>(lb.data.cols() - 1)}, knn));
      }
    }
  }
  return table;
}

ResultTable run_calibration(const ExperimentSpec& raw_spec, unsigned threads) {
  const ExperimentSpec spec = resolve_spec(raw_spec);
  if (spec.experiment != ExperimentKind::Calibration)
    throw std::invalid_argument("spec is not a calibration experiment");

  ResultTable table;
  table.spec_text = spec_to_text(spec);
  table.hash = spec_hash(spec);

  KnnOptions knn;
  knn.k = spec.estimator_k;
  knn.threads = threads;

  ResultRow base;
  base.experiment = to_string(spec.experiment);
  base.mechanism = "none";
  base.node = 0;
  base.seed = spec.master_seed;

  // Bivariate Gaussian calibration: 20 repeats per correlation.
  const int repeats = 20;
  for (double corr : {0.0, 0.3, 0.6, 0.9}) {
    base.sigma_sq = 0.0;
    double mean = 0.0, sq = 0.0;
    for (int rep = 0; rep < repeats; ++rep) {
      const std::uint64_t rep_seed =
          splitmix64(spec.master_seed ^ (0xca11b000ULL + rep));
      const SampleMatrix samples = montecarlo(
          spec.trials, 2,
          [&](std::uint64_t trial, Eigen::Ref<Eigen::RowVectorXd> row) {
            RngStream stream(rep_seed, trial, Draw::PrivateData);
            const double z1 = stream.gaussian(1.0);
            const double z2 = stream.gaussian(1.0);
            row(0) = z1;
            row(1) = corr * z1 + std::sqrt(1.0 - corr * corr) * z2;
          },
          threads);
      KnnOptions rep_knn = knn;
      rep_knn.jitter_seed = rep_seed;
      const MIEstimate est = knn_mi(samples, {0}, {1}, rep_knn);
      mean += est.value_bits;
      sq += est.value_bits * est.value_bits;

      ResultRow row = base;
      row.metric = "gauss_corr_" + format_double(corr) + "_bits";
      row.method = "knn";
      row.value = est.value_bits;
      row.seed = rep_seed;
      table.rows.push_back(row);
    }
    mean /= repeats;
    const double var = std::max(sq / repeats - mean * mean, 0.0);

    ResultRow row = base;
    row.metric = "gauss_corr_" + format_double(corr) + "_bits";
    row.method = "analytic";
    row.value = gaussian_mi_corr(corr);
    table.rows.push_back(row);
    row.metric = "gauss_corr_" + format_double(corr) + "_mean_bits";
    row.method = "knn";
    row.value = mean;
    table.rows.push_back(row);
    row.metric = "gauss_corr_" + format_double(corr) + "_std_bits";
    row.method = "knn";
    row.value = std::sqrt(var);
    table.rows.push_back(row);
  }

  // Gaussian noise floor: at sigma_R^2 = sigma_S^2 / (2^(2 eps) - 1) the
  // leakage I(S; S+R) equals eps exactly.
  for (double eps : {0.25, 0.5, 1.0}) {
    const double sigma_r_sq = gaussian_noise_floor(spec.sigma_s_sq, eps);
    base.sigma_sq = sigma_r_sq;

    const double sd_s = std::sqrt(spec.sigma_s_sq);
    const double sd_r = std::sqrt(sigma_r_sq);
    const SampleMatrix samples = montecarlo(
        spec.trials, 2,
        [&](std::uint64_t trial, Eigen::Ref<Eigen::RowVectorXd> row) {
          RngStream data(spec.master_seed, trial, Draw::PrivateData);
          RngStream noise(spec.master_seed, trial, Draw::Noise);
          const double s = data.gaussian(sd_s);
          row(0) = s;
          row(1) = s + noise.gaussian(sd_r);
        },
        threads);
    KnnOptions floor_knn = knn;
    floor_knn.jitter_seed = spec.master_seed + static_cast<int>(eps * 100);

    ResultRow row = base;
    row.metric = "noise_floor_eps_" + format_double(eps) + "_bits";
    row.method = "analytic";
    row.value = gaussian_mi(spec.sigma_s_sq / sigma_r_sq);
    table.rows.push_back(row);
    row.method = "knn";
    row.value = knn_mi(samples, {0}, {1}, floor_knn).value_bits;
    table.rows.push_back(row);
  }

  // Independent pair should estimate to (clamped) zero.
  {
    base.sigma_sq = 0.0;
    const SampleMatrix samples = montecarlo(
        spec.trials, 2,
        [&](std::uint64_t trial, Eigen::Ref<Eigen::RowVectorXd> row) {
          RngStream stream(spec.master_seed, trial, Draw::PrivateData);
          row(0) = stream.gaussian(1.0);
          row(1) = stream.gaussian(1.0);
        },
        threads);
    ResultRow row = base;
    row.metric = "independent_pair_bits";
    row.method = "knn";
    row.value = knn_mi(samples, {0}, {1}, knn).value_bits;
    table.rows.push_back(row);
  }
  return table;
}

ResultTable run_experiment(const ExperimentSpec& spec, unsigned threads) {
  switch (spec.experiment) {
    case ExperimentKind::Convergence: return run_convergence(spec, threads);
    case ExperimentKind::DpTradeoff: return run_dp_tradeoff(spec, threads);
    case ExperimentKind::Topology: return run_topology(spec, threads);
    case ExperimentKind::Calibration: return run_calibration(spec, threads);
  }
  throw std::invalid_argument("unknown experiment kind");
}

}  // namespace ppdac
