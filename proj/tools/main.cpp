// Command-line front end: runs the averaging experiments, writes long-form
// CSVs plus gnuplot-ready per-figure data files, and renders the
// mechanism-comparison table.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ppdac/experiment.hpp"
#include "ppdac/linear.hpp"
#include "ppdac/pdmm.hpp"

namespace {

using namespace ppdac;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSpec = 2;
constexpr int kExitModel = 3;

struct CommonOptions {
  std::string spec_path;
  std::string out_dir;
  std::string graph_file;
  int trials = -1;
  std::optional<std::uint64_t> seed;
  std::string sigma_grid;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--spec", opt.spec_path, "experiment spec file");
  cmd->add_option("--out", opt.out_dir, "output directory (default: $PPDAC_OUT or .)");
  cmd->add_option("--graph-file", opt.graph_file, "edge-list graph file override");
  cmd->add_option("--trials", opt.trials, "Monte-Carlo trial count override");
  cmd->add_option("--seed", opt.seed, "master seed override");
  cmd->add_option("--sigma-grid", opt.sigma_grid,
                  "comma-separated noise variances override");
  cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
}

std::string resolve_out_dir(const CommonOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("PPDAC_OUT"); env && *env) return env;
  return ".";
}

ExperimentSpec build_spec(ExperimentKind kind, const CommonOptions& opt) {
  ExperimentSpec spec;
  if (!opt.spec_path.empty()) {
    spec = parse_spec_file(opt.spec_path);
    if (spec.experiment != kind)
      throw std::invalid_argument("spec file is for experiment '" +
                                  to_string(spec.experiment) + "'");
  }
  spec.experiment = kind;
  if (!opt.graph_file.empty()) spec.graph_file = opt.graph_file;
  if (opt.trials >= 0) spec.trials = opt.trials;
  if (opt.seed) spec.master_seed = *opt.seed;
  if (!opt.sigma_grid.empty()) {
    spec.sigma_grid.clear();
    std::stringstream ss(opt.sigma_grid);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) spec.sigma_grid.push_back(std::stod(item));
  }
  return resolve_spec(spec);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::cout << "writing " << path << '\n';
  return out;
}

double find_value(const ResultTable& table, const std::string& experiment,
                  const std::string& mechanism, double sigma_sq,
                  const std::string& metric, const std::string& method,
                  int t = -1) {
  for (const auto& row : table.rows)
    if (row.experiment == experiment && row.mechanism == mechanism &&
        row.sigma_sq == sigma_sq && row.metric == metric &&
        row.method == method && row.t == t)
      return row.value;
  throw std::runtime_error("missing result row: " + metric);
}

void write_fig1(const ResultTable& table, const ExperimentSpec& spec,
                std::ostream& out) {
  out << "# columns: t";
  std::vector<std::pair<std::string, double>> cells = {{"none", 0.0}};
  for (MechanismKind mech : spec.mechanisms)
    for (double s : spec.sigma_grid) cells.emplace_back(to_string(mech), s);
  for (const auto& [mech, s] : cells)
    out << "  " << mech << "(sigma_sq=" << format_double(s) << ")";
  out << '\n';
  for (int t = 0; t <= spec.T; ++t) {
    out << t;
    for (const auto& [mech, s] : cells)
      out << ' '
          << format_double(
                 find_value(table, "convergence", mech, s, "err2_mean", "sim", t));
    out << '\n';
  }
}

void write_fig2(const ResultTable& table, const ExperimentSpec& spec,
                std::ostream& out) {
  out << "# columns: sigma_sq u_analytic u_knn rho_analytic rho_knn "
         "rho_min_analytic rho_min_knn (all NMI)\n";
  for (double s : spec.sigma_grid) {
    out << format_double(s);
    for (const std::string metric : {"utility_nmi", "privacy_nmi", "privacy_lb_nmi"})
      for (const std::string method : {"analytic", "knn"})
        out << ' '
            << format_double(find_value(table, "tradeoff", "dp", s, metric, method));
    out << '\n';
  }
}

void write_fig3(const ResultTable& table, const ExperimentSpec& spec,
                std::ostream& out) {
  const std::vector<std::string> graphs = {"topology:G", "topology:Gprime"};
  out << "# columns: sigma_sq";
  for (const auto& graph : graphs)
    for (MechanismKind mech : spec.mechanisms)
      out << "  [" << graph << "/" << to_string(mech)
          << ": u_knn rho_knn rho_analytic rho_min_analytic]";
  out << " (all NMI)\n";
  for (double s : spec.sigma_grid) {
    out << format_double(s);
    for (const auto& graph : graphs)
      for (MechanismKind mech : spec.mechanisms) {
        const std::string name = to_string(mech);
        out << ' ' << format_double(find_value(table, graph, name, s, "utility_nmi", "knn"))
            << ' ' << format_double(find_value(table, graph, name, s, "privacy_nmi", "knn"))
            << ' ' << format_double(find_value(table, graph, name, s, "privacy_nmi", "analytic"))
            << ' ' << format_double(find_value(table, graph, name, s, "privacy_lb_nmi", "analytic"));
      }
    out << '\n';
  }
}

int run_experiment_command(ExperimentKind kind, const CommonOptions& opt) {
  const ExperimentSpec spec = build_spec(kind, opt);
  const std::string dir = resolve_out_dir(opt);
  std::cout << "resolved spec:\n" << spec_to_text(spec);

  const ResultTable table = run_experiment(spec, opt.threads);

  const std::string csv_name =
      kind == ExperimentKind::Calibration ? "calibration.csv"
                                          : to_string(kind) + ".csv";
  {
    auto out = open_output(dir, csv_name);
    write_result_csv(table, out);
  }
  switch (kind) {
    case ExperimentKind::Convergence: {
      auto out = open_output(dir, "fig1_convergence.dat");
      write_fig1(table, spec, out);
      break;
    }
    case ExperimentKind::DpTradeoff: {
      auto out = open_output(dir, "fig2_tradeoff.dat");
      write_fig2(table, spec, out);
      break;
    }
    case ExperimentKind::Topology: {
      if (spec.graph_file.empty()) {
        auto out = open_output(dir, "fig3_topology.dat");
        write_fig3(table, spec, out);
      }
      break;
    }
    case ExperimentKind::Calibration:
      break;
  }
  return kExitOk;
}

int run_check_graph(const CommonOptions& opt, const std::string& corrupted_arg,
                    int target_1based) {
  ExperimentSpec spec;
  if (!opt.spec_path.empty()) spec = parse_spec_file(opt.spec_path);
  if (!opt.graph_file.empty()) spec.graph_file = opt.graph_file;
  if (opt.seed) spec.graph_seed = *opt.seed;

  const Graph g = resolve_graph(spec);
  std::cout << "nodes: " << g.n() << "\nedges: " << g.m() << '\n';
  std::cout << "connected: " << (is_connected(g) ? "yes" : "no") << '\n';
  std::cout << "degrees:";
  for (int i = 0; i < g.n(); ++i) std::cout << ' ' << g.degree(i);
  std::cout << '\n';
  if (!is_connected(g)) {
    std::cerr << "error: graph is disconnected\n";
    return kExitModel;
  }

  if (!corrupted_arg.empty()) {
    std::vector<int> corrupted;
    std::stringstream ss(corrupted_arg);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) corrupted.push_back(std::stoi(item) - 1);
    const CorruptionModel cm(g, corrupted);
    const int violator = assumption2_violation(g, cm);
    if (violator >= 0) {
      std::cerr << "error: honest node " << violator + 1
                << " has no corrupted neighbor\n";
      return kExitModel;
    }
    const int target = target_1based - 1;
    if (target < 0 || target >= g.n() || cm.is_corrupted(target)) {
      std::cerr << "error: target node must be honest\n";
      return kExitModel;
    }
    const auto component = honest_component(g, cm, target);
    std::cout << "honest nodes: " << cm.honest().size() << '\n';
    std::cout << "honest component of node " << target + 1 << ":";
    for (int j : component) std::cout << ' ' << j + 1;
    std::cout << '\n';
  }
  return kExitOk;
}

int run_table1(int n, double sigma_sq, double sigma_s_sq, int h, int n_h) {
  PrivacyParams params;
  params.n = n;
  params.sigma_sq = sigma_sq;
  params.sigma_s_sq = sigma_s_sq;
  params.honest_component_size = h;
  params.honest_count = n_h;

  const PrivacyReport dp = analytic_privacy(MechanismKind::DP, params);
  const PrivacyReport smpc = analytic_privacy(MechanismKind::SMPC, params);

  auto bits = [](const MIEstimate& e) {
    return std::isinf(e.value_bits) ? std::string("full")
                                    : format_double(e.value_bits) + " bits";
  };

  std::cout
      << "Mechanism comparison for distributed average consensus\n"
      << "(evaluated at sigma_s_sq=" << sigma_s_sq << ", sigma_sq=" << sigma_sq
      << ", n=" << n << ", h=" << h << ", n_h=" << n_h << ")\n\n"
      << "                          DP                    SMPC / DOSP\n"
      << "adversary model           passive, eavesdropping (both)\n"
      << "coordinated noise         no                    yes / no\n"
      << "output utility            I(Y;Y+Rbar)           I(Y;Y) full\n"
      << "  value                   " << bits(dp.utility) << "    " << bits(smpc.utility) << "\n"
      << "individual privacy        I(S;S+R_i)            I(S;sum_{N_h'} S)\n"
      << "  value                   " << bits(dp.privacy) << "    " << bits(smpc.privacy) << "\n"
      << "privacy lower bound       I(S;S+R)              I(S;sum_{N_h} S)\n"
      << "  value                   " << bits(dp.privacy_lb) << "    " << bits(smpc.privacy_lb) << "\n"
      << "max corrupted nodes       n-1 = " << n - 1 << "             d_i-1\n"
      << "channel encryption cost   0                     1 (flag only; no crypto here)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-preserving distributed average consensus simulator"};
  app.require_subcommand(1);

  CommonOptions conv_opt, trade_opt, topo_opt, calib_opt, check_opt;
  std::string check_corrupted;
  int check_target = 1;
  int t1_n = 10, t1_h = 5, t1_nh = 8;
  double t1_sigma = 1.0, t1_sigma_s = 1.0;

  auto* conv = app.add_subcommand("convergence", "error-vs-iteration curves per mechanism and noise level");
  add_common(conv, conv_opt);
  auto* trade = app.add_subcommand("tradeoff", "DP utility/privacy trade-off across a noise grid");
  add_common(trade, trade_opt);
  auto* topo = app.add_subcommand("topology", "SMPC/DOSP privacy on the two bundled topology graphs");
  add_common(topo, topo_opt);
  auto* calib = app.add_subcommand("calibrate", "estimator calibration and noise-floor checks");
  add_common(calib, calib_opt);

  auto* check = app.add_subcommand("check-graph", "inspect a graph and validate a corrupted set");
  add_common(check, check_opt);
  check->add_option("--corrupted", check_corrupted, "1-based corrupted node list");
  check->add_option("--target", check_target, "1-based honest target node");

  auto* table1 = app.add_subcommand("table1", "print the mechanism comparison table");
  table1->add_option("--n", t1_n, "network size");
  table1->add_option("--sigma-sq", t1_sigma, "noise variance");
  table1->add_option("--sigma-s-sq", t1_sigma_s, "private data variance");
  table1->add_option("--h", t1_h, "honest component size");
  table1->add_option("--n-h", t1_nh, "honest node count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (conv->parsed())
      return run_experiment_command(ExperimentKind::Convergence, conv_opt);
    if (trade->parsed())
      return run_experiment_command(ExperimentKind::DpTradeoff, trade_opt);
    if (topo->parsed())
      return run_experiment_command(ExperimentKind::Topology, topo_opt);
    if (calib->parsed())
      return run_experiment_command(ExperimentKind::Calibration, calib_opt);
    if (check->parsed())
      return run_check_graph(check_opt, check_corrupted, check_target);
    if (table1->parsed())
      return run_table1(t1_n, t1_sigma, t1_sigma_s, t1_h, t1_nh);
  } catch (const ModelViolation& e) {
    std::cerr << "model violation: " << e.what() << '\n';
    return kExitModel;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpec;
  }
  return kExitUsage;
}
