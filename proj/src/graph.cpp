#include "ppdac/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "ppdac/rng.hpp"

namespace ppdac {

Graph::Graph(int n, std::vector<std::pair<int, int>> edges)
    : n_(n), edges_(std::move(edges)), adjacency_(n) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  for (auto& [i, j] : edges_) {
    if (i > j) std::swap(i, j);
    if (i == j) throw std::invalid_argument("self-loop");
    if (i < 0 || j >= n_) throw std::invalid_argument("edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("duplicate edge");
  for (const auto& [i, j] : edges_) {
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

int Graph::edge_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(),
                                   std::make_pair(i, j));
  if (it == edges_.end() || *it != std::make_pair(i, j))
    throw std::invalid_argument("no such edge");
  return static_cast<int>(it - edges_.begin());
}

Eigen::MatrixXd incidence_matrix(const Graph& g) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(g.m(), g.n());
  for (int l = 0; l < g.m(); ++l) {
    const auto& [i, j] = g.edges()[l];
    b(l, i) = 1.0;
    b(l, j) = -1.0;
  }
  return b;
}

PdmmEdgeMatrices pdmm_edge_matrices(const Graph& g) {
  const int m = g.m();
  if (m < 1) throw std::invalid_argument("graph has no edges");
  PdmmEdgeMatrices mats;
  mats.C = Eigen::MatrixXd::Zero(2 * m, g.n());
  for (int l = 0; l < m; ++l) {
    const auto& [i, j] = g.edges()[l];
    mats.C(l, i) = 1.0;
    mats.C(l + m, j) = -1.0;
  }
  mats.P = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int l = 0; l < m; ++l) {
    mats.P(l, l + m) = 1.0;
    mats.P(l + m, l) = 1.0;
  }
  return mats;
}

int dual_index(const Graph& g, int edge, int from) {
  const auto& [i, j] = g.edges().at(edge);
  if (from == i) return edge;
  if (from == j) return edge + g.m();
  throw std::invalid_argument("node not an endpoint of edge");
}

CorruptionModel::CorruptionModel(const Graph& g, std::vector<int> corrupted)
    : corrupted_(std::move(corrupted)), corrupted_mask_(g.n(), 0) {
  std::sort(corrupted_.begin(), corrupted_.end());
  corrupted_.erase(std::unique(corrupted_.begin(), corrupted_.end()),
                   corrupted_.end());
  for (int c : corrupted_) {
    if (c < 0 || c >= g.n()) throw std::invalid_argument("corrupted node out of range");
    corrupted_mask_[c] = 1;
  }
  for (int i = 0; i < g.n(); ++i)
    if (!corrupted_mask_[i]) honest_.push_back(i);
  for (int l = 0; l < g.m(); ++l) {
    const auto& [i, j] = g.edges()[l];
    if (corrupted_mask_[i] || corrupted_mask_[j]) corrupted_edges_.push_back(l);
  }
}

Graph random_geometric_graph(int n, double radius_sq, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (radius_sq <= 0) throw std::invalid_argument("radius_sq must be positive");
  RngStream rng(seed, 0, Draw::Graph);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform01();
    y[i] = rng.uniform01();
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx * dx + dy * dy <= radius_sq) edges.emplace_back(i, j);
    }
  return Graph(n, std::move(edges));
}

std::pair<Graph, std::uint64_t> connected_geometric_graph(int n,
                                                          double radius_sq,
                                                          std::uint64_t seed) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    Graph g = random_geometric_graph(n, radius_sq, s);
    if (is_connected(g)) return {std::move(g), s};
  }
  throw ModelViolation("no connected geometric graph found in 100 attempts");
}

namespace {

std::vector<int> bfs_component(const Graph& g, int start,
                               const std::vector<char>& allowed) {
  std::vector<char> seen(g.n(), 0);
  std::deque<int> queue{start};
  seen[start] = 1;
  std::vector<int> component;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    component.push_back(u);
    for (int v : g.neighbors(u))
      if (allowed[v] && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
  }
  std::sort(component.begin(), component.end());
  return component;
}

}  // namespace

bool is_connected(const Graph& g) {
  std::vector<char> all(g.n(), 1);
  return static_cast<int>(bfs_component(g, 0, all).size()) == g.n();
}

std::vector<int> honest_component(const Graph& g, const CorruptionModel& cm,
                                  int i) {
  if (i < 0 || i >= g.n()) throw std::invalid_argument("node out of range");
  if (cm.is_corrupted(i)) throw ModelViolation("target node is corrupted");
  std::vector<char> honest(g.n(), 0);
  for (int h : cm.honest()) honest[h] = 1;
  return bfs_component(g, i, honest);
}

int assumption2_violation(const Graph& g, const CorruptionModel& cm) {
  for (int i : cm.honest()) {
    bool has_corrupted_neighbor = false;
    for (int v : g.neighbors(i))
      if (cm.is_corrupted(v)) {
        has_corrupted_neighbor = true;
        break;
      }
    if (!has_corrupted_neighbor) return i;
  }
  return -1;
}

void save_graph(const Graph& g, std::ostream& out) {
  out << g.n() << ' ' << g.m() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Graph load_graph(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("bad graph header");
  std::vector<std::pair<int, int>> edges(m);
  for (auto& [i, j] : edges)
    if (!(in >> i >> j)) throw std::invalid_argument("bad edge line");
  return Graph(n, std::move(edges));
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  return load_graph(in);
}

}  // namespace ppdac
