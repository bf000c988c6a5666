#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppdac {

/// Thrown when an input violates the network/adversary model (disconnected
/// graph where connectivity is required, corrupted target, mechanism/solver
/// mismatch, unsatisfied corrupted-neighborhood assumption).
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected simple graph. Nodes are 0-based; edges are stored once as
/// (i,j) with i<j, in lexicographic order. Immutable after construction.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges);

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }
  /// Index of undirected edge {i,j} in the edge list; throws if absent.
  int edge_index(int i, int j) const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Edge-incidence matrix B (m x n): row l of edge (i,j), i<j, has +1 at i
/// and -1 at j. Row sums are zero.
Eigen::MatrixXd incidence_matrix(const Graph& g);

/// Per-directed-edge matrices used by the primal-dual solver.
/// C (2m x n): C(l,i)=+1 and C(l+m,j)=-1 for edge l=(i,j), i<j.
/// P (2m x 2m): symmetric permutation swapping the upper and lower m rows.
/// Satisfies C + P*C = [B; B].
struct PdmmEdgeMatrices {
  Eigen::MatrixXd C;
  Eigen::MatrixXd P;
};

PdmmEdgeMatrices pdmm_edge_matrices(const Graph& g);

/// Sign B_{i|j}: +1 if i<j, -1 if i>j.
inline double incidence_sign(int i, int j) { return i < j ? 1.0 : -1.0; }

/// Index of the dual variable lambda_{i|j} in the 2m vector, given the
/// undirected edge index l of (i,j): l if i<j, l+m otherwise.
int dual_index(const Graph& g, int edge, int from);

/// Partition of the node set into corrupted and honest nodes.
class CorruptionModel {
 public:
  CorruptionModel(const Graph& g, std::vector<int> corrupted);

  const std::vector<int>& corrupted() const { return corrupted_; }
  const std::vector<int>& honest() const { return honest_; }
  bool is_corrupted(int i) const { return corrupted_mask_.at(i); }
  /// Edge indices with at least one corrupted endpoint.
  const std::vector<int>& corrupted_edges() const { return corrupted_edges_; }

 private:
  std::vector<int> corrupted_;
  std::vector<int> honest_;
  std::vector<char> corrupted_mask_;
  std::vector<int> corrupted_edges_;
};

/// Nodes placed i.i.d. uniform on the unit square, one draw per coordinate
/// in node order; edge (i,j) iff squared distance <= radius_sq. May be
/// disconnected; callers that need connectivity check or resample.
Graph random_geometric_graph(int n, double radius_sq, std::uint64_t seed);

/// Resamples with incremented seed until connected (up to 100 attempts).
/// Returns the graph and the seed that produced it.
std::pair<Graph, std::uint64_t> connected_geometric_graph(int n,
                                                          double radius_sq,
                                                          std::uint64_t seed);

bool is_connected(const Graph& g);

/// Connected component of honest node i in the subgraph induced on the
/// honest nodes. Sorted ascending.
std::vector<int> honest_component(const Graph& g, const CorruptionModel& cm,
                                  int i);

/// First honest node with no corrupted neighbor, or -1 when every honest
/// node has at least one (the adversary-knowledge assumption).
int assumption2_violation(const Graph& g, const CorruptionModel& cm);

/// Edge-list text format: header "n m", then one "i j" line per edge
/// (0-based, i<j).
void save_graph(const Graph& g, std::ostream& out);
Graph load_graph(std::istream& in);
Graph load_graph_file(const std::string& path);

}  // namespace ppdac
