// Copyright 2026 The dpp2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPP2_GRAPH_H_
#define DPP2_GRAPH_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dpp2 {

// Stacked per-node vectors are stored as a d x N matrix: column i is node i's
// block. The flat R^{Nd} vector is the column-major view of this matrix.
using NodeMatrix = Eigen::MatrixXd;

// Undirected edge between 0-based node indices.
struct Edge {
  int a = 0;
  int b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class LaplacianScaling {
  kUnit,       // degree on the diagonal, -1 per edge
  kMaxDegree,  // unit Laplacian divided by (max degree + 1); spectrum in [0, 2)
};

struct NeighborWeight {
  int node = 0;
  double weight = 0.0;
};

// Communication topology plus the consensus weight matrix P. Immutable after
// construction.
class Network {
 public:
  Network(int node_count, std::vector<Edge> edges,
          LaplacianScaling scaling = LaplacianScaling::kUnit);

  int size() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  LaplacianScaling scaling() const { return scaling_; }
  const Eigen::MatrixXd& weights() const { return weights_; }

  // Ascending eigenvalues of P.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double lambda_max() const { return eigenvalues_(node_count_ - 1); }
  // Second-smallest eigenvalue of P; zero (up to round-off) iff disconnected.
  double lambda_min_positive() const {
    return node_count_ > 1 ? eigenvalues_(1) : 0.0;
  }
  // lambda_max / lambda_min_positive; infinity for disconnected graphs.
  double kappa() const;

  bool connected() const { return connected_; }
  int max_degree() const;

  // Row i of P restricted to its nonzeros, i.e. N_i together with i itself.
  const std::vector<NeighborWeight>& row(int i) const { return rows_[i]; }

  // (P kron I_d) v, computed by per-node neighbor sums.
  NodeMatrix apply(const NodeMatrix& v) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& stacked, int dim) const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  LaplacianScaling scaling_;
  Eigen::MatrixXd weights_;
  Eigen::VectorXd eigenvalues_;
  std::vector<std::vector<NeighborWeight>> rows_;
  bool connected_ = false;
};

// Validates the edge set (indices in range, no self-loops, duplicates merged)
// and builds the Laplacian network.
Network build_laplacian(std::span<const Edge> edges, int node_count,
                        LaplacianScaling scaling = LaplacianScaling::kUnit);

bool is_connected(int node_count, std::span<const Edge> edges);

struct GeometricGraph {
  std::vector<Edge> edges;
  std::uint64_t seed_used = 0;
};

// N points uniform in the unit square; edge iff distance <= radius. A
// disconnected draw is retried with seed + 1, seed + 2, ... and a
// std::runtime_error naming the last seed is thrown after max_retries.
GeometricGraph random_geometric_graph(int node_count, double radius,
                                      std::uint64_t seed,
                                      int max_retries = 1000);

std::vector<Edge> path_graph(int node_count);
std::vector<Edge> ring_graph(int node_count);
std::vector<Edge> complete_graph(int node_count);

// Edge-list text format: a header line holding N, then one "i j" pair per
// line with 1-based node indices. '#' starts a comment.
void write_edge_list(std::ostream& out, int node_count,
                     std::span<const Edge> edges);
struct EdgeList {
  int node_count = 0;
  std::vector<Edge> edges;
};
EdgeList read_edge_list(std::istream& in);
EdgeList read_edge_list_file(const std::string& path);

}  // namespace dpp2

#endif  // DPP2_GRAPH_H_
