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

#include "dpp2/graph.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "dpp2/random.h"

namespace dpp2 {
namespace {

std::vector<Edge> normalize_edges(std::span<const Edge> edges,
                                  int node_count) {
  std::set<std::pair<int, int>> unique;
  for (const Edge& e : edges) {
    if (e.a < 0 || e.a >= node_count || e.b < 0 || e.b >= node_count) {
      throw std::invalid_argument(
          fmt::format("edge ({}, {}) references a node outside [1, {}]",
                      e.a + 1, e.b + 1, node_count));
    }
    if (e.a == e.b) {
      throw std::invalid_argument(
          fmt::format("self-loop at node {}", e.a + 1));
    }
    unique.emplace(std::min(e.a, e.b), std::max(e.a, e.b));
  }
  std::vector<Edge> out;
  out.reserve(unique.size());
  for (const auto& [a, b] : unique) out.push_back({a, b});
  return out;
}

}  // namespace

Network::Network(int node_count, std::vector<Edge> edges,
                 LaplacianScaling scaling)
    : node_count_(node_count), scaling_(scaling) {
  if (node_count <= 0) {
    throw std::invalid_argument("network needs at least one node");
  }
  edges_ = normalize_edges(edges, node_count);

  weights_ = Eigen::MatrixXd::Zero(node_count, node_count);
  for (const Edge& e : edges_) {
    weights_(e.a, e.a) += 1.0;
    weights_(e.b, e.b) += 1.0;
    weights_(e.a, e.b) = -1.0;
    weights_(e.b, e.a) = -1.0;
  }
  if (scaling == LaplacianScaling::kMaxDegree) {
    weights_ /= static_cast<double>(max_degree() + 1);
  }

  rows_.resize(node_count);
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      if (weights_(i, j) != 0.0) rows_[i].push_back({j, weights_(i, j)});
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      weights_, Eigen::EigenvaluesOnly);
  eigenvalues_ = solver.eigenvalues();
  connected_ = is_connected(node_count, edges_);
}

double Network::kappa() const {
  if (!connected_ || node_count_ < 2) {
    return std::numeric_limits<double>::infinity();
  }
  return lambda_max() / lambda_min_positive();
}

int Network::max_degree() const {
  std::vector<int> degree(node_count_, 0);
  for (const Edge& e : edges_) {
    ++degree[e.a];
    ++degree[e.b];
  }
  return *std::max_element(degree.begin(), degree.end());
}

NodeMatrix Network::apply(const NodeMatrix& v) const {
  if (v.cols() != node_count_) {
    throw std::invalid_argument(fmt::format(
        "apply: expected {} node blocks, got {}", node_count_, v.cols()));
  }
  NodeMatrix out = NodeMatrix::Zero(v.rows(), v.cols());
  for (int i = 0; i < node_count_; ++i) {
    for (const NeighborWeight& nw : rows_[i]) {
      out.col(i) += nw.weight * v.col(nw.node);
    }
  }
  return out;
}

Eigen::VectorXd Network::apply(const Eigen::VectorXd& stacked, int dim) const {
  if (dim <= 0 || stacked.size() != static_cast<Eigen::Index>(node_count_) * dim) {
    throw std::invalid_argument(fmt::format(
        "apply: vector length {} does not match N*d = {}*{}", stacked.size(),
        node_count_, dim));
  }
  const NodeMatrix blocks =
      Eigen::Map<const NodeMatrix>(stacked.data(), dim, node_count_);
  const NodeMatrix out = apply(blocks);
  return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

Network build_laplacian(std::span<const Edge> edges, int node_count,
                        LaplacianScaling scaling) {
  return Network(node_count, std::vector<Edge>(edges.begin(), edges.end()),
                 scaling);
}

bool is_connected(int node_count, std::span<const Edge> edges) {
  if (node_count <= 1) return true;
  std::vector<int> parent(node_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = node_count;
  for (const Edge& e : edges) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

GeometricGraph random_geometric_graph(int node_count, double radius,
                                      std::uint64_t seed, int max_retries) {
  if (node_count < 2) {
    throw std::invalid_argument("geometric graph needs at least two nodes");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("geometric graph radius must be positive");
  }
  std::uint64_t current = seed;
  for (int attempt = 0; attempt <= max_retries; ++attempt, ++current) {
    RandomStream stream(current);
    std::vector<double> px(node_count);
    std::vector<double> py(node_count);
    for (int i = 0; i < node_count; ++i) {
      px[i] = stream.uniform();
      py[i] = stream.uniform();
    }
    std::vector<Edge> edges;
    for (int i = 0; i < node_count; ++i) {
      for (int j = i + 1; j < node_count; ++j) {
        if (std::hypot(px[i] - px[j], py[i] - py[j]) <= radius) {
          edges.push_back({i, j});
        }
      }
    }
    if (is_connected(node_count, edges)) return {std::move(edges), current};
  }
  throw std::runtime_error(fmt::format(
      "no connected geometric graph (N={}, radius={}) after {} retries; last "
      "seed tried was {}",
      node_count, radius, max_retries, current - 1));
}

std::vector<Edge> path_graph(int node_count) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < node_count; ++i) edges.push_back({i, i + 1});
  return edges;
}

std::vector<Edge> ring_graph(int node_count) {
  std::vector<Edge> edges = path_graph(node_count);
  if (node_count > 2) edges.push_back({node_count - 1, 0});
  return edges;
}

std::vector<Edge> complete_graph(int node_count) {
  std::vector<Edge> edges;
  for (int i = 0; i < node_count; ++i) {
    for (int j = i + 1; j < node_count; ++j) edges.push_back({i, j});
  }
  return edges;
}

void write_edge_list(std::ostream& out, int node_count,
                     std::span<const Edge> edges) {
  out << node_count << '\n';
  for (const Edge& e : edges) out << e.a + 1 << ' ' << e.b + 1 << '\n';
}

EdgeList read_edge_list(std::istream& in) {
  EdgeList result;
  std::string line;
  int line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string probe;
    if (!(fields >> probe)) continue;
    fields.clear();
    fields.str(line);
    if (!have_header) {
      if (!(fields >> result.node_count) || result.node_count <= 0) {
        throw std::invalid_argument(fmt::format(
            "edge list line {}: expected a positive node count", line_number));
      }
      have_header = true;
      continue;
    }
    int a = 0;
    int b = 0;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw std::invalid_argument(fmt::format(
          "edge list line {}: expected two node indices", line_number));
    }
    if (a < 1 || a > result.node_count || b < 1 || b > result.node_count) {
      throw std::invalid_argument(fmt::format(
          "edge list line {}: node index outside [1, {}]", line_number,
          result.node_count));
    }
    result.edges.push_back({a - 1, b - 1});
  }
  if (!have_header) {
    throw std::invalid_argument("edge list is empty");
  }
  return result;
}

EdgeList read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path);
  return read_edge_list(in);
}

}  // namespace dpp2
