#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pcwinter/contribution_tree.hpp"
#include "pcwinter/graph.hpp"

namespace pcwinter::testing {

// Path 0-1-2 with scalar features 1, 2, 3; node 0 labeled class 0.
inline Graph p3_graph(int num_classes = 2) {
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {1, 2}};
  FeatureMatrix x(3, 1);
  x << 1.0, 2.0, 3.0;
  return Graph::from_edges(3, edges, x, {0, kNoLabel, kNoLabel}, num_classes);
}

// Players: 0=(0), 1=(0,1), 2=(0,1,0), 3=(0,1,2).
inline ContributionTree p3_tree(const Graph& g) {
  const std::vector<NodeId> all{0, 1, 2};
  const std::vector<NodeId> labeled{0};
  return ContributionTree::build(InductiveView::induced(g, all), labeled, 2);
}

// A(a1, a2) + B: players 0=A, 1=a1, 2=a2, 3=B.
inline ContributionTree ab_tree() {
  const std::vector<PlayerIndex> parents{kNoParent, 0, 0, kNoParent};
  const std::vector<NodeId> nodes{0, 1, 2, 3};
  return ContributionTree::from_parents(parents, nodes);
}

inline ContributionTree flat_tree(std::size_t n) {
  std::vector<PlayerIndex> parents(n, kNoParent);
  std::vector<NodeId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<NodeId>(i);
  return ContributionTree::from_parents(parents, nodes);
}

// Random forest with `n` players; each player picks its parent uniformly
// among earlier players or the dummy root.
inline ContributionTree random_tree(std::mt19937_64& rng, std::size_t n) {
  std::vector<PlayerIndex> parents(n);
  std::vector<NodeId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    const std::size_t k = pick(rng);
    parents[i] = k == i ? kNoParent : static_cast<PlayerIndex>(k);
    nodes[i] = static_cast<NodeId>(i);
  }
  if (n > 0) parents[0] = kNoParent;
  return ContributionTree::from_parents(parents, nodes);
}

// Erdos-Renyi graph with `d` random features, every node labeled.
inline Graph random_graph(std::mt19937_64& rng, std::size_t n, double p, int d, int classes) {
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> feat(0.0, 1.0);
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (coin(rng)) edges.emplace_back(a, b);
    }
  }
  FeatureMatrix x(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = feat(rng);
  }
  std::vector<int> labels(n);
  for (auto& y : labels) y = cls(rng);
  return Graph::from_edges(n, edges, x, labels, classes);
}

// Two-block graph: nodes alternate between class 0 and class 1, edges are
// denser inside a block, features are a noisy class indicator.
struct BlockData {
  Graph graph;
  std::vector<NodeId> train, val, test, labeled;
};

inline BlockData two_block(std::uint64_t seed, std::size_t n, double p_in, double p_out,
                           double noise, std::size_t labeled_per_class) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (u(rng) < ((a % 2) == (b % 2) ? p_in : p_out)) edges.emplace_back(a, b);
    }
  }
  const int d = 4;
  FeatureMatrix x(static_cast<Eigen::Index>(n), d);
  std::vector<int> labels(n);
  for (NodeId v = 0; v < n; ++v) {
    labels[v] = static_cast<int>(v % 2);
    for (int j = 0; j < d; ++j) {
      x(v, j) = (j % 2 == labels[v] ? 1.0 : 0.0) + gauss(rng);
    }
  }
  BlockData out;
  out.graph = Graph::from_edges(n, edges, x, labels, 2);
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::size_t n_train = n * 3 / 5, n_val = n / 5;
  out.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                 ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
  std::size_t per[2] = {0, 0};
  for (NodeId v : out.train) {
    if (per[v % 2] < labeled_per_class) {
      out.labeled.push_back(v);
      ++per[v % 2];
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.labeled.begin(), out.labeled.end());
  return out;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pcwinter-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

}  // namespace pcwinter::testing
