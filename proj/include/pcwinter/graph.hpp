#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pcwinter {

using NodeId = std::uint32_t;

// Sentinel for unlabeled nodes; never a valid class index.
inline constexpr int kNoLabel = -1;

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Undirected edge with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge make(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Counters for input edges that were merged or dropped at construction.
struct EdgeCleanup {
  std::size_t duplicates = 0;
  std::size_t self_loops = 0;
};

// Immutable attributed graph: CSR adjacency with sorted neighbor lists, dense
// feature matrix, optional per-node class labels.
class Graph {
 public:
  Graph() = default;

  // Duplicate and reversed edges are merged; self-loops are dropped. Both are
  // counted in `cleanup` when provided.
  static Graph from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges,
                          FeatureMatrix features, std::vector<int> labels, int num_classes,
                          EdgeCleanup* cleanup = nullptr);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return adjacency_.size() / 2; }
  std::size_t num_features() const { return static_cast<std::size_t>(features_.cols()); }
  int num_classes() const { return num_classes_; }

  std::span<const NodeId> neighbors(NodeId node) const;
  std::size_t degree(NodeId node) const { return neighbors(node).size(); }
  bool has_edge(NodeId a, NodeId b) const;
  // All edges, ascending by (u, v).
  std::vector<Edge> edges() const;

  const FeatureMatrix& features() const { return features_; }
  int label(NodeId node) const { return labels_.at(node); }
  bool is_labeled(NodeId node) const { return labels_.at(node) != kNoLabel; }
  const std::vector<int>& labels() const { return labels_; }

  // Scales every nonzero feature row to unit L1 norm.
  void normalize_rows();

  std::uint64_t fingerprint() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  FeatureMatrix features_;
  std::vector<int> labels_;
  int num_classes_ = 0;
};

struct SplitSpec {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  std::vector<NodeId> labeled_train;

  // Sorts every list and checks disjointness, containment and id range.
  // Throws ValidationError.
  void validate(const Graph& g);
  std::uint64_t fingerprint() const;
};

// A node subset of a parent graph together with a subset of the parent's
// edges between kept nodes. Nodes are addressed either by their original id or
// by a compact local index (position in the ascending kept-id list).
class InductiveView {
 public:
  // Keeps every parent edge with both endpoints in `ids`.
  static InductiveView induced(const Graph& g, std::span<const NodeId> ids);
  // Keeps only the listed edges; each must exist in `g` with both endpoints kept.
  static InductiveView with_edges(const Graph& g, std::span<const NodeId> ids,
                                  std::span<const Edge> edges);

  const Graph& parent() const { return *parent_; }
  std::size_t size() const { return kept_.size(); }
  std::span<const NodeId> kept_ids() const { return kept_; }
  bool contains(NodeId node) const {
    return node < local_.size() && local_[node] >= 0;
  }
  std::size_t local_index(NodeId node) const;
  NodeId original_id(std::size_t local) const { return kept_.at(local); }

  std::span<const std::uint32_t> local_neighbors(std::size_t local) const {
    return {adjacency_.data() + offsets_[local], adjacency_.data() + offsets_[local + 1]};
  }
  // Neighbors of an original id, as original ids in ascending order.
  std::vector<NodeId> neighbors(NodeId node) const;
  std::size_t degree(NodeId node) const;
  std::size_t num_edges() const { return adjacency_.size() / 2; }
  std::vector<Edge> edges() const;

 private:
  InductiveView(const Graph& g, std::span<const NodeId> ids);
  void build_adjacency(std::vector<std::pair<std::uint32_t, std::uint32_t>> local_edges);

  const Graph* parent_ = nullptr;
  std::vector<NodeId> kept_;
  std::vector<std::int32_t> local_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adjacency_;
};

std::size_t degree(const InductiveView& view, NodeId node);

struct SplitViews {
  InductiveView train;
  InductiveView val;
  InductiveView test;
};

SplitViews inductive_split(const Graph& g, const SplitSpec& split);

// ---------------------------------------------------------------------------
// Dataset files

struct DatasetPaths {
  std::filesystem::path edges;     // edges.tsv
  std::filesystem::path features;  // features.csv
  std::filesystem::path labels;    // labels.csv
  std::filesystem::path split;     // split.json
  bool normalize_features = true;
  // Derived from the largest label when absent.
  std::optional<int> num_classes;

  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

struct LoadStats {
  EdgeCleanup cleanup;
  std::size_t edge_lines = 0;
};

struct Dataset {
  Graph graph;
  SplitSpec split;
  LoadStats stats;

  std::uint64_t fingerprint() const;
};

Dataset load_dataset(const DatasetPaths& paths);

// Writes the four dataset files into `dir`. Features use the shortest
// round-trip spelling, so a reload without normalization is bit-exact.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace pcwinter
