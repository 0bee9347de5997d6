#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pcwinter/graph.hpp"

namespace pcwinter {

// Dense index of a player in [0, num_players()).
using PlayerIndex = std::uint32_t;
inline constexpr PlayerIndex kNoParent = std::numeric_limits<PlayerIndex>::max();

// The forest of K-level computation trees of the labeled training nodes,
// joined under an implicit dummy root. Every tree node is a player identified
// by its path from its labeled root. Children of a player enumerate all
// neighbors of its graph node, the neighbor it was reached from included.
//
// Players built from a graph are numbered in preorder with children in
// ascending node-id order.
class ContributionTree {
 public:
  ContributionTree() = default;

  static ContributionTree build(const InductiveView& train, std::span<const NodeId> labeled,
                                int depth);

  // Arbitrary forest for tests and fixtures: parents[i] is the parent of
  // player i (kNoParent for a child of the dummy) and must be < i.
  static ContributionTree from_parents(std::span<const PlayerIndex> parents,
                                       std::span<const NodeId> nodes);

  std::size_t num_players() const { return nodes_.size(); }
  // Maximum player depth; roots have depth 1.
  int max_depth() const { return max_depth_; }

  // Children of the dummy root.
  std::span<const PlayerIndex> roots() const { return roots_; }
  std::span<const PlayerIndex> children(PlayerIndex p) const {
    return {child_list_.data() + child_offsets_[p], child_list_.data() + child_offsets_[p + 1]};
  }
  PlayerIndex parent(PlayerIndex p) const { return parents_[p]; }
  int depth(PlayerIndex p) const { return depths_[p]; }
  NodeId node(PlayerIndex p) const { return nodes_[p]; }
  PlayerIndex root_of(PlayerIndex p) const { return root_of_[p]; }

  std::size_t subtree_size(PlayerIndex p) const { return subtree_size_[p]; }
  // |D(p)|; throws LookupError for an unknown player.
  std::size_t descendants_count(PlayerIndex p) const;
  // True when `p` lies strictly below `ancestor`.
  bool is_descendant(PlayerIndex ancestor, PlayerIndex p) const {
    return preorder_[p] > preorder_[ancestor] &&
           preorder_[p] < preorder_[ancestor] + subtree_size_[ancestor];
  }

  std::vector<NodeId> path(PlayerIndex p) const;
  std::optional<PlayerIndex> find(std::span<const NodeId> path) const;

  void write_players_csv(const std::filesystem::path& file) const;

 private:
  void finalize();

  std::vector<NodeId> nodes_;
  std::vector<PlayerIndex> parents_;
  std::vector<int> depths_;
  std::vector<PlayerIndex> roots_;
  std::vector<std::size_t> child_offsets_;
  std::vector<PlayerIndex> child_list_;
  std::vector<PlayerIndex> root_of_;
  std::vector<std::size_t> subtree_size_;
  std::vector<std::size_t> preorder_;
  int max_depth_ = 0;
};

// Graph node of the player (last path element).
NodeId player_node(const ContributionTree& tree, PlayerIndex p);
// Tree edge to the parent as an unordered node pair; absent for roots.
std::optional<Edge> player_edge(const ContributionTree& tree, PlayerIndex p);

}  // namespace pcwinter
