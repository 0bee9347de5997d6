#include "pcwinter/contribution_tree.hpp"

#include <algorithm>
#include <string>

#include "pcwinter/errors.hpp"
#include "pcwinter/textio.hpp"

namespace pcwinter {

ContributionTree ContributionTree::build(const InductiveView& train,
                                         std::span<const NodeId> labeled, int depth) {
  if (depth < 1) throw ConfigError("computation tree depth must be >= 1");
  if (labeled.empty()) throw ValidationError("no labeled training nodes");
  std::vector<NodeId> roots(labeled.begin(), labeled.end());
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  for (NodeId v : roots) {
    if (!train.contains(v)) {
      throw ValidationError("labeled node " + std::to_string(v) + " is not in the training view");
    }
  }

  ContributionTree t;
  const int max_player_depth = depth + 1;
  struct Frame {
    std::size_t local;
    PlayerIndex parent;
    int depth;
  };
  // Preorder expansion; pushing children in reverse keeps ascending order.
  std::vector<Frame> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    stack.push_back({train.local_index(*it), kNoParent, 1});
  }
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    t.nodes_.push_back(train.original_id(f.local));
    t.parents_.push_back(f.parent);
    t.depths_.push_back(f.depth);
    const auto self = static_cast<PlayerIndex>(t.nodes_.size() - 1);
    if (f.depth < max_player_depth) {
      const auto nbrs = train.local_neighbors(f.local);
      for (auto it = nbrs.rbegin(); it != nbrs.rend(); ++it) {
        stack.push_back({*it, self, f.depth + 1});
      }
    }
  }
  t.finalize();
  return t;
}

ContributionTree ContributionTree::from_parents(std::span<const PlayerIndex> parents,
                                                std::span<const NodeId> nodes) {
  if (parents.size() != nodes.size()) {
    throw ValidationError("parents and nodes differ in length");
  }
  ContributionTree t;
  t.nodes_.assign(nodes.begin(), nodes.end());
  t.parents_.assign(parents.begin(), parents.end());
  t.depths_.resize(parents.size());
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] == kNoParent) {
      t.depths_[i] = 1;
    } else if (parents[i] >= i) {
      throw ValidationError("parent of player " + std::to_string(i) + " must precede it");
    } else {
      t.depths_[i] = t.depths_[parents[i]] + 1;
    }
  }
  t.finalize();
  return t;
}

void ContributionTree::finalize() {
  const std::size_t n = nodes_.size();
  roots_.clear();
  child_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (parents_[i] == kNoParent) {
      roots_.push_back(static_cast<PlayerIndex>(i));
    } else {
      ++child_offsets_[parents_[i] + 1];
    }
  }
  for (std::size_t i = 0; i < n; ++i) child_offsets_[i + 1] += child_offsets_[i];
  child_list_.assign(n - roots_.size(), 0);
  std::vector<std::size_t> cursor(child_offsets_.begin(), child_offsets_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (parents_[i] != kNoParent) child_list_[cursor[parents_[i]]++] = static_cast<PlayerIndex>(i);
  }

  // Parents precede children, so a reverse sweep accumulates subtree sizes.
  subtree_size_.assign(n, 1);
  for (std::size_t i = n; i-- > 0;) {
    if (parents_[i] != kNoParent) subtree_size_[parents_[i]] += subtree_size_[i];
  }
  root_of_.resize(n);
  max_depth_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    root_of_[i] = parents_[i] == kNoParent ? static_cast<PlayerIndex>(i) : root_of_[parents_[i]];
    max_depth_ = std::max(max_depth_, depths_[i]);
  }

  preorder_.assign(n, 0);
  std::size_t counter = 0;
  std::vector<PlayerIndex> stack(roots_.rbegin(), roots_.rend());
  while (!stack.empty()) {
    const PlayerIndex p = stack.back();
    stack.pop_back();
    preorder_[p] = counter++;
    const auto kids = children(p);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
}

std::size_t ContributionTree::descendants_count(PlayerIndex p) const {
  if (p >= num_players()) throw LookupError("unknown player " + std::to_string(p));
  return subtree_size_[p] - 1;
}

std::vector<NodeId> ContributionTree::path(PlayerIndex p) const {
  if (p >= num_players()) throw LookupError("unknown player " + std::to_string(p));
  std::vector<NodeId> out;
  for (PlayerIndex q = p; q != kNoParent; q = parents_[q]) out.push_back(nodes_[q]);
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<PlayerIndex> ContributionTree::find(std::span<const NodeId> path) const {
  if (path.empty()) return std::nullopt;
  std::optional<PlayerIndex> current;
  for (PlayerIndex r : roots_) {
    if (nodes_[r] == path[0]) {
      current = r;
      break;
    }
  }
  for (std::size_t i = 1; current && i < path.size(); ++i) {
    std::optional<PlayerIndex> next;
    for (PlayerIndex c : children(*current)) {
      if (nodes_[c] == path[i]) {
        next = c;
        break;
      }
    }
    current = next;
  }
  return current;
}

void ContributionTree::write_players_csv(const std::filesystem::path& file) const {
  AtomicFile out(file);
  out.stream() << "player_index,path\n";
  for (PlayerIndex p = 0; p < num_players(); ++p) {
    out.stream() << p << ',';
    const auto nodes = path(p);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i) out.stream() << '/';
      out.stream() << nodes[i];
    }
    out.stream() << '\n';
  }
  out.commit();
}

NodeId player_node(const ContributionTree& tree, PlayerIndex p) { return tree.node(p); }

std::optional<Edge> player_edge(const ContributionTree& tree, PlayerIndex p) {
  const PlayerIndex parent = tree.parent(p);
  if (parent == kNoParent) return std::nullopt;
  return Edge::make(tree.node(p), tree.node(parent));
}

}  // namespace pcwinter
