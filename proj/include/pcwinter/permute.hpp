#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "pcwinter/contribution_tree.hpp"

namespace pcwinter {

using Rng = std::mt19937_64;

// Random stream for work item `index` of a run seeded with `master_seed`.
Rng make_stream(std::uint64_t master_seed, std::uint64_t index);

// Per-depth truncation ratios. Entry d-1 applies to the children of players
// at depth d; depths beyond the list and the dummy root use ratio 0.
class TruncationRatios {
 public:
  TruncationRatios() = default;
  // Throws ConfigError unless every ratio lies in [0, 1).
  explicit TruncationRatios(std::vector<double> per_depth);

  double at_depth(int depth) const;
  const std::vector<double>& values() const { return per_depth_; }
  bool is_zero() const;

  // Number of children kept out of `child_count`: ceil((1 - r) * child_count),
  // evaluated with a tolerance so that e.g. (1 - 0.7) * 10 keeps 3.
  static std::size_t kept_children(std::size_t child_count, double ratio);

 private:
  std::vector<double> per_depth_;
};

// One sampled DFS traversal of the contribution tree.
struct Traversal {
  // Evaluated players in DFS preorder (dummy root omitted).
  std::vector<PlayerIndex> order;
  // Players inside truncated subtrees; their marginals are recorded as zero.
  std::vector<PlayerIndex> truncated;
  // Sampled child order of every visited player; index num_players() holds
  // the order of the dummy root's children. Unvisited players keep an empty
  // entry.
  std::vector<std::vector<PlayerIndex>> child_orders;
  // Number of leading children in child_orders[p] that were evaluated.
  std::vector<std::uint32_t> cuts;
};

// DFS traversal where every visited node draws a uniformly random order of
// all its children before the truncation cut is applied.
Traversal sample_dfs_traversal(const ContributionTree& tree, Rng& rng,
                               const TruncationRatios& ratios);
// Untruncated traversal.
Traversal sample_dfs_traversal(const ContributionTree& tree, Rng& rng);

using Permutation = std::vector<PlayerIndex>;

// Every DFS preorder of the tree. Throws SizeError above `cap` players.
std::vector<Permutation> enumerate_all_dfs(const ContributionTree& tree, std::size_t cap = 10);

struct ConstraintViolation {
  PlayerIndex player = 0;
  std::size_t position = 0;
};

struct ConstraintReport {
  bool level_ok = true;
  bool precedence_ok = true;
  // Earliest position at which either constraint breaks.
  std::optional<ConstraintViolation> first_violation;

  bool ok() const { return level_ok && precedence_ok; }
};

// Throws ValidationError unless `perm` is a permutation of all players.
ConstraintReport check_constraints(const ContributionTree& tree, std::span<const PlayerIndex> perm);

// All |P|! permutations filtered by check_constraints, in lexicographic order.
std::vector<Permutation> enumerate_permissible_bruteforce(const ContributionTree& tree,
                                                          std::size_t cap = 8);

// Level-constraint-only permutation: at every node the blocks {self} and each
// child subtree are shuffled uniformly and concatenated.
Permutation sample_level_only(const ContributionTree& tree, Rng& rng);
// Precedence-constraint-only permutation: repeatedly appends a uniformly
// chosen player whose parent is already placed.
Permutation sample_precedence_only(const ContributionTree& tree, Rng& rng);

}  // namespace pcwinter
