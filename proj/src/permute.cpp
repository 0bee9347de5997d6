#include "pcwinter/permute.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcwinter/errors.hpp"
#include "pcwinter/hash.hpp"

namespace pcwinter {

Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(stream_seed(master_seed, index));
}

TruncationRatios::TruncationRatios(std::vector<double> per_depth) : per_depth_(std::move(per_depth)) {
  for (double r : per_depth_) {
    if (!(r >= 0.0 && r < 1.0)) {
      throw ConfigError("truncation ratio " + std::to_string(r) + " outside [0, 1)");
    }
  }
}

double TruncationRatios::at_depth(int depth) const {
  if (depth < 1 || static_cast<std::size_t>(depth) > per_depth_.size()) return 0.0;
  return per_depth_[static_cast<std::size_t>(depth) - 1];
}

bool TruncationRatios::is_zero() const {
  return std::all_of(per_depth_.begin(), per_depth_.end(), [](double r) { return r == 0.0; });
}

std::size_t TruncationRatios::kept_children(std::size_t child_count, double ratio) {
  if (child_count == 0) return 0;
  if (ratio == 0.0) return child_count;
  const double kept = std::ceil((1.0 - ratio) * static_cast<double>(child_count) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(kept, 0.0)), 1, child_count);
}

namespace {

Traversal empty_traversal(const ContributionTree& tree) {
  Traversal t;
  t.order.reserve(tree.num_players());
  t.child_orders.resize(tree.num_players() + 1);
  t.cuts.assign(tree.num_players() + 1, 0);
  return t;
}

void append_subtree(const ContributionTree& tree, PlayerIndex p, std::vector<PlayerIndex>& out) {
  std::vector<PlayerIndex> stack{p};
  while (!stack.empty()) {
    const PlayerIndex q = stack.back();
    stack.pop_back();
    out.push_back(q);
    const auto kids = tree.children(q);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
}

void visit_untruncated(const ContributionTree& tree, Rng& rng, PlayerIndex p, Traversal& t) {
  t.order.push_back(p);
  const auto kids = tree.children(p);
  auto& order = t.child_orders[p];
  order.assign(kids.begin(), kids.end());
  std::shuffle(order.begin(), order.end(), rng);
  t.cuts[p] = static_cast<std::uint32_t>(order.size());
  for (PlayerIndex c : order) visit_untruncated(tree, rng, c, t);
}

}  // namespace

Traversal sample_dfs_traversal(const ContributionTree& tree, Rng& rng) {
  Traversal t = empty_traversal(tree);
  const std::size_t dummy = tree.num_players();
  auto& roots = t.child_orders[dummy];
  roots.assign(tree.roots().begin(), tree.roots().end());
  std::shuffle(roots.begin(), roots.end(), rng);
  t.cuts[dummy] = static_cast<std::uint32_t>(roots.size());
  for (PlayerIndex r : roots) visit_untruncated(tree, rng, r, t);
  return t;
}

Traversal sample_dfs_traversal(const ContributionTree& tree, Rng& rng,
                               const TruncationRatios& ratios) {
  Traversal t = empty_traversal(tree);
  const std::size_t dummy = tree.num_players();
  auto& roots = t.child_orders[dummy];
  roots.assign(tree.roots().begin(), tree.roots().end());
  std::shuffle(roots.begin(), roots.end(), rng);
  t.cuts[dummy] = static_cast<std::uint32_t>(roots.size());

  std::vector<PlayerIndex> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const PlayerIndex p = stack.back();
    stack.pop_back();
    t.order.push_back(p);
    const auto kids = tree.children(p);
    auto& order = t.child_orders[p];
    order.assign(kids.begin(), kids.end());
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t keep = TruncationRatios::kept_children(order.size(), ratios.at_depth(tree.depth(p)));
    t.cuts[p] = static_cast<std::uint32_t>(keep);
    for (std::size_t i = keep; i < order.size(); ++i) append_subtree(tree, order[i], t.truncated);
    for (std::size_t i = keep; i-- > 0;) stack.push_back(order[i]);
  }
  return t;
}

namespace {

std::vector<Permutation> forest_preorders(const ContributionTree& tree,
                                          std::span<const PlayerIndex> siblings);

std::vector<Permutation> subtree_preorders(const ContributionTree& tree, PlayerIndex p) {
  auto below = forest_preorders(tree, tree.children(p));
  for (auto& perm : below) perm.insert(perm.begin(), p);
  return below;
}

std::vector<Permutation> forest_preorders(const ContributionTree& tree,
                                          std::span<const PlayerIndex> siblings) {
  std::vector<std::vector<Permutation>> parts;
  parts.reserve(siblings.size());
  for (PlayerIndex s : siblings) parts.push_back(subtree_preorders(tree, s));

  std::vector<std::size_t> order(siblings.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<Permutation> out;
  do {
    std::vector<Permutation> partial{Permutation{}};
    for (std::size_t idx : order) {
      std::vector<Permutation> next;
      next.reserve(partial.size() * parts[idx].size());
      for (const auto& prefix : partial) {
        for (const auto& piece : parts[idx]) {
          Permutation joined = prefix;
          joined.insert(joined.end(), piece.begin(), piece.end());
          next.push_back(std::move(joined));
        }
      }
      partial = std::move(next);
    }
    for (auto& perm : partial) out.push_back(std::move(perm));
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace

std::vector<Permutation> enumerate_all_dfs(const ContributionTree& tree, std::size_t cap) {
  if (tree.num_players() > cap) {
    throw SizeError("enumeration limited to " + std::to_string(cap) + " players, tree has " +
                    std::to_string(tree.num_players()));
  }
  auto perms = forest_preorders(tree, tree.roots());
  std::sort(perms.begin(), perms.end());
  perms.erase(std::unique(perms.begin(), perms.end()), perms.end());
  return perms;
}

ConstraintReport check_constraints(const ContributionTree& tree, std::span<const PlayerIndex> perm) {
  const std::size_t n = tree.num_players();
  if (perm.size() != n) {
    throw ValidationError("permutation has " + std::to_string(perm.size()) + " entries, tree has " +
                          std::to_string(n) + " players");
  }
  std::vector<std::size_t> pos(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] >= n || pos[perm[i]] != n) {
      throw ValidationError("sequence is not a permutation of the players");
    }
    pos[perm[i]] = i;
  }

  ConstraintReport report;
  std::size_t first = n;
  auto note = [&](std::size_t position) { first = std::min(first, position); };

  // Level: the block {p} U D(p) must fit in |D(p)| + 1 consecutive slots.
  // Parents precede children in player numbering, so a reverse sweep gives
  // each block's minimum position.
  std::vector<std::size_t> block_min(pos);
  for (std::size_t i = n; i-- > 0;) {
    const PlayerIndex parent = tree.parent(static_cast<PlayerIndex>(i));
    if (parent != kNoParent) block_min[parent] = std::min(block_min[parent], block_min[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = perm[i];
    // Any block containing p that started too early to still hold p?
    for (PlayerIndex a = p; a != kNoParent; a = tree.parent(a)) {
      if (i > block_min[a] + tree.descendants_count(a)) {
        report.level_ok = false;
        note(i);
        break;
      }
    }
    // Precedence: every ancestor must already be placed.
    for (PlayerIndex a = tree.parent(p); a != kNoParent; a = tree.parent(a)) {
      if (pos[a] > i) {
        report.precedence_ok = false;
        note(i);
        break;
      }
    }
  }
  if (first < n) report.first_violation = ConstraintViolation{perm[first], first};
  return report;
}

std::vector<Permutation> enumerate_permissible_bruteforce(const ContributionTree& tree,
                                                          std::size_t cap) {
  const std::size_t n = tree.num_players();
  if (n > cap) {
    throw SizeError("brute-force enumeration limited to " + std::to_string(cap) +
                    " players, tree has " + std::to_string(n));
  }
  Permutation perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<PlayerIndex>(i);
  std::vector<Permutation> out;
  do {
    if (check_constraints(tree, perm).ok()) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

void level_block(const ContributionTree& tree, Rng& rng, PlayerIndex p, Permutation& out) {
  // Block kNoParent stands for the player itself.
  std::vector<PlayerIndex> blocks{kNoParent};
  for (PlayerIndex c : tree.children(p)) blocks.push_back(c);
  std::shuffle(blocks.begin(), blocks.end(), rng);
  for (PlayerIndex b : blocks) {
    if (b == kNoParent) {
      out.push_back(p);
    } else {
      level_block(tree, rng, b, out);
    }
  }
}

}  // namespace

Permutation sample_level_only(const ContributionTree& tree, Rng& rng) {
  Permutation out;
  out.reserve(tree.num_players());
  std::vector<PlayerIndex> roots(tree.roots().begin(), tree.roots().end());
  std::shuffle(roots.begin(), roots.end(), rng);
  for (PlayerIndex r : roots) level_block(tree, rng, r, out);
  return out;
}

Permutation sample_precedence_only(const ContributionTree& tree, Rng& rng) {
  Permutation out;
  out.reserve(tree.num_players());
  std::vector<PlayerIndex> available(tree.roots().begin(), tree.roots().end());
  while (!available.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, available.size() - 1);
    const std::size_t k = pick(rng);
    const PlayerIndex p = available[k];
    available[k] = available.back();
    available.pop_back();
    out.push_back(p);
    for (PlayerIndex c : tree.children(p)) available.push_back(c);
  }
  return out;
}

}  // namespace pcwinter
