#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "pcwinter/errors.hpp"
#include "pcwinter/permute.hpp"

namespace pcwinter {
namespace {

using Perm = std::vector<PlayerIndex>;

TEST(SampleDfs, PathFixtureUntruncated) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  const std::set<Perm> allowed{{0, 1, 2, 3}, {0, 1, 3, 2}};
  std::set<Perm> seen;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = make_stream(1, i);
    const Traversal tr = sample_dfs_traversal(t, rng, TruncationRatios({0.0, 0.0}));
    EXPECT_TRUE(allowed.contains(tr.order));
    EXPECT_TRUE(tr.truncated.empty());
    seen.insert(tr.order);
  }
  EXPECT_EQ(seen, allowed);
}

TEST(SampleDfs, SinglePlayer) {
  const auto t = testing::flat_tree(1);
  Rng rng(3);
  EXPECT_EQ(sample_dfs_traversal(t, rng).order, Perm{0});
}

TEST(SampleDfs, DepthTwoRatioHalfTruncatesOneChild) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng = make_stream(2, i);
    const Traversal tr = sample_dfs_traversal(t, rng, TruncationRatios({0.0, 0.5}));
    ASSERT_EQ(tr.order.size(), 3u);
    EXPECT_EQ(tr.order[0], 0u);
    EXPECT_EQ(tr.order[1], 1u);
    ASSERT_EQ(tr.truncated.size(), 1u);
    EXPECT_TRUE(tr.truncated[0] == 2 || tr.truncated[0] == 3);
    EXPECT_NE(tr.order[2], tr.truncated[0]);
    EXPECT_EQ(tr.cuts[1], 1u);
  }
}

TEST(SampleDfs, RatiosOutsideRangeRejected) {
  EXPECT_THROW(TruncationRatios({1.0}), ConfigError);
  EXPECT_THROW(TruncationRatios({-0.1}), ConfigError);
  EXPECT_THROW(TruncationRatios({0.5, 1.5}), ConfigError);
}

TEST(SampleDfs, KeptChildrenRounding) {
  EXPECT_EQ(TruncationRatios::kept_children(10, 0.7), 3u);
  EXPECT_EQ(TruncationRatios::kept_children(2, 0.5), 1u);
  EXPECT_EQ(TruncationRatios::kept_children(3, 0.5), 2u);
  EXPECT_EQ(TruncationRatios::kept_children(1, 0.9), 1u);
  EXPECT_EQ(TruncationRatios::kept_children(7, 0.0), 7u);
  EXPECT_EQ(TruncationRatios::kept_children(0, 0.5), 0u);
  EXPECT_EQ(TruncationRatios::kept_children(10, 0.9), 1u);
}

TEST(SampleDfs, ZeroRatiosReproduceUntruncatedStream) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = testing::random_tree(gen, 5 + trial);
    for (std::uint64_t i = 0; i < 10; ++i) {
      Rng a = make_stream(9, i);
      Rng b = make_stream(9, i);
      const Traversal x = sample_dfs_traversal(t, a);
      const Traversal y = sample_dfs_traversal(t, b, TruncationRatios({0.0, 0.0, 0.0}));
      EXPECT_EQ(x.order, y.order);
      EXPECT_EQ(x.child_orders, y.child_orders);
      EXPECT_EQ(a(), b());  // same number of draws consumed
    }
  }
}

TEST(SampleDfs, TruncatedTraversalPartitionsPlayers) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = testing::random_tree(gen, 20 + trial);
    const TruncationRatios ratios({0.5, 0.7});
    Rng rng = make_stream(5, trial);
    const Traversal tr = sample_dfs_traversal(t, rng, ratios);
    std::vector<int> seen(t.num_players(), 0);
    std::vector<std::size_t> pos(t.num_players(), 0);
    for (std::size_t i = 0; i < tr.order.size(); ++i) {
      ++seen[tr.order[i]];
      pos[tr.order[i]] = i;
    }
    for (PlayerIndex p : tr.truncated) ++seen[p];
    for (int s : seen) EXPECT_EQ(s, 1);
    for (PlayerIndex p : tr.order) {
      if (t.parent(p) != kNoParent) {
        EXPECT_LT(pos[t.parent(p)], pos[p]);
      }
      const auto expected = TruncationRatios::kept_children(t.children(p).size(),
                                                           ratios.at_depth(t.depth(p)));
      EXPECT_EQ(tr.cuts[p], expected);
      // The child order is a permutation of all children, cut or not.
      auto sorted = tr.child_orders[p];
      std::sort(sorted.begin(), sorted.end());
      const auto kids = t.children(p);
      EXPECT_EQ(sorted, Perm(kids.begin(), kids.end()));
    }
  }
}

TEST(SampleDfs, DeterministicPerSeed) {
  std::mt19937_64 gen(6);
  const auto t = testing::random_tree(gen, 40);
  Rng a = make_stream(77, 3);
  Rng b = make_stream(77, 3);
  const TruncationRatios r({0.5, 0.7});
  const Traversal x = sample_dfs_traversal(t, a, r);
  const Traversal y = sample_dfs_traversal(t, b, r);
  EXPECT_EQ(x.order, y.order);
  EXPECT_EQ(x.truncated, y.truncated);
  EXPECT_EQ(x.cuts, y.cuts);
}

TEST(EnumerateAllDfs, Counts) {
  const Graph g = testing::p3_graph();
  EXPECT_EQ(enumerate_all_dfs(testing::p3_tree(g)).size(), 2u);
  EXPECT_EQ(enumerate_all_dfs(testing::flat_tree(2)).size(), 2u);
  EXPECT_EQ(enumerate_all_dfs(testing::ab_tree()).size(), 4u);
  EXPECT_THROW(enumerate_all_dfs(testing::flat_tree(11)), SizeError);
}

TEST(CheckConstraints, LevelViolation) {
  // p=0 with children a=1, b=2; x=3 outside.
  const std::vector<PlayerIndex> parents{kNoParent, 0, 0, kNoParent};
  const std::vector<NodeId> nodes{0, 1, 2, 3};
  const auto t = ContributionTree::from_parents(parents, nodes);
  const Perm perm{0, 3, 1, 2};
  const auto r = check_constraints(t, perm);
  EXPECT_FALSE(r.level_ok);
  EXPECT_TRUE(r.precedence_ok);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_EQ(r.first_violation->player, 2u);
  EXPECT_EQ(r.first_violation->position, 3u);
}

TEST(CheckConstraints, PrecedenceViolation) {
  const std::vector<PlayerIndex> parents{kNoParent, 0, 0};
  const std::vector<NodeId> nodes{0, 1, 2};
  const auto t = ContributionTree::from_parents(parents, nodes);
  const Perm perm{1, 0, 2};
  const auto r = check_constraints(t, perm);
  EXPECT_TRUE(r.level_ok);
  EXPECT_FALSE(r.precedence_ok);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_EQ(r.first_violation->player, 1u);
  EXPECT_EQ(r.first_violation->position, 0u);
}

TEST(CheckConstraints, RejectsNonPermutation) {
  const auto t = testing::flat_tree(3);
  EXPECT_THROW(check_constraints(t, Perm{0, 1}), ValidationError);
  EXPECT_THROW(check_constraints(t, Perm{0, 1, 1}), ValidationError);
  EXPECT_THROW(check_constraints(t, Perm{0, 1, 3}), ValidationError);
}

TEST(CheckConstraints, SampledTraversalsPass) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::random_tree(gen, 10 + 2 * trial);
    for (std::uint64_t i = 0; i < 100; ++i) {
      Rng rng = make_stream(trial, i);
      EXPECT_TRUE(check_constraints(t, sample_dfs_traversal(t, rng).order).ok());
    }
  }
}

TEST(Bruteforce, Examples) {
  const Graph g = testing::p3_graph();
  const auto p3 = testing::p3_tree(g);
  const auto brute = enumerate_permissible_bruteforce(p3);
  EXPECT_EQ(brute, (std::vector<Perm>{{0, 1, 2, 3}, {0, 1, 3, 2}}));
  EXPECT_EQ(enumerate_permissible_bruteforce(testing::flat_tree(3)).size(), 6u);
  const auto ab = testing::ab_tree();
  EXPECT_EQ(enumerate_permissible_bruteforce(ab), enumerate_all_dfs(ab));
  EXPECT_THROW(enumerate_permissible_bruteforce(testing::flat_tree(9)), SizeError);
}

TEST(Bruteforce, EqualsDfsEnumerationOnRandomTrees) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = testing::random_tree(gen, 1 + trial % 7);
    EXPECT_EQ(enumerate_permissible_bruteforce(t), enumerate_all_dfs(t));
  }
}

std::set<Perm> sample_set(const ContributionTree& t, Perm (*sampler)(const ContributionTree&, Rng&),
                          int draws) {
  std::set<Perm> out;
  for (int i = 0; i < draws; ++i) {
    Rng rng = make_stream(123, static_cast<std::uint64_t>(i));
    out.insert(sampler(t, rng));
  }
  return out;
}

// All permutations that pass the given half of check_constraints.
std::set<Perm> filtered(const ContributionTree& t, bool level) {
  Perm p(t.num_players());
  std::iota(p.begin(), p.end(), 0u);
  std::set<Perm> out;
  do {
    const auto r = check_constraints(t, p);
    if (level ? r.level_ok : r.precedence_ok) out.insert(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

TEST(Ablation, LevelOnlyOnPathFixture) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  const auto seen = sample_set(t, sample_level_only, 2000);
  EXPECT_EQ(seen.size(), 12u);
  EXPECT_TRUE(seen.contains(Perm{2, 3, 1, 0}));
  EXPECT_EQ(seen, filtered(t, true));
  bool some_precedence_violation = false;
  for (const auto& p : seen) {
    const auto r = check_constraints(t, p);
    EXPECT_TRUE(r.level_ok);
    some_precedence_violation |= !r.precedence_ok;
  }
  EXPECT_TRUE(some_precedence_violation);
}

TEST(Ablation, PrecedenceOnlyOnPathFixture) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  const auto seen = sample_set(t, sample_precedence_only, 500);
  const auto oracle = filtered(t, false);
  // The fixture is a chain with one fork at the bottom: two linear extensions.
  EXPECT_EQ(oracle.size(), 2u);
  EXPECT_EQ(seen, oracle);
}

TEST(Ablation, PrecedenceOnlyInterleavesAcrossRoots) {
  const auto t = testing::ab_tree();
  const auto seen = sample_set(t, sample_precedence_only, 3000);
  EXPECT_EQ(seen, filtered(t, false));
  EXPECT_TRUE(seen.contains(Perm{0, 1, 3, 2}));  // B between A's children
  for (const auto& p : seen) EXPECT_TRUE(check_constraints(t, p).precedence_ok);
}

TEST(Ablation, FlatTreeCoversAllOrders) {
  const auto t = testing::flat_tree(3);
  EXPECT_EQ(sample_set(t, sample_level_only, 600).size(), 6u);
  EXPECT_EQ(sample_set(t, sample_precedence_only, 600).size(), 6u);
}

TEST(Uniformity, ChiSquareOnFourOrders) {
  const auto t = testing::ab_tree();
  std::map<Perm, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Rng rng = make_stream(2024, static_cast<std::uint64_t>(i));
    ++counts[sample_dfs_traversal(t, rng).order];
  }
  ASSERT_EQ(counts.size(), 4u);
  double chi2 = 0.0;
  const double expected = draws / 4.0;
  for (const auto& [p, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 0.001 quantile of chi-square with 3 degrees of freedom.
  EXPECT_LT(chi2, 16.266);
}

}  // namespace
}  // namespace pcwinter
