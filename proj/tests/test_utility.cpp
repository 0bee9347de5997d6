#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "pcwinter/errors.hpp"
#include "pcwinter/permute.hpp"
#include "pcwinter/utility.hpp"

namespace pcwinter {
namespace {

double scalar(const Eigen::RowVectorXd& r) { return r(0); }

TEST(PropagationState, PathFixtureInserts) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  PropagationState s(t, g.features());
  s.insert_player(0);
  EXPECT_EQ(scalar(s.representation(0)), 1.0);
  s.insert_player(1);
  EXPECT_EQ(scalar(s.representation(1)), 2.0);
  EXPECT_EQ(scalar(s.representation(0)), 2.0);
  s.insert_player(3);
  EXPECT_EQ(scalar(s.representation(1)), 3.0);
  EXPECT_EQ(scalar(s.representation(0)), 3.0);
  s.insert_player(2);
  EXPECT_EQ(scalar(s.representation(1)), 2.0);
  EXPECT_EQ(scalar(s.representation(0)), 2.0);
  EXPECT_EQ(s.child_count(1), 2u);
  EXPECT_EQ(s.active_roots(), (std::vector<PlayerIndex>{0}));
}

TEST(PropagationState, Errors) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  PropagationState s(t, g.features());
  EXPECT_THROW(s.insert_player(3), PrecedenceError);
  s.insert_player(0);
  EXPECT_THROW(s.insert_player(0), StateError);
  EXPECT_THROW(s.insert_player(9), LookupError);
}

TEST(PropagateFull, Examples) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  const std::vector<PlayerIndex> all{0, 1, 2, 3};
  EXPECT_EQ(propagate_full(t, g.features(), all).reps(0, 0), 2.0);
  const std::vector<PlayerIndex> root{0};
  EXPECT_EQ(propagate_full(t, g.features(), root).reps(0, 0), 1.0);
  const std::vector<PlayerIndex> none;
  EXPECT_EQ(propagate_full(t, g.features(), none).reps.rows(), 0);
  const std::vector<PlayerIndex> open{0, 3};
  EXPECT_THROW(propagate_full(t, g.features(), open), ValidationError);
}

TEST(PropagationState, IncrementalMatchesBatchOnRandomTrees) {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 25; ++trial) {
    const Graph g = testing::random_graph(gen, 14, 0.25, 3, 2);
    std::vector<NodeId> ids(14);
    std::iota(ids.begin(), ids.end(), 0u);
    const std::vector<NodeId> labeled{0, 3, 6, 9};
    const auto t = ContributionTree::build(InductiveView::induced(g, ids), labeled, 2);
    Rng rng = make_stream(trial, 0);
    const auto order = sample_dfs_traversal(t, rng).order;
    PropagationState s(t, g.features());
    std::vector<PlayerIndex> prefix;
    for (PlayerIndex p : order) {
      s.insert_player(p);
      prefix.push_back(p);
      if (prefix.size() % 5 != 0 && prefix.size() != order.size()) continue;
      const auto batch = propagate_full(t, g.features(), prefix);
      for (std::size_t k = 0; k < batch.roots.size(); ++k) {
        const Eigen::RowVectorXd inc = s.representation(batch.roots[k]);
        EXPECT_LT((inc - batch.reps.row(static_cast<Eigen::Index>(k))).cwiseAbs().maxCoeff(),
                  1e-12);
      }
    }
  }
}

// Textbook softmax regression: gradient descent on W (C x d) and b.
ClassifierParams primal_gd(const FeatureMatrix& x, std::span<const int> y, int classes,
                           const TrainConfig& cfg) {
  const auto n = x.rows();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(classes, x.cols());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(classes);
  for (int e = 0; e < cfg.epochs; ++e) {
    Eigen::MatrixXd p = x * w.transpose();
    p.rowwise() += b.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = p.row(i).maxCoeff();
      p.row(i) = (p.row(i).array() - m).exp();
      p.row(i) /= p.row(i).sum();
      p(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    }
    p /= static_cast<double>(n);
    const Eigen::MatrixXd gw = p.transpose() * x + cfg.weight_decay * w;
    const Eigen::VectorXd gb = p.colwise().sum().transpose();
    w -= cfg.learning_rate * gw;
    b -= cfg.learning_rate * gb;
  }
  return {w, b};
}

TEST(TrainClassifier, MatchesPrimalGradientDescent) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial, d = 2 + trial % 4, c = 2 + trial % 3;
    FeatureMatrix x(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) x(i, j) = u(gen);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i % c;
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 150;
    cfg.weight_decay = 0.01;
    const auto got = train_classifier(x, y, c, cfg);
    const auto want = primal_gd(x, y, c, cfg);
    EXPECT_LT((got.weights - want.weights).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((got.bias - want.bias).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TrainClassifier, SinglePairFitsItself) {
  FeatureMatrix x(1, 2);
  x << 0.3, 0.7;
  const std::vector<int> y{1};
  const auto p = train_classifier(x, y, 3, TrainConfig{});
  EXPECT_EQ(p.predict(x.row(0)), 1);
  EXPECT_EQ(accuracy(p, x, y), 1.0);
}

TEST(TrainClassifier, Errors) {
  FeatureMatrix x(1, 1);
  x << 1.0;
  const std::vector<int> y{0};
  TrainConfig bad;
  bad.epochs = 0;
  EXPECT_THROW(train_classifier(x, y, 2, bad), ConfigError);
  TrainConfig lr;
  lr.learning_rate = 0.0;
  EXPECT_THROW(train_classifier(x, y, 2, lr), ConfigError);
  EXPECT_THROW(train_classifier(FeatureMatrix(0, 1), {}, 2, TrainConfig{}), EmptyCoalitionError);
  const std::vector<int> out{2};
  EXPECT_THROW(train_classifier(x, out, 2, TrainConfig{}), ValidationError);
}

TEST(Argmax, TiesGoLow) {
  Eigen::RowVectorXd r(3);
  r << 1.0, 1.0, 0.0;
  EXPECT_EQ(argmax_lowest(r), 0);
  r << 0.0, 2.0, 2.0;
  EXPECT_EQ(argmax_lowest(r), 1);
  // A zero-feature input with untrained parameters predicts class 0.
  ClassifierParams p{Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3)};
  EXPECT_EQ(p.predict(Eigen::RowVectorXd::Zero(2)), 0);
}

TEST(PropagateView, Examples) {
  std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {1, 2}};
  FeatureMatrix x(4, 1);
  x << 1.0, 2.0, 4.0, 7.0;
  const Graph g = Graph::from_edges(4, e, x, {0, 1, kNoLabel, 0}, 2);
  const std::vector<NodeId> all{0, 1, 2, 3};
  const auto view = InductiveView::induced(g, all);
  const auto h1 = propagate_view(view, 1);
  EXPECT_DOUBLE_EQ(h1(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(h1(1, 0), 2.5);
  EXPECT_DOUBLE_EQ(h1(2, 0), 2.0);
  EXPECT_DOUBLE_EQ(h1(3, 0), 7.0);
  const auto h2 = propagate_view(view, 2);
  EXPECT_DOUBLE_EQ(h2(0, 0), 2.5);
  EXPECT_DOUBLE_EQ(h2(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(h2(2, 0), 2.5);

  const EvalSet ev = precompute_validation_representations(view, 2);
  EXPECT_EQ(ev.nodes, (std::vector<NodeId>{0, 1, 3}));
  EXPECT_EQ(ev.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_DOUBLE_EQ(ev.reps(2, 0), 7.0);
}

struct GameFixture {
  Graph g;
  std::vector<NodeId> train, val, labeled;
  ContributionTree tree;
  EvalSet eval;

  explicit GameFixture(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    g = testing::random_graph(gen, 30, 0.12, 4, 3);
    for (NodeId v = 0; v < 20; ++v) train.push_back(v);
    for (NodeId v = 20; v < 30; ++v) val.push_back(v);
    labeled = {0, 2, 5, 7, 11, 13};
    const auto tv = InductiveView::induced(g, train);
    tree = ContributionTree::build(tv, labeled, 2);
    eval = precompute_validation_representations(InductiveView::induced(g, val), 2);
  }
};

TEST(SgcTreeGame, FullCoalitionMatchesWholeViewUtility) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GameFixture f(seed);
    TrainConfig cfg;
    cfg.learning_rate = 0.2;
    const SgcTreeGame game(f.tree, f.g, f.eval, cfg);
    auto s = game.new_session();
    EXPECT_EQ(s->value(), 0.0);
    for (PlayerIndex p = 0; p < f.tree.num_players(); ++p) s->insert(p);
    const ViewUtility whole(f.labeled, f.eval, 2, cfg);
    EXPECT_DOUBLE_EQ(s->value(), whole(InductiveView::induced(f.g, f.train)));
  }
}

TEST(SgcTreeGame, InsertionOrderDoesNotChangeFinalValue) {
  GameFixture f(9);
  TrainConfig cfg;
  cfg.learning_rate = 0.3;
  const SgcTreeGame game(f.tree, f.g, f.eval, cfg);
  auto a = game.new_session();
  for (PlayerIndex p = 0; p < f.tree.num_players(); ++p) a->insert(p);
  auto b = game.new_session();
  for (PlayerIndex p = static_cast<PlayerIndex>(f.tree.num_players()); p-- > 0;) b->insert(p);
  EXPECT_NEAR(a->value(), b->value(), 1e-12);
  EXPECT_THROW(b->insert(0), StateError);
}

TEST(SgcTreeGame, ValuesAreValidationFractions) {
  GameFixture f(3);
  const SgcTreeGame game(f.tree, f.g, f.eval, TrainConfig{});
  const double m = static_cast<double>(f.eval.labels.size());
  Rng rng = make_stream(1, 1);
  const auto order = sample_dfs_traversal(f.tree, rng).order;
  auto s = game.new_session();
  auto s2 = game.new_session();
  for (PlayerIndex p : order) {
    s->insert(p);
    s2->insert(p);
    const double u = s->value();
    EXPECT_GE(u, 0.0);
    EXPECT_LE(u, 1.0);
    EXPECT_NEAR(u * m, std::round(u * m), 1e-9);
    EXPECT_EQ(u, s2->value());
  }
}

TEST(SgcTreeGame, RejectsUnlabeledRoot) {
  const Graph g = testing::p3_graph();
  const std::vector<PlayerIndex> parents{kNoParent};
  const std::vector<NodeId> nodes{1};
  const auto t = ContributionTree::from_parents(parents, nodes);
  EXPECT_THROW(SgcTreeGame(t, g, EvalSet{}, TrainConfig{}), ValidationError);
}

}  // namespace
}  // namespace pcwinter
