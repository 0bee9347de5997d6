#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"
#include "pcwinter/aggregate.hpp"
#include "pcwinter/errors.hpp"
#include "pcwinter/textio.hpp"

namespace pcwinter {
namespace {

const std::vector<double> kPsi{0.1, 0.2, 0.05, 0.15};

TEST(NodeValues, PathFixture) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  const auto nv = node_values(t, kPsi);
  ASSERT_EQ(nv.size(), 3u);
  EXPECT_NEAR(nv.at(0), 0.15, 1e-15);
  EXPECT_NEAR(nv.at(1), 0.2, 1e-15);
  EXPECT_NEAR(nv.at(2), 0.15, 1e-15);
}

TEST(NodeValues, SingleAndZero) {
  const auto t = testing::flat_tree(1);
  const std::vector<double> one{0.7};
  EXPECT_EQ(node_values(t, one), (NodeValueTable{{0, 0.7}}));
  const Graph g = testing::p3_graph();
  const std::vector<double> zero(4, 0.0);
  for (const auto& [v, x] : node_values(testing::p3_tree(g), zero)) EXPECT_EQ(x, 0.0);
  const std::vector<double> short_values{1.0};
  EXPECT_THROW(node_values(testing::p3_tree(g), short_values), ValidationError);
}

TEST(EdgeValues, PathFixture) {
  const Graph g = testing::p3_graph();
  const auto t = testing::p3_tree(g);
  const auto ev = edge_values(t, kPsi);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev.at(Edge{0, 1}), 0.25, 1e-15);
  EXPECT_NEAR(ev.at(Edge{1, 2}), 0.15, 1e-15);
  double total = 0;
  for (const auto& [e, x] : ev) total += x;
  EXPECT_NEAR(total, 0.4, 1e-15);
  const std::vector<double> one{0.7};
  EXPECT_TRUE(edge_values(testing::flat_tree(1), one).empty());
}

TEST(Aggregate, ConservationOnRandomTrees) {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> noise;
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(gen, 15, 0.2, 1, 2);
    std::vector<NodeId> ids(15);
    std::iota(ids.begin(), ids.end(), 0u);
    const std::vector<NodeId> labeled{1, 4, 8};
    const auto t = ContributionTree::build(InductiveView::induced(g, ids), labeled, 2);
    std::vector<double> psi(t.num_players());
    for (double& x : psi) x = noise(gen);
    const double all = std::accumulate(psi.begin(), psi.end(), 0.0);
    double roots = 0;
    for (PlayerIndex r : t.roots()) roots += psi[r];

    double nsum = 0, esum = 0;
    for (const auto& [v, x] : node_values(t, psi)) nsum += x;
    for (const auto& [e, x] : edge_values(t, psi)) {
      EXPECT_TRUE(g.has_edge(e.u, e.v));
      esum += x;
    }
    EXPECT_NEAR(nsum, all, 1e-9);
    EXPECT_NEAR(esum, all - roots, 1e-9);

    // The path form gives the same tables.
    std::vector<PathValue> rows;
    for (PlayerIndex p = 0; p < t.num_players(); ++p) rows.push_back({t.path(p), psi[p]});
    std::reverse(rows.begin(), rows.end());
    const auto nv = node_values(rows);
    const auto ref = node_values(t, psi);
    ASSERT_EQ(nv.size(), ref.size());
    for (const auto& [v, x] : ref) EXPECT_NEAR(nv.at(v), x, 1e-12);
    const auto ev = edge_values(rows);
    EXPECT_EQ(ev.size(), edge_values(t, psi).size());
  }
}

TEST(AggregateCsv, RoundTrip) {
  const auto dir = testing::scratch_dir("aggregate");
  const NodeValueTable nv{{0, 0.15}, {7, -1.0 / 3.0}};
  const EdgeValueTable ev{{Edge{0, 1}, 0.25}, {Edge{2, 9}, 1e-17}};
  write_node_values_csv(nv, dir / "n.csv");
  write_edge_values_csv(ev, dir / "e.csv");
  EXPECT_EQ(read_node_values_csv(dir / "n.csv"), nv);
  EXPECT_EQ(read_edge_values_csv(dir / "e.csv"), ev);
  EXPECT_EQ(read_file(dir / "n.csv").substr(0, 14), "node_id,value\n");
  EXPECT_EQ(read_file(dir / "e.csv").substr(0, 10), "u,v,value\n");
  testing::write_text(dir / "headerless.csv", "3,0.5\n");
  EXPECT_EQ(read_node_values_csv(dir / "headerless.csv"), (NodeValueTable{{3, 0.5}}));
  testing::write_text(dir / "bad.csv", "u,v,value\n1,x,0.5\n");
  EXPECT_THROW(read_edge_values_csv(dir / "bad.csv"), ParseError);
}

}  // namespace
}  // namespace pcwinter
