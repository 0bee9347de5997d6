#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pcwinter/contribution_tree.hpp"
#include "pcwinter/graph.hpp"

namespace pcwinter {

using NodeValueTable = std::map<NodeId, double>;
using EdgeValueTable = std::map<Edge, double>;

// Sum of player values per graph node. Nodes without a player get no entry.
NodeValueTable node_values(const ContributionTree& tree, std::span<const double> values);
// Sum of player values per parent edge; roots contribute to no edge.
EdgeValueTable edge_values(const ContributionTree& tree, std::span<const double> values);

// Same sums from player paths, e.g. rows read back from values.csv.
struct PathValue {
  std::vector<NodeId> path;
  double value = 0.0;
};
NodeValueTable node_values(std::span<const PathValue> players);
EdgeValueTable edge_values(std::span<const PathValue> players);

// node_values.csv: node_id,value
void write_node_values_csv(const NodeValueTable& table, const std::filesystem::path& file);
// edge_values.csv: u,v,value with u < v
void write_edge_values_csv(const EdgeValueTable& table, const std::filesystem::path& file);
NodeValueTable read_node_values_csv(const std::filesystem::path& file);
EdgeValueTable read_edge_values_csv(const std::filesystem::path& file);

}  // namespace pcwinter
