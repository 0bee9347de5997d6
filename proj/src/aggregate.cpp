#include "pcwinter/aggregate.hpp"

#include <string>

#include "pcwinter/errors.hpp"
#include "pcwinter/textio.hpp"

namespace pcwinter {

namespace {

void check_sizes(const ContributionTree& tree, std::span<const double> values) {
  if (values.size() != tree.num_players()) {
    throw ValidationError("expected " + std::to_string(tree.num_players()) + " player values, got " +
                          std::to_string(values.size()));
  }
}

}  // namespace

NodeValueTable node_values(const ContributionTree& tree, std::span<const double> values) {
  check_sizes(tree, values);
  NodeValueTable out;
  for (PlayerIndex p = 0; p < tree.num_players(); ++p) out[player_node(tree, p)] += values[p];
  return out;
}

EdgeValueTable edge_values(const ContributionTree& tree, std::span<const double> values) {
  check_sizes(tree, values);
  EdgeValueTable out;
  for (PlayerIndex p = 0; p < tree.num_players(); ++p) {
    if (auto e = player_edge(tree, p)) out[*e] += values[p];
  }
  return out;
}

NodeValueTable node_values(std::span<const PathValue> players) {
  NodeValueTable out;
  for (const auto& pv : players) {
    if (pv.path.empty()) throw ValidationError("empty player path");
    out[pv.path.back()] += pv.value;
  }
  return out;
}

EdgeValueTable edge_values(std::span<const PathValue> players) {
  EdgeValueTable out;
  for (const auto& pv : players) {
    if (pv.path.empty()) throw ValidationError("empty player path");
    const auto n = pv.path.size();
    if (n < 2) continue;
    out[Edge::make(pv.path[n - 1], pv.path[n - 2])] += pv.value;
  }
  return out;
}

void write_node_values_csv(const NodeValueTable& table, const std::filesystem::path& file) {
  AtomicFile out(file);
  out.stream() << "node_id,value\n";
  for (const auto& [node, value] : table) out.stream() << node << ',' << format_double(value) << '\n';
  out.commit();
}

void write_edge_values_csv(const EdgeValueTable& table, const std::filesystem::path& file) {
  AtomicFile out(file);
  out.stream() << "u,v,value\n";
  for (const auto& [e, value] : table) {
    out.stream() << e.u << ',' << e.v << ',' << format_double(value) << '\n';
  }
  out.commit();
}

NodeValueTable read_node_values_csv(const std::filesystem::path& file) {
  LineReader in(file);
  NodeValueTable out;
  std::string_view line;
  bool header = true;
  while (in.next(line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "node_id,value") continue;
    }
    const auto f = split_fields(line, ',');
    if (f.size() != 2) throw ParseError(in.file(), in.line_number(), "expected node_id,value");
    out[static_cast<NodeId>(parse_uint(f[0], in))] = parse_double(f[1], in);
  }
  return out;
}

EdgeValueTable read_edge_values_csv(const std::filesystem::path& file) {
  LineReader in(file);
  EdgeValueTable out;
  std::string_view line;
  bool header = true;
  while (in.next(line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "u,v,value") continue;
    }
    const auto f = split_fields(line, ',');
    if (f.size() != 3) throw ParseError(in.file(), in.line_number(), "expected u,v,value");
    const auto u = static_cast<NodeId>(parse_uint(f[0], in));
    const auto v = static_cast<NodeId>(parse_uint(f[1], in));
    if (u == v) throw ParseError(in.file(), in.line_number(), "self-loop edge");
    out[Edge::make(u, v)] = parse_double(f[2], in);
  }
  return out;
}

}  // namespace pcwinter
