#include "pcwinter/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pcwinter/errors.hpp"
#include "pcwinter/hash.hpp"
#include "pcwinter/textio.hpp"

namespace pcwinter {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges,
                        FeatureMatrix features, std::vector<int> labels, int num_classes,
                        EdgeCleanup* cleanup) {
  if (static_cast<std::size_t>(features.rows()) != num_nodes) {
    throw ValidationError("feature matrix has " + std::to_string(features.rows()) +
                          " rows, expected " + std::to_string(num_nodes));
  }
  if (labels.empty()) labels.assign(num_nodes, kNoLabel);
  if (labels.size() != num_nodes) {
    throw ValidationError("label vector size does not match node count");
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const int y = labels[i];
    if (y == kNoLabel) continue;
    if (y < 0 || y >= num_classes) {
      throw ValidationError("label " + std::to_string(y) + " of node " + std::to_string(i) +
                            " outside [0, " + std::to_string(num_classes) + ")");
    }
  }

  EdgeCleanup local;
  std::vector<Edge> undirected;
  undirected.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a >= num_nodes || b >= num_nodes) {
      throw ValidationError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") references a node id >= " + std::to_string(num_nodes));
    }
    if (a == b) {
      ++local.self_loops;
      continue;
    }
    undirected.push_back(Edge::make(a, b));
  }
  std::sort(undirected.begin(), undirected.end());
  const auto last = std::unique(undirected.begin(), undirected.end());
  local.duplicates = static_cast<std::size_t>(undirected.end() - last);
  undirected.erase(last, undirected.end());

  Graph g;
  g.offsets_.assign(num_nodes + 1, 0);
  for (const Edge& e : undirected) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(undirected.size() * 2);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : undirected) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  g.num_classes_ = num_classes;
  if (cleanup) *cleanup = local;
  return g;
}

std::span<const NodeId> Graph::neighbors(NodeId node) const {
  if (node >= num_nodes()) throw LookupError("node id " + std::to_string(node) + " out of range");
  return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  const auto nbrs = neighbors(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

void Graph::normalize_rows() {
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    const double sum = features_.row(i).cwiseAbs().sum();
    if (sum > 0.0) features_.row(i) /= sum;
  }
}

std::uint64_t Graph::fingerprint() const {
  Fnv1a h;
  h.update_value(num_nodes());
  h.update_span(std::span<const std::size_t>(offsets_));
  h.update_span(std::span<const NodeId>(adjacency_));
  h.update_value(features_.rows());
  h.update_value(features_.cols());
  h.update(features_.data(), static_cast<std::size_t>(features_.size()) * sizeof(double));
  h.update_span(std::span<const int>(labels_));
  h.update_value(num_classes_);
  return h.digest();
}

// ---------------------------------------------------------------------------

namespace {

void sort_unique(std::vector<NodeId>& ids, const char* name) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError(std::string("split list '") + name + "' contains duplicate ids");
  }
}

bool intersects(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

}  // namespace

void SplitSpec::validate(const Graph& g) {
  sort_unique(train, "train");
  sort_unique(val, "val");
  sort_unique(test, "test");
  sort_unique(labeled_train, "labeled_train");
  for (const auto* list : {&train, &val, &test, &labeled_train}) {
    if (!list->empty() && list->back() >= g.num_nodes()) {
      throw ValidationError("split references node id " + std::to_string(list->back()) +
                            " >= " + std::to_string(g.num_nodes()));
    }
  }
  if (intersects(train, val) || intersects(train, test) || intersects(val, test)) {
    throw ValidationError("train/val/test id sets overlap");
  }
  if (!std::includes(train.begin(), train.end(), labeled_train.begin(), labeled_train.end())) {
    throw ValidationError("labeled_train is not a subset of train");
  }
  for (NodeId v : labeled_train) {
    if (!g.is_labeled(v)) {
      throw ValidationError("labeled training node " + std::to_string(v) + " has no label");
    }
  }
}

std::uint64_t SplitSpec::fingerprint() const {
  Fnv1a h;
  for (const auto* list : {&train, &val, &test, &labeled_train}) {
    h.update_value(list->size());
    h.update_span(std::span<const NodeId>(*list));
  }
  return h.digest();
}

// ---------------------------------------------------------------------------

InductiveView::InductiveView(const Graph& g, std::span<const NodeId> ids)
    : parent_(&g), kept_(ids.begin(), ids.end()), local_(g.num_nodes(), -1) {
  std::sort(kept_.begin(), kept_.end());
  kept_.erase(std::unique(kept_.begin(), kept_.end()), kept_.end());
  for (std::size_t i = 0; i < kept_.size(); ++i) {
    if (kept_[i] >= g.num_nodes()) {
      throw ValidationError("view references node id " + std::to_string(kept_[i]) +
                            " >= " + std::to_string(g.num_nodes()));
    }
    local_[kept_[i]] = static_cast<std::int32_t>(i);
  }
}

void InductiveView::build_adjacency(
    std::vector<std::pair<std::uint32_t, std::uint32_t>> local_edges) {
  offsets_.assign(kept_.size() + 1, 0);
  for (const auto& [a, b] : local_edges) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(local_edges.size() * 2);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : local_edges) {
    adjacency_[cursor[a]++] = b;
    adjacency_[cursor[b]++] = a;
  }
  for (std::size_t i = 0; i < kept_.size(); ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

InductiveView InductiveView::induced(const Graph& g, std::span<const NodeId> ids) {
  InductiveView view(g, ids);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> local_edges;
  for (std::size_t i = 0; i < view.kept_.size(); ++i) {
    const NodeId u = view.kept_[i];
    for (NodeId v : g.neighbors(u)) {
      if (u < v && view.local_[v] >= 0) {
        local_edges.emplace_back(static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(view.local_[v]));
      }
    }
  }
  view.build_adjacency(std::move(local_edges));
  return view;
}

InductiveView InductiveView::with_edges(const Graph& g, std::span<const NodeId> ids,
                                        std::span<const Edge> edges) {
  InductiveView view(g, ids);
  std::vector<Edge> unique(edges.begin(), edges.end());
  for (Edge& e : unique) e = Edge::make(e.u, e.v);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> local_edges;
  local_edges.reserve(unique.size());
  for (const Edge& e : unique) {
    if (!view.contains(e.u) || !view.contains(e.v)) {
      throw ValidationError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has an endpoint outside the view");
    }
    if (!g.has_edge(e.u, e.v)) {
      throw ValidationError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") does not exist in the parent graph");
    }
    local_edges.emplace_back(static_cast<std::uint32_t>(view.local_[e.u]),
                             static_cast<std::uint32_t>(view.local_[e.v]));
  }
  view.build_adjacency(std::move(local_edges));
  return view;
}

std::size_t InductiveView::local_index(NodeId node) const {
  if (!contains(node)) {
    throw LookupError("node " + std::to_string(node) + " is not part of the view");
  }
  return static_cast<std::size_t>(local_[node]);
}

std::vector<NodeId> InductiveView::neighbors(NodeId node) const {
  std::vector<NodeId> out;
  for (std::uint32_t j : local_neighbors(local_index(node))) out.push_back(kept_[j]);
  return out;
}

std::size_t InductiveView::degree(NodeId node) const {
  return local_neighbors(local_index(node)).size();
}

std::vector<Edge> InductiveView::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t i = 0; i < kept_.size(); ++i) {
    for (std::uint32_t j : local_neighbors(i)) {
      if (i < j) out.push_back({kept_[i], kept_[j]});
    }
  }
  return out;
}

std::size_t degree(const InductiveView& view, NodeId node) { return view.degree(node); }

SplitViews inductive_split(const Graph& g, const SplitSpec& split) {
  SplitSpec checked = split;
  checked.validate(g);
  return {InductiveView::induced(g, checked.train), InductiveView::induced(g, checked.val),
          InductiveView::induced(g, checked.test)};
}

// ---------------------------------------------------------------------------

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  DatasetPaths p;
  p.edges = dir / "edges.tsv";
  p.features = dir / "features.csv";
  p.labels = dir / "labels.csv";
  p.split = dir / "split.json";
  return p;
}

std::uint64_t Dataset::fingerprint() const {
  Fnv1a h;
  h.update_value(graph.fingerprint());
  h.update_value(split.fingerprint());
  return h.digest();
}

namespace {

FeatureMatrix read_features(const std::filesystem::path& path) {
  LineReader reader(path);
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string_view line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    std::size_t count = 0;
    for (std::string_view field : split_fields(line, ',')) {
      values.push_back(parse_double(field, reader));
      ++count;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError(path.string(), reader.line_number(),
                       "expected " + std::to_string(cols) + " features, found " +
                           std::to_string(count));
    }
    ++rows;
  }
  FeatureMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

std::vector<NodeId> json_ids(const nlohmann::json& doc, const char* key,
                             const std::filesystem::path& path) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw ParseError(path.string(), 1, std::string("missing array '") + key + "'");
  }
  std::vector<NodeId> ids;
  for (const auto& v : doc[key]) {
    if (!v.is_number_unsigned()) {
      throw ParseError(path.string(), 1, std::string("non-integer id in '") + key + "'");
    }
    ids.push_back(v.get<NodeId>());
  }
  return ids;
}

}  // namespace

Dataset load_dataset(const DatasetPaths& paths) {
  Dataset ds;
  FeatureMatrix features = read_features(paths.features);
  const std::size_t n = static_cast<std::size_t>(features.rows());

  std::vector<std::pair<NodeId, NodeId>> edges;
  {
    LineReader reader(paths.edges);
    std::string_view line;
    while (reader.next(line)) {
      if (line.empty()) continue;
      const auto fields = split_fields(line, '\t');
      if (fields.size() != 2) {
        throw ParseError(paths.edges.string(), reader.line_number(),
                         "expected two tab-separated node ids");
      }
      const auto a = parse_uint(fields[0], reader);
      const auto b = parse_uint(fields[1], reader);
      if (a >= n || b >= n) {
        throw ValidationError(paths.edges.string() + ":" + std::to_string(reader.line_number()) +
                              ": node id >= " + std::to_string(n));
      }
      edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
      ++ds.stats.edge_lines;
    }
  }

  std::vector<int> labels(n, kNoLabel);
  int max_label = -1;
  {
    LineReader reader(paths.labels);
    std::string_view line;
    while (reader.next(line)) {
      if (line.empty()) continue;
      const auto fields = split_fields(line, ',');
      if (fields.size() != 2) {
        throw ParseError(paths.labels.string(), reader.line_number(),
                         "expected 'node_id,class_index'");
      }
      const auto node = parse_uint(fields[0], reader);
      const auto cls = parse_int(fields[1], reader);
      if (node >= n) {
        throw ValidationError(paths.labels.string() + ":" + std::to_string(reader.line_number()) +
                              ": node id >= " + std::to_string(n));
      }
      if (cls < 0 || (paths.num_classes && cls >= *paths.num_classes)) {
        throw ValidationError(paths.labels.string() + ":" + std::to_string(reader.line_number()) +
                              ": class index " + std::to_string(cls) + " out of range");
      }
      labels[node] = static_cast<int>(cls);
      max_label = std::max(max_label, static_cast<int>(cls));
    }
  }
  const int num_classes = paths.num_classes.value_or(max_label + 1);

  ds.graph = Graph::from_edges(n, edges, std::move(features), std::move(labels), num_classes,
                               &ds.stats.cleanup);
  if (paths.normalize_features) ds.graph.normalize_rows();

  std::ifstream in(paths.split);
  if (!in) throw ParseError(paths.split.string(), 0, "cannot open file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(paths.split.string(), 1, e.what());
  }
  ds.split.train = json_ids(doc, "train", paths.split);
  ds.split.val = json_ids(doc, "val", paths.split);
  ds.split.test = json_ids(doc, "test", paths.split);
  ds.split.labeled_train = json_ids(doc, "labeled_train", paths.split);
  ds.split.validate(ds.graph);
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Graph& g = dataset.graph;
  {
    AtomicFile out(dir / "edges.tsv");
    for (const Edge& e : g.edges()) out.stream() << e.u << '\t' << e.v << '\n';
    out.commit();
  }
  {
    AtomicFile out(dir / "features.csv");
    const auto& x = g.features();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (j) out.stream() << ',';
        out.stream() << format_double(x(i, j));
      }
      out.stream() << '\n';
    }
    out.commit();
  }
  {
    AtomicFile out(dir / "labels.csv");
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (g.is_labeled(v)) out.stream() << v << ',' << g.label(v) << '\n';
    }
    out.commit();
  }
  {
    nlohmann::json doc;
    doc["train"] = dataset.split.train;
    doc["val"] = dataset.split.val;
    doc["test"] = dataset.split.test;
    doc["labeled_train"] = dataset.split.labeled_train;
    AtomicFile out(dir / "split.json");
    out.stream() << doc.dump() << '\n';
    out.commit();
  }
}

}  // namespace pcwinter
