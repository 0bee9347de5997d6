#include "pcwinter/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pcwinter/errors.hpp"
#include "pcwinter/textio.hpp"

namespace pcwinter {

DropFilter parse_drop_filter(std::string_view name) {
  if (name == "unlabeled") return DropFilter::unlabeled;
  if (name == "labeled") return DropFilter::labeled;
  if (name == "mixed" || name == "all") return DropFilter::mixed;
  throw ConfigError("unknown drop filter '" + std::string(name) +
                    "' (expected unlabeled, labeled or mixed)");
}

std::string to_string(DropFilter filter) {
  switch (filter) {
    case DropFilter::unlabeled: return "unlabeled";
    case DropFilter::labeled: return "labeled";
    case DropFilter::mixed: return "mixed";
  }
  return "unknown";
}

namespace {

template <typename Key, typename Table>
void sort_by_value(std::vector<Key>& items, const Table& values) {
  std::stable_sort(items.begin(), items.end(), [&](const Key& a, const Key& b) {
    const auto ia = values.find(a);
    const auto ib = values.find(b);
    const bool ka = ia != values.end();
    const bool kb = ib != values.end();
    if (ka != kb) return ka;
    if (ka && ia->second != ib->second) return ia->second > ib->second;
    return a < b;
  });
}

std::size_t step_size(double step, std::size_t n) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("step must lie in (0, 1]");
  const double k = std::ceil(step * static_cast<double>(n) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(k, 0.0)));
}

CurvePoint summarize(double fraction, const std::vector<double>& acc) {
  CurvePoint p;
  p.fraction = fraction;
  double sum = 0.0;
  for (double a : acc) sum += a;
  p.accuracy_mean = sum / static_cast<double>(acc.size());
  double var = 0.0;
  for (double a : acc) var += (a - p.accuracy_mean) * (a - p.accuracy_mean);
  p.accuracy_std = std::sqrt(var / static_cast<double>(acc.size()));
  return p;
}

std::vector<ViewUtility> models_for(const EvalModel& model, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("at least one repeat seed is required");
  std::vector<ViewUtility> out;
  out.reserve(seeds.size());
  for (std::uint64_t s : seeds) {
    TrainConfig cfg = model.train;
    cfg.seed = s;
    out.emplace_back(model.labeled, model.test, model.depth, cfg);
  }
  return out;
}

std::vector<double> evaluate(const std::vector<ViewUtility>& models, const InductiveView& view) {
  std::vector<double> acc;
  acc.reserve(models.size());
  for (const auto& m : models) acc.push_back(m(view));
  return acc;
}

}  // namespace

std::vector<NodeId> drop_order(const InductiveView& train, std::span<const NodeId> labeled,
                               const NodeValueTable& values, DropFilter filter) {
  const std::unordered_set<NodeId> is_labeled(labeled.begin(), labeled.end());
  std::vector<NodeId> nodes;
  for (NodeId v : train.kept_ids()) {
    const bool lab = is_labeled.contains(v);
    if ((filter == DropFilter::labeled && !lab) || (filter == DropFilter::unlabeled && lab)) continue;
    nodes.push_back(v);
  }
  sort_by_value(nodes, values);
  return nodes;
}

std::vector<Edge> add_order(const InductiveView& train, const EdgeValueTable& values) {
  std::vector<Edge> edges = train.edges();
  sort_by_value(edges, values);
  return edges;
}

ExperimentCurve drop_nodes_experiment(const InductiveView& train, const NodeValueTable& values,
                                      DropFilter filter, const EvalModel& model, double step,
                                      std::span<const std::uint64_t> seeds) {
  const std::vector<NodeId> order = drop_order(train, model.labeled, values, filter);
  const std::size_t n = order.size();
  const std::size_t batch = step_size(step, std::max<std::size_t>(n, 1));
  const auto models = models_for(model, seeds);
  const std::vector<Edge> all_edges = train.edges();

  ExperimentCurve curve;
  curve.seeds.assign(seeds.begin(), seeds.end());
  curve.step = step;
  curve.points.push_back(summarize(0.0, evaluate(models, train)));

  std::unordered_set<NodeId> removed;
  for (std::size_t done = 0; done < n;) {
    const std::size_t next = std::min(n, done + batch);
    for (std::size_t i = done; i < next; ++i) removed.insert(order[i]);
    done = next;

    std::vector<NodeId> keep;
    keep.reserve(train.size());
    for (NodeId v : train.kept_ids()) {
      if (!removed.contains(v)) keep.push_back(v);
    }
    std::vector<Edge> edges;
    for (const Edge& e : all_edges) {
      if (!removed.contains(e.u) && !removed.contains(e.v)) edges.push_back(e);
    }
    const auto view = InductiveView::with_edges(train.parent(), keep, edges);
    curve.points.push_back(
        summarize(static_cast<double>(done) / static_cast<double>(n), evaluate(models, view)));
  }
  return curve;
}

ExperimentCurve add_edges_experiment(const InductiveView& train, const EdgeValueTable& values,
                                     const EvalModel& model, double step,
                                     std::span<const std::uint64_t> seeds) {
  const std::vector<Edge> order = add_order(train, values);
  const std::size_t m = order.size();
  const std::size_t batch = step_size(step, std::max<std::size_t>(m, 1));
  const auto models = models_for(model, seeds);

  ExperimentCurve curve;
  curve.seeds.assign(seeds.begin(), seeds.end());
  curve.step = step;
  std::vector<Edge> edges;
  curve.points.push_back(summarize(
      0.0, evaluate(models, InductiveView::with_edges(train.parent(), train.kept_ids(), edges))));
  for (std::size_t done = 0; done < m;) {
    const std::size_t next = std::min(m, done + batch);
    edges.insert(edges.end(), order.begin() + static_cast<std::ptrdiff_t>(done),
                 order.begin() + static_cast<std::ptrdiff_t>(next));
    done = next;
    const auto view = InductiveView::with_edges(train.parent(), train.kept_ids(), edges);
    curve.points.push_back(
        summarize(static_cast<double>(done) / static_cast<double>(m), evaluate(models, view)));
  }
  return curve;
}

void curve_export(const ExperimentCurve& curve, const std::filesystem::path& file) {
  AtomicFile out(file);
  out.stream() << "fraction,accuracy_mean,accuracy_std\n";
  for (const auto& p : curve.points) {
    out.stream() << format_double(p.fraction, 9) << ',' << format_double(p.accuracy_mean, 9) << ','
                 << format_double(p.accuracy_std, 9) << '\n';
  }
  out.commit();
}

std::vector<CurvePoint> curve_load(const std::filesystem::path& file) {
  LineReader in(file);
  std::vector<CurvePoint> points;
  std::string_view line;
  bool header = true;
  while (in.next(line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "fraction,accuracy_mean,accuracy_std") continue;
    }
    const auto f = split_fields(line, ',');
    if (f.size() != 3) {
      throw ParseError(in.file(), in.line_number(), "expected fraction,accuracy_mean,accuracy_std");
    }
    points.push_back({parse_double(f[0], in), parse_double(f[1], in), parse_double(f[2], in)});
  }
  return points;
}

double curve_at(const ExperimentCurve& curve, double fraction) {
  const auto& pts = curve.points;
  if (pts.empty()) throw ValidationError("empty curve");
  if (fraction <= pts.front().fraction) return pts.front().accuracy_mean;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (fraction <= pts[i].fraction) {
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      const double t = (fraction - a.fraction) / (b.fraction - a.fraction);
      return a.accuracy_mean + t * (b.accuracy_mean - a.accuracy_mean);
    }
  }
  return pts.back().accuracy_mean;
}

RankSummary mean_ranks(const InductiveView& train, std::span<const NodeId> labeled,
                       const NodeValueTable& values) {
  const std::unordered_set<NodeId> is_labeled(labeled.begin(), labeled.end());
  const auto order = drop_order(train, labeled, values, DropFilter::mixed);
  double lab = 0.0, unlab = 0.0;
  std::size_t nl = 0, nu = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (is_labeled.contains(order[i])) {
      lab += static_cast<double>(i + 1);
      ++nl;
    } else {
      unlab += static_cast<double>(i + 1);
      ++nu;
    }
  }
  return {nl ? lab / static_cast<double>(nl) : 0.0, nu ? unlab / static_cast<double>(nu) : 0.0};
}

}  // namespace pcwinter
