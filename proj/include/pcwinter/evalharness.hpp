#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pcwinter/aggregate.hpp"
#include "pcwinter/graph.hpp"
#include "pcwinter/utility.hpp"

namespace pcwinter {

struct CurvePoint {
  double fraction = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
};

struct ExperimentCurve {
  std::string method;
  std::vector<std::uint64_t> seeds;
  double step = 0.05;
  std::vector<CurvePoint> points;
};

enum class DropFilter { unlabeled, labeled, mixed };

DropFilter parse_drop_filter(std::string_view name);
std::string to_string(DropFilter filter);

// Model retrained at every step: full-view propagation, classifier on the
// labeled training nodes still present, accuracy on the test set.
struct EvalModel {
  std::vector<NodeId> labeled;
  EvalSet test;
  int depth = 2;
  TrainConfig train;
};

// Nodes of `filter` ordered by descending value; ties and uncovered nodes
// (ranked after all valued ones) go by ascending id.
std::vector<NodeId> drop_order(const InductiveView& train, std::span<const NodeId> labeled,
                               const NodeValueTable& values, DropFilter filter);
// Edges of the view by descending value, uncovered edges last, ties by id.
std::vector<Edge> add_order(const InductiveView& train, const EdgeValueTable& values);

// Removes ceil(step * n) nodes of the filtered set per step (the last step
// may be shorter) and records test accuracy after each; one classifier seed
// per repeat.
ExperimentCurve drop_nodes_experiment(const InductiveView& train, const NodeValueTable& values,
                                      DropFilter filter, const EvalModel& model, double step,
                                      std::span<const std::uint64_t> seeds);

// Starts from the edgeless view with every training node and adds edges in
// value order, ceil(step * m) per step.
ExperimentCurve add_edges_experiment(const InductiveView& train, const EdgeValueTable& values,
                                     const EvalModel& model, double step,
                                     std::span<const std::uint64_t> seeds);

// CSV: fraction,accuracy_mean,accuracy_std with 9 significant digits.
void curve_export(const ExperimentCurve& curve, const std::filesystem::path& file);
std::vector<CurvePoint> curve_load(const std::filesystem::path& file);

// Curve value at `fraction`, linearly interpolated between points.
double curve_at(const ExperimentCurve& curve, double fraction);

// Mean 1-based rank of the labeled and of the unlabeled nodes in a value
// ordering of all training nodes.
struct RankSummary {
  double labeled_mean_rank = 0.0;
  double unlabeled_mean_rank = 0.0;
};
RankSummary mean_ranks(const InductiveView& train, std::span<const NodeId> labeled,
                       const NodeValueTable& values);

}  // namespace pcwinter
