#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pcwinter/contribution_tree.hpp"
#include "pcwinter/game.hpp"
#include "pcwinter/graph.hpp"

namespace pcwinter {

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 200;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
};

// Multinomial logistic regression on propagated representations.
struct ClassifierParams {
  Eigen::MatrixXd weights;  // C x d
  Eigen::VectorXd bias;     // C

  // Argmax class; ties go to the lowest class index.
  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

// Full-batch gradient descent from zero parameters on the mean cross-entropy
// with an L2 penalty on the weights. Throws EmptyCoalitionError for zero rows.
ClassifierParams train_classifier(const FeatureMatrix& reps, std::span<const int> labels,
                                  int num_classes, const TrainConfig& cfg);

// Fraction of rows whose predicted class equals the label.
double accuracy(const ClassifierParams& params, const FeatureMatrix& reps,
                std::span<const int> labels);

// Index of the largest entry; ties go to the lowest index.
Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row);

// K rounds of neighbor-mean propagation over a view; a node without
// neighbors keeps its own features. Rows follow the view's local order.
FeatureMatrix propagate_view(const InductiveView& view, int depth);

// Propagated representations and labels of the labeled nodes of a view.
struct EvalSet {
  FeatureMatrix reps;
  std::vector<int> labels;
  std::vector<NodeId> nodes;
};

EvalSet precompute_validation_representations(const InductiveView& view, int depth);

// ---------------------------------------------------------------------------

// Incremental bottom-up mean aggregation over the included part of a
// contribution tree. A player without included children represents itself
// by its raw feature row.
class PropagationState {
 public:
  PropagationState(const ContributionTree& tree, const FeatureMatrix& features);

  // Throws PrecedenceError if the parent is missing and StateError on a
  // repeated insert. Cost O(depth * d).
  void insert_player(PlayerIndex p);

  bool included(PlayerIndex p) const { return included_[p]; }
  std::size_t child_count(PlayerIndex p) const { return child_count_[p]; }
  Eigen::RowVectorXd representation(PlayerIndex p) const;

  // Included labeled roots in activation order.
  const std::vector<PlayerIndex>& active_roots() const { return active_roots_; }
  // Roots whose representation changed since the last clear_dirty().
  const std::vector<PlayerIndex>& dirty_roots() const { return dirty_roots_; }
  void clear_dirty();

  const ContributionTree& tree() const { return *tree_; }

 private:
  const ContributionTree* tree_;
  const FeatureMatrix* features_;
  std::vector<bool> included_;
  std::vector<std::uint32_t> child_count_;
  // Aggregates exist only for players that have children in the tree.
  std::vector<std::int32_t> slot_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> child_sum_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> h_;
  std::vector<PlayerIndex> active_roots_;
  std::vector<PlayerIndex> dirty_roots_;
  std::vector<bool> is_dirty_;
};

struct RootRepresentations {
  std::vector<PlayerIndex> roots;  // ascending
  FeatureMatrix reps;
};

// Batch computation for an ancestor-closed player set; throws
// ValidationError otherwise.
RootRepresentations propagate_full(const ContributionTree& tree, const FeatureMatrix& features,
                                   std::span<const PlayerIndex> included);

// ---------------------------------------------------------------------------

// The valuation game: U(S) is the validation accuracy of a classifier trained
// on the labeled roots of the partial computation-tree forest S. U is 0 when
// S holds no labeled root.
class SgcTreeGame final : public TreeGame {
 public:
  SgcTreeGame(const ContributionTree& tree, const Graph& graph, EvalSet validation,
              TrainConfig cfg);

  std::size_t num_players() const override { return tree_->num_players(); }
  std::unique_ptr<CoalitionSession> new_session() const override;

  const ContributionTree& tree() const { return *tree_; }
  const Graph& graph() const { return *graph_; }
  const EvalSet& validation() const { return validation_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  const ContributionTree* tree_;
  const Graph* graph_;
  EvalSet validation_;
  TrainConfig cfg_;
};

// Utility of a whole (modified) training view: full-view propagation,
// classifier on the view's labeled training nodes, accuracy on `eval`.
class ViewUtility {
 public:
  ViewUtility(std::span<const NodeId> labeled_train, EvalSet eval, int depth, TrainConfig cfg);

  double operator()(const InductiveView& view) const;

  const EvalSet& eval() const { return eval_; }
  int depth() const { return depth_; }
  const TrainConfig& config() const { return cfg_; }
  const std::vector<NodeId>& labeled() const { return labeled_; }

 private:
  std::vector<NodeId> labeled_;
  EvalSet eval_;
  int depth_;
  TrainConfig cfg_;
};

}  // namespace pcwinter
