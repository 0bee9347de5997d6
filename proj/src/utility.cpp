#include "pcwinter/utility.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "pcwinter/errors.hpp"

namespace pcwinter {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("weight decay must be nonnegative");
  }
}

Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < row.size(); ++c) {
    if (row(c) > row(best)) best = c;
  }
  return best;
}

int ClassifierParams::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  const Eigen::RowVectorXd logits = (weights * x.transpose()).transpose() + bias.transpose();
  return static_cast<int>(argmax_lowest(logits));
}

namespace {

// Gradient descent for softmax regression started from zero weights keeps
// W = A X at every step (the penalty gradient is proportional to W), so the
// iteration runs on the n x n Gram matrix instead of the n x d features:
//   Z = A G + b,  A <- (1 - lr*wd) A - lr/n (P - Y),  b <- b - lr/n sum(P - Y).
struct DualModel {
  Eigen::MatrixXd coef;  // C x n
  Eigen::VectorXd bias;  // C
};

template <typename Gram>
DualModel train_dual(const Gram& gram, std::span<const int> labels, int num_classes,
                     const TrainConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  DualModel m{Eigen::MatrixXd::Zero(num_classes, n), Eigen::VectorXd::Zero(num_classes)};
  const double step = cfg.learning_rate / static_cast<double>(n);
  const double shrink = 1.0 - cfg.learning_rate * cfg.weight_decay;
  Eigen::MatrixXd z(num_classes, n);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    z.noalias() = m.coef * gram;
    z.colwise() += m.bias;
    for (Eigen::Index j = 0; j < n; ++j) {
      auto col = z.col(j);
      const double top = col.maxCoeff();
      col = (col.array() - top).exp();
      col /= col.sum();
      col(labels[static_cast<std::size_t>(j)]) -= 1.0;
    }
    m.coef = shrink * m.coef - step * z;
    m.bias -= step * z.rowwise().sum();
  }
  return m;
}

void check_labels(std::span<const int> labels, int num_classes) {
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw ValidationError("training label " + std::to_string(y) + " outside [0, " +
                            std::to_string(num_classes) + ")");
    }
  }
}

}  // namespace

ClassifierParams train_classifier(const FeatureMatrix& reps, std::span<const int> labels,
                                  int num_classes, const TrainConfig& cfg) {
  cfg.validate();
  if (labels.empty() || reps.rows() == 0) throw EmptyCoalitionError("no training examples");
  if (static_cast<std::size_t>(reps.rows()) != labels.size()) {
    throw ValidationError("representation rows and labels differ in count");
  }
  check_labels(labels, num_classes);
  const Eigen::MatrixXd gram = reps * reps.transpose();
  const DualModel m = train_dual(gram, labels, num_classes, cfg);
  return {m.coef * reps, m.bias};
}

double accuracy(const ClassifierParams& params, const FeatureMatrix& reps,
                std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  Eigen::MatrixXd logits = reps * params.weights.transpose();
  logits.rowwise() += params.bias.transpose();
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    if (argmax_lowest(logits.row(i)) == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

FeatureMatrix propagate_view(const InductiveView& view, int depth) {
  const auto& x = view.parent().features();
  FeatureMatrix h(static_cast<Eigen::Index>(view.size()), x.cols());
  for (std::size_t i = 0; i < view.size(); ++i) {
    h.row(static_cast<Eigen::Index>(i)) = x.row(view.original_id(i));
  }
  FeatureMatrix next(h.rows(), h.cols());
  for (int k = 0; k < depth; ++k) {
    for (std::size_t i = 0; i < view.size(); ++i) {
      const auto nbrs = view.local_neighbors(i);
      auto row = next.row(static_cast<Eigen::Index>(i));
      if (nbrs.empty()) {
        row = h.row(static_cast<Eigen::Index>(i));
        continue;
      }
      row.setZero();
      for (std::uint32_t j : nbrs) row += h.row(j);
      row /= static_cast<double>(nbrs.size());
    }
    h.swap(next);
  }
  return h;
}

EvalSet precompute_validation_representations(const InductiveView& view, int depth) {
  const FeatureMatrix all = propagate_view(view, depth);
  EvalSet out;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const NodeId v = view.original_id(i);
    if (!view.parent().is_labeled(v)) continue;
    rows.push_back(static_cast<Eigen::Index>(i));
    out.labels.push_back(view.parent().label(v));
    out.nodes.push_back(v);
  }
  out.reps.resize(static_cast<Eigen::Index>(rows.size()), all.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.reps.row(static_cast<Eigen::Index>(r)) = all.row(rows[r]);
  }
  return out;
}

// ---------------------------------------------------------------------------

PropagationState::PropagationState(const ContributionTree& tree, const FeatureMatrix& features)
    : tree_(&tree),
      features_(&features),
      included_(tree.num_players(), false),
      child_count_(tree.num_players(), 0),
      slot_(tree.num_players(), -1),
      is_dirty_(tree.num_players(), false) {
  std::int32_t slots = 0;
  for (PlayerIndex p = 0; p < tree.num_players(); ++p) {
    if (!tree.children(p).empty()) slot_[p] = slots++;
  }
  child_sum_ = decltype(child_sum_)::Zero(slots, features.cols());
  h_.resize(slots, features.cols());
}

Eigen::RowVectorXd PropagationState::representation(PlayerIndex p) const {
  if (slot_[p] >= 0 && child_count_[p] > 0) return h_.row(slot_[p]);
  return features_->row(tree_->node(p));
}

void PropagationState::insert_player(PlayerIndex p) {
  const ContributionTree& t = *tree_;
  if (p >= t.num_players()) throw LookupError("unknown player " + std::to_string(p));
  if (included_[p]) throw StateError("player " + std::to_string(p) + " already included");
  const PlayerIndex parent = t.parent(p);
  if (parent != kNoParent && !included_[parent]) {
    throw PrecedenceError("player " + std::to_string(p) + " inserted before its parent");
  }
  included_[p] = true;

  // Walk to the root pushing the change of each child's representation into
  // its parent's running sum.
  Eigen::RowVectorXd delta = features_->row(t.node(p));
  bool new_child = true;
  for (PlayerIndex a = parent; a != kNoParent; a = t.parent(a)) {
    const auto s = slot_[a];
    Eigen::RowVectorXd before = representation(a);
    child_sum_.row(s) += delta;
    if (new_child) ++child_count_[a];
    h_.row(s) = child_sum_.row(s) / static_cast<double>(child_count_[a]);
    delta = h_.row(s) - before;
    new_child = false;
  }

  const PlayerIndex root = t.root_of(p);
  if (root == p) active_roots_.push_back(p);
  if (!is_dirty_[root]) {
    is_dirty_[root] = true;
    dirty_roots_.push_back(root);
  }
}

void PropagationState::clear_dirty() {
  for (PlayerIndex r : dirty_roots_) is_dirty_[r] = false;
  dirty_roots_.clear();
}

RootRepresentations propagate_full(const ContributionTree& tree, const FeatureMatrix& features,
                                   std::span<const PlayerIndex> included) {
  const std::size_t n = tree.num_players();
  std::vector<bool> in(n, false);
  for (PlayerIndex p : included) {
    if (p >= n) throw ValidationError("unknown player " + std::to_string(p));
    in[p] = true;
  }
  for (PlayerIndex p : included) {
    const PlayerIndex parent = tree.parent(p);
    if (parent != kNoParent && !in[parent]) {
      throw ValidationError("included set is not closed under ancestors (player " +
                            std::to_string(p) + ")");
    }
  }
  FeatureMatrix sum = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), features.cols());
  std::vector<std::uint32_t> count(n, 0);
  FeatureMatrix h(static_cast<Eigen::Index>(n), features.cols());
  // Children carry larger indices than their parents.
  for (std::size_t i = n; i-- > 0;) {
    if (!in[i]) continue;
    const auto row = static_cast<Eigen::Index>(i);
    if (count[i] > 0) {
      h.row(row) = sum.row(row) / static_cast<double>(count[i]);
    } else {
      h.row(row) = features.row(tree.node(static_cast<PlayerIndex>(i)));
    }
    const PlayerIndex parent = tree.parent(static_cast<PlayerIndex>(i));
    if (parent != kNoParent) {
      sum.row(parent) += h.row(row);
      ++count[parent];
    }
  }
  RootRepresentations out;
  for (PlayerIndex r : tree.roots()) {
    if (in[r]) out.roots.push_back(r);
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.reps.resize(static_cast<Eigen::Index>(out.roots.size()), features.cols());
  for (std::size_t k = 0; k < out.roots.size(); ++k) {
    out.reps.row(static_cast<Eigen::Index>(k)) = h.row(out.roots[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class SgcSession final : public CoalitionSession {
 public:
  explicit SgcSession(const SgcTreeGame& game)
      : game_(game),
        state_(game.tree(), game.graph().features()),
        present_(game.tree().num_players(), false),
        root_slot_(game.tree().num_players(), -1) {
    const auto roots = game.tree().roots().size();
    const auto d = game.graph().features().cols();
    const auto m = game.validation().reps.rows();
    reps_.resize(static_cast<Eigen::Index>(roots), d);
    gram_.resize(static_cast<Eigen::Index>(roots), static_cast<Eigen::Index>(roots));
    cross_.resize(static_cast<Eigen::Index>(roots), m);
  }

  void insert(PlayerIndex p) override {
    const ContributionTree& t = game_.tree();
    if (present_[p]) throw StateError("player " + std::to_string(p) + " already included");
    present_[p] = true;
    const PlayerIndex parent = t.parent(p);
    if (parent != kNoParent && !state_.included(parent)) return;
    // Attach p together with any of its descendants that arrived earlier.
    std::vector<PlayerIndex> stack{p};
    while (!stack.empty()) {
      const PlayerIndex q = stack.back();
      stack.pop_back();
      state_.insert_player(q);
      for (PlayerIndex c : t.children(q)) {
        if (present_[c]) stack.push_back(c);
      }
    }
  }

  double value() override {
    const auto& active = state_.active_roots();
    if (active.empty() || game_.validation().labels.empty()) return 0.0;
    // Deferred inserts can leave the trained part of the forest unchanged.
    if (cached_ && state_.dirty_roots().empty() && labels_.size() == active.size()) return *cached_;
    refresh();
    const auto n = static_cast<Eigen::Index>(active.size());
    const Graph& g = game_.graph();
    const auto gram = gram_.topLeftCorner(n, n);
    const auto m = train_dual(gram, labels_, g.num_classes(), game_.config());

    const EvalSet& val = game_.validation();
    Eigen::MatrixXd logits = m.coef * cross_.topRows(n);
    logits.colwise() += m.bias;
    std::size_t correct = 0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      if (argmax_lowest(logits.col(j).transpose()) == val.labels[static_cast<std::size_t>(j)]) {
        ++correct;
      }
    }
    cached_ = static_cast<double>(correct) / static_cast<double>(val.labels.size());
    return *cached_;
  }

 private:
  // Brings the Gram and validation cross-products up to date for roots whose
  // representation changed.
  void refresh() {
    const auto& active = state_.active_roots();
    const Graph& g = game_.graph();
    while (labels_.size() < active.size()) {
      const PlayerIndex r = active[labels_.size()];
      root_slot_[r] = static_cast<std::int32_t>(labels_.size());
      labels_.push_back(g.label(game_.tree().node(r)));
    }
    const auto n = static_cast<Eigen::Index>(active.size());
    for (PlayerIndex r : state_.dirty_roots()) {
      const Eigen::Index i = root_slot_[r];
      reps_.row(i) = state_.representation(r);
    }
    const auto& v = game_.validation().reps;
    for (PlayerIndex r : state_.dirty_roots()) {
      const Eigen::Index i = root_slot_[r];
      const auto row = reps_.row(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double dot = row.dot(reps_.row(j));
        gram_(i, j) = dot;
        gram_(j, i) = dot;
      }
      cross_.row(i).noalias() = row * v.transpose();
    }
    state_.clear_dirty();
  }

  const SgcTreeGame& game_;
  PropagationState state_;
  std::vector<bool> present_;
  std::vector<std::int32_t> root_slot_;
  std::vector<int> labels_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> reps_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd cross_;
  std::optional<double> cached_;
};

}  // namespace

SgcTreeGame::SgcTreeGame(const ContributionTree& tree, const Graph& graph, EvalSet validation,
                         TrainConfig cfg)
    : tree_(&tree), graph_(&graph), validation_(std::move(validation)), cfg_(cfg) {
  cfg_.validate();
  for (PlayerIndex r : tree.roots()) {
    const NodeId v = tree.node(r);
    if (!graph.is_labeled(v)) {
      throw ValidationError("root player node " + std::to_string(v) + " has no label");
    }
  }
}

std::unique_ptr<CoalitionSession> SgcTreeGame::new_session() const {
  return std::make_unique<SgcSession>(*this);
}

// ---------------------------------------------------------------------------

ViewUtility::ViewUtility(std::span<const NodeId> labeled_train, EvalSet eval, int depth,
                         TrainConfig cfg)
    : labeled_(labeled_train.begin(), labeled_train.end()),
      eval_(std::move(eval)),
      depth_(depth),
      cfg_(cfg) {
  cfg_.validate();
  std::sort(labeled_.begin(), labeled_.end());
}

double ViewUtility::operator()(const InductiveView& view) const {
  std::vector<Eigen::Index> rows;
  std::vector<int> labels;
  for (NodeId v : labeled_) {
    if (!view.contains(v)) continue;
    rows.push_back(static_cast<Eigen::Index>(view.local_index(v)));
    labels.push_back(view.parent().label(v));
  }
  if (rows.empty() || eval_.labels.empty()) return 0.0;
  const FeatureMatrix h = propagate_view(view, depth_);
  FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), h.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = h.row(rows[i]);
  const ClassifierParams params =
      train_classifier(x, labels, view.parent().num_classes(), cfg_);
  return accuracy(params, eval_.reps, eval_.labels);
}

// ---------------------------------------------------------------------------

namespace {

class SetFunctionSession final : public CoalitionSession {
 public:
  explicit SetFunctionSession(const SetFunctionGame& game)
      : game_(game), members_(game.num_players(), false) {}

  void insert(PlayerIndex p) override {
    if (p >= members_.size()) throw LookupError("unknown player " + std::to_string(p));
    if (members_[p]) throw StateError("player " + std::to_string(p) + " already included");
    members_[p] = true;
  }
  double value() override { return game_(members_); }

 private:
  const SetFunctionGame& game_;
  std::vector<bool> members_;
};

}  // namespace

std::unique_ptr<CoalitionSession> SetFunctionGame::new_session() const {
  return std::make_unique<SetFunctionSession>(*this);
}

}  // namespace pcwinter
