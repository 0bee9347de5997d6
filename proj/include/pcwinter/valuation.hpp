#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcwinter/aggregate.hpp"
#include "pcwinter/contribution_tree.hpp"
#include "pcwinter/game.hpp"
#include "pcwinter/graph.hpp"
#include "pcwinter/permute.hpp"

namespace pcwinter {

// Running per-player sum and count of marginal contributions.
class ValueAccumulator {
 public:
  ValueAccumulator() = default;
  explicit ValueAccumulator(std::size_t num_players)
      : sum_(num_players, 0.0), count_(num_players, 0) {}

  std::size_t size() const { return sum_.size(); }
  void record(std::size_t player, double marginal) {
    sum_[player] += marginal;
    ++count_[player];
  }
  void merge(const ValueAccumulator& other);

  double value(std::size_t player) const {
    return count_[player] == 0 ? 0.0 : sum_[player] / static_cast<double>(count_[player]);
  }
  std::vector<double> values() const;

  std::vector<double>& sums() { return sum_; }
  const std::vector<double>& sums() const { return sum_; }
  std::vector<std::uint64_t>& counts() { return count_; }
  const std::vector<std::uint64_t>& counts() const { return count_; }

  friend bool operator==(const ValueAccumulator&, const ValueAccumulator&) = default;

 private:
  std::vector<double> sum_;
  std::vector<std::uint64_t> count_;
};

struct ConvergenceSettings {
  std::size_t window = 20;
  double tolerance = 0.05;
  double epsilon = 1e-12;
  // When false the monitor still tracks the statistic but never stops a run.
  bool stop_on_convergence = true;
};

// Mean relative change of the value vector against the snapshot `window`
// traversals back. Players with |v| below epsilon are left out of the mean.
class ConvergenceMonitor {
 public:
  explicit ConvergenceMonitor(ConvergenceSettings settings = {});

  // Feeds the values after the next traversal; true once converged.
  bool observe(std::span<const double> values);

  std::uint64_t observed() const { return observed_; }
  // Statistic of the latest observation; empty until `window` snapshots exist.
  std::optional<double> last_change() const { return last_change_; }
  const ConvergenceSettings& settings() const { return settings_; }

  // Snapshots kept for checkpointing, oldest first.
  const std::deque<std::vector<double>>& history() const { return history_; }
  void restore(std::uint64_t observed, std::deque<std::vector<double>> history,
               std::optional<double> last_change);

 private:
  ConvergenceSettings settings_;
  std::uint64_t observed_ = 0;
  std::deque<std::vector<double>> history_;
  std::optional<double> last_change_;
};

struct RunBudget {
  std::optional<std::uint64_t> max_traversals;
  std::optional<std::chrono::duration<double>> max_wall_clock;

  // Throws ConfigError for a zero budget.
  void validate() const;
};

enum class StopReason { none, converged, traversal_budget, time_budget, interrupted };

std::string to_string(StopReason reason);

// Everything a streaming run needs to continue where it stopped.
struct StreamState {
  std::uint64_t seed = 0;
  std::uint64_t traversals = 0;
  std::uint64_t retrainings = 0;
  double elapsed_seconds = 0.0;
  StopReason stop = StopReason::none;
  ValueAccumulator acc;
  ConvergenceMonitor monitor;

  bool converged() const { return stop == StopReason::converged; }
  // Completed runs are not continued by a resume.
  bool finished() const { return stop != StopReason::none && stop != StopReason::interrupted; }
};

struct StreamOptions {
  RunBudget budget;
  ConvergenceSettings convergence;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // Stop with StopReason::interrupted once this many traversals are merged
  // in total (0 = never). Used to leave a resumable checkpoint.
  std::uint64_t stop_after = 0;
  std::uint64_t checkpoint_every = 0;
  std::function<void(const StreamState&)> on_checkpoint;
};

// Marginals produced by one sampled permutation.
struct TraversalOutcome {
  // Evaluated players in insertion order with their marginals.
  std::vector<std::pair<std::uint32_t, double>> marginals;
  // Players whose marginal is recorded as zero without evaluation.
  std::vector<std::uint32_t> truncated;
  // Utility evaluations after an insertion.
  std::uint64_t retrainings = 0;
  double empty_value = 0.0;
  double final_value = 0.0;
};

enum class PermutationSampler { dfs, level_only, precedence_only };

struct PcWinterOptions {
  PermutationSampler sampler = PermutationSampler::dfs;
  TruncationRatios ratios;
  StreamOptions stream;
};

// One permutation of the PC-Winter stream: stream `index` of `seed`.
TraversalOutcome evaluate_traversal(const TreeGame& game, const ContributionTree& tree,
                                    PermutationSampler sampler, const TruncationRatios& ratios,
                                    std::uint64_t seed, std::uint64_t index);

// Streaming Monte Carlo PC-Winter estimate. Traversals are computed in
// parallel and merged in index order, so the result does not depend on the
// thread count. Pass a loaded checkpoint in `resume` to continue a run.
StreamState run_pc_winter(const TreeGame& game, const ContributionTree& tree,
                          const PcWinterOptions& options, std::optional<StreamState> resume = {});

// Exact value over every permissible permutation. Throws SizeError above
// `cap` players.
std::vector<double> exact_pc_winter(const TreeGame& game, const ContributionTree& tree,
                                    std::size_t cap = 8);
// Exact Shapley value over all permutations of the game's players.
std::vector<double> exact_shapley(const TreeGame& game, std::size_t cap = 8);

// ---------------------------------------------------------------------------
// Baselines

using NodeSetUtility = std::function<double(std::span<const NodeId> nodes)>;
using ViewFunction = std::function<double(const InductiveView& view)>;

// Labeled training nodes plus every node within `hops` of one.
std::vector<NodeId> data_shapley_players(const InductiveView& train,
                                         std::span<const NodeId> labeled, int hops = 2);

struct TmcOptions {
  double tolerance = 0.01;
  StreamOptions stream;
};

// Truncated Monte Carlo Shapley over node players; the accumulator is
// indexed like `players`. Once a prefix gets within `tolerance` of the full
// utility, the rest of the permutation records zero.
StreamState run_data_shapley_tmc(std::span<const NodeId> players, const NodeSetUtility& utility,
                                 const TmcOptions& options,
                                 std::optional<StreamState> resume = {});

// U(view) - U(view without the node), for each node of `candidates`.
NodeValueTable run_loo_nodes(const InductiveView& view, const ViewFunction& utility,
                             std::span<const NodeId> candidates);
// U(view) - U(view without the edge), for every edge of the view.
EdgeValueTable run_loo_edges(const InductiveView& view, const ViewFunction& utility);

NodeValueTable degree_values(const InductiveView& view);
NodeValueTable random_values(std::span<const NodeId> ids, std::uint64_t seed);
// Fraction of ordered node pairs whose shortest paths pass through each edge
// (split evenly among equal-length paths).
EdgeValueTable edge_betweenness(const InductiveView& view);

// ---------------------------------------------------------------------------
// Files

struct CheckpointHeader {
  std::uint64_t dataset_fingerprint = 0;
  std::uint64_t config_fingerprint = 0;
};

void checkpoint_save(const StreamState& state, const CheckpointHeader& header,
                     const std::filesystem::path& file);

struct Checkpoint {
  CheckpointHeader header;
  StreamState state;
};

// Throws IntegrityError on a bad magic, version or checksum.
Checkpoint checkpoint_load(const std::filesystem::path& file);
// Also checks the player count and fingerprints.
Checkpoint checkpoint_load(const std::filesystem::path& file, std::size_t num_players,
                           const CheckpointHeader& expected);

struct ValueRow {
  std::string entity_type;  // player | node | edge
  std::string entity_id;
  double value = 0.0;
  std::uint64_t count = 0;
};

// values.csv: entity_type,entity_id,value,count
void write_values_csv(std::span<const ValueRow> rows, const std::filesystem::path& file);
std::vector<ValueRow> read_values_csv(const std::filesystem::path& file);

// entity_id spellings: players as '/'-joined paths, edges as "u-v".
std::string path_id(std::span<const NodeId> path);
std::vector<NodeId> parse_path_id(std::string_view id);
std::string edge_id(const Edge& e);
Edge parse_edge_id(std::string_view id);

struct RunReport {
  std::string method;
  std::uint64_t traversals = 0;
  double retrainings_per_traversal = 0.0;
  double wall_seconds = 0.0;
  bool converged = false;
  StopReason stop = StopReason::none;
  std::optional<double> last_change;
};

RunReport make_report(const std::string& method, const StreamState& state);
// Two-column CSV: key,value.
void write_run_report(const RunReport& report, const std::filesystem::path& file);

}  // namespace pcwinter
