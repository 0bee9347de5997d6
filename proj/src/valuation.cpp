#include "pcwinter/valuation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <exception>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <thread>

#include "pcwinter/errors.hpp"
#include "pcwinter/hash.hpp"
#include "pcwinter/textio.hpp"

namespace pcwinter {

void ValueAccumulator::merge(const ValueAccumulator& other) {
  if (other.size() != size()) throw ValidationError("accumulator sizes differ");
  for (std::size_t i = 0; i < sum_.size(); ++i) {
    sum_[i] += other.sum_[i];
    count_[i] += other.count_[i];
  }
}

std::vector<double> ValueAccumulator::values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(i);
  return out;
}

// ---------------------------------------------------------------------------

ConvergenceMonitor::ConvergenceMonitor(ConvergenceSettings settings) : settings_(settings) {
  if (settings_.window < 1) throw ConfigError("convergence window must be >= 1");
  if (!(settings_.tolerance > 0.0)) throw ConfigError("convergence tolerance must be positive");
}

bool ConvergenceMonitor::observe(std::span<const double> values) {
  ++observed_;
  last_change_.reset();
  if (history_.size() == settings_.window) {
    const auto& old = history_.front();
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double now = std::abs(values[i]);
      if (now < settings_.epsilon) continue;
      total += std::abs(values[i] - old[i]) / now;
      ++used;
    }
    last_change_ = used == 0 ? 0.0 : total / static_cast<double>(used);
  }
  history_.emplace_back(values.begin(), values.end());
  if (history_.size() > settings_.window) history_.pop_front();
  return last_change_ && *last_change_ < settings_.tolerance;
}

void ConvergenceMonitor::restore(std::uint64_t observed, std::deque<std::vector<double>> history,
                                 std::optional<double> last_change) {
  if (history.size() > settings_.window) throw IntegrityError("convergence history too long");
  observed_ = observed;
  history_ = std::move(history);
  last_change_ = last_change;
}

void RunBudget::validate() const {
  if (max_traversals && *max_traversals == 0) throw ConfigError("traversal budget must be > 0");
  if (max_wall_clock && !(max_wall_clock->count() > 0.0)) {
    throw ConfigError("wall-clock budget must be > 0");
  }
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::none: return "none";
    case StopReason::converged: return "converged";
    case StopReason::traversal_budget: return "traversal_budget";
    case StopReason::time_budget: return "time_budget";
    case StopReason::interrupted: return "interrupted";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

using ItemFn = std::function<TraversalOutcome(std::uint64_t seed, std::uint64_t index)>;

struct ItemResult {
  TraversalOutcome outcome;
  std::exception_ptr error;
};

std::vector<ItemResult> compute_batch(const ItemFn& item, std::uint64_t seed, std::uint64_t first,
                                      std::size_t count, unsigned threads) {
  std::vector<ItemResult> out(count);
  auto work = [&](std::size_t k) {
    try {
      out[k].outcome = item(seed, first + k);
    } catch (...) {
      out[k].error = std::current_exception();
    }
  };
  const unsigned workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) work(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) work(k);
      });
    }
  }
  return out;
}

StreamState run_stream(std::size_t num_players, const ItemFn& item, const StreamOptions& opt,
                       std::optional<StreamState> resume) {
  opt.budget.validate();
  if (!opt.budget.max_traversals && !opt.budget.max_wall_clock &&
      !opt.convergence.stop_on_convergence && opt.stop_after == 0) {
    throw ConfigError("run has no stopping rule");
  }
  StreamState state;
  if (resume) {
    state = std::move(*resume);
    if (state.acc.size() != num_players) {
      throw IntegrityError("checkpoint holds " + std::to_string(state.acc.size()) +
                           " players, run has " + std::to_string(num_players));
    }
    if (state.finished()) return state;
  } else {
    state.seed = opt.seed;
    state.acc = ValueAccumulator(num_players);
    state.monitor = ConvergenceMonitor(opt.convergence);
  }
  state.stop = StopReason::none;

  const auto start = std::chrono::steady_clock::now();
  const double elapsed_before = state.elapsed_seconds;
  const unsigned threads = std::max(1u, opt.threads);
  auto budget_left = [&]() -> std::uint64_t {
    std::uint64_t left = UINT64_MAX;
    if (opt.budget.max_traversals) {
      left = *opt.budget.max_traversals > state.traversals
                 ? *opt.budget.max_traversals - state.traversals
                 : 0;
    }
    if (opt.stop_after > 0) {
      left = std::min(left, opt.stop_after > state.traversals ? opt.stop_after - state.traversals
                                                                : std::uint64_t{0});
    }
    return left;
  };

  while (state.stop == StopReason::none) {
    if (budget_left() == 0) {
      state.stop = opt.budget.max_traversals && state.traversals >= *opt.budget.max_traversals
                       ? StopReason::traversal_budget
                       : StopReason::interrupted;
      break;
    }
    const std::size_t batch =
        static_cast<std::size_t>(std::min<std::uint64_t>(threads == 1 ? 1 : 2 * threads, budget_left()));
    auto results = compute_batch(item, state.seed, state.traversals, batch, threads);

    for (auto& r : results) {
      if (r.error) std::rethrow_exception(r.error);
      const TraversalOutcome& o = r.outcome;
      for (const auto& [p, m] : o.marginals) state.acc.record(p, m);
      for (auto p : o.truncated) state.acc.record(p, 0.0);
      state.retrainings += o.retrainings;
      ++state.traversals;
      state.elapsed_seconds =
          elapsed_before +
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      const bool converged = state.monitor.observe(state.acc.values());
      if (converged && opt.convergence.stop_on_convergence) {
        state.stop = StopReason::converged;
      } else if (opt.budget.max_traversals && state.traversals >= *opt.budget.max_traversals) {
        state.stop = StopReason::traversal_budget;
      } else if (opt.budget.max_wall_clock &&
                 state.elapsed_seconds >= opt.budget.max_wall_clock->count()) {
        state.stop = StopReason::time_budget;
      } else if (opt.stop_after > 0 && state.traversals >= opt.stop_after) {
        state.stop = StopReason::interrupted;
      }
      if (opt.on_checkpoint && opt.checkpoint_every > 0 && state.stop == StopReason::none &&
          state.traversals % opt.checkpoint_every == 0) {
        opt.on_checkpoint(state);
      }
      if (state.stop != StopReason::none) break;
    }
  }
  if (opt.on_checkpoint) opt.on_checkpoint(state);
  return state;
}

void play_order(CoalitionSession& session, std::span<const PlayerIndex> order, TraversalOutcome& out) {
  double prev = session.value();
  out.empty_value = prev;
  out.marginals.reserve(order.size());
  for (PlayerIndex p : order) {
    session.insert(p);
    const double cur = session.value();
    out.marginals.emplace_back(p, cur - prev);
    ++out.retrainings;
    prev = cur;
  }
  out.final_value = prev;
}

}  // namespace

TraversalOutcome evaluate_traversal(const TreeGame& game, const ContributionTree& tree,
                                    PermutationSampler sampler, const TruncationRatios& ratios,
                                    std::uint64_t seed, std::uint64_t index) {
  Rng rng = make_stream(seed, index);
  TraversalOutcome out;
  Permutation order;
  switch (sampler) {
    case PermutationSampler::dfs: {
      Traversal t = ratios.values().empty() ? sample_dfs_traversal(tree, rng)
                                            : sample_dfs_traversal(tree, rng, ratios);
      order = std::move(t.order);
      out.truncated = std::move(t.truncated);
      break;
    }
    case PermutationSampler::level_only:
      order = sample_level_only(tree, rng);
      break;
    case PermutationSampler::precedence_only:
      order = sample_precedence_only(tree, rng);
      break;
  }
  auto session = game.new_session();
  play_order(*session, order, out);
  return out;
}

StreamState run_pc_winter(const TreeGame& game, const ContributionTree& tree,
                          const PcWinterOptions& options, std::optional<StreamState> resume) {
  if (game.num_players() != tree.num_players()) {
    throw ValidationError("game and tree disagree on the player count");
  }
  ItemFn item = [&](std::uint64_t seed, std::uint64_t index) {
    return evaluate_traversal(game, tree, options.sampler, options.ratios, seed, index);
  };
  return run_stream(tree.num_players(), item, options.stream, std::move(resume));
}

std::vector<double> exact_pc_winter(const TreeGame& game, const ContributionTree& tree,
                                    std::size_t cap) {
  const auto perms = enumerate_permissible_bruteforce(tree, cap);
  std::vector<double> sum(tree.num_players(), 0.0);
  for (const auto& perm : perms) {
    TraversalOutcome o;
    auto session = game.new_session();
    play_order(*session, perm, o);
    for (const auto& [p, m] : o.marginals) sum[p] += m;
  }
  for (double& v : sum) v /= static_cast<double>(perms.size());
  return sum;
}

std::vector<double> exact_shapley(const TreeGame& game, std::size_t cap) {
  const std::size_t n = game.num_players();
  if (n > cap) {
    throw SizeError("exact Shapley limited to " + std::to_string(cap) + " players, game has " +
                    std::to_string(n));
  }
  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), PlayerIndex{0});
  std::vector<double> sum(n, 0.0);
  std::size_t count = 0;
  do {
    TraversalOutcome o;
    auto session = game.new_session();
    play_order(*session, perm, o);
    for (const auto& [p, m] : o.marginals) sum[p] += m;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& v : sum) v /= static_cast<double>(count);
  return sum;
}

// ---------------------------------------------------------------------------

std::vector<NodeId> data_shapley_players(const InductiveView& train,
                                         std::span<const NodeId> labeled, int hops) {
  std::vector<int> dist(train.size(), -1);
  std::queue<std::size_t> frontier;
  for (NodeId v : labeled) {
    const std::size_t i = train.local_index(v);
    if (dist[i] < 0) {
      dist[i] = 0;
      frontier.push(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    if (dist[i] >= hops) continue;
    for (std::uint32_t j : train.local_neighbors(i)) {
      if (dist[j] < 0) {
        dist[j] = dist[i] + 1;
        frontier.push(j);
      }
    }
  }
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] >= 0) out.push_back(train.original_id(i));
  }
  return out;
}

StreamState run_data_shapley_tmc(std::span<const NodeId> players, const NodeSetUtility& utility,
                                 const TmcOptions& options, std::optional<StreamState> resume) {
  if (std::isnan(options.tolerance) || options.tolerance < 0.0) {
    throw ConfigError("TMC tolerance must be >= 0");
  }
  const double full = utility(players);
  ItemFn item = [&](std::uint64_t seed, std::uint64_t index) {
    Rng rng = make_stream(seed, index);
    std::vector<std::uint32_t> perm(players.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);

    TraversalOutcome out;
    std::vector<NodeId> prefix;
    prefix.reserve(players.size());
    double prev = utility(prefix);
    out.empty_value = prev;
    bool cut = false;
    for (std::uint32_t k : perm) {
      if (cut) {
        out.truncated.push_back(k);
        continue;
      }
      prefix.push_back(players[k]);
      const double cur = utility(prefix);
      out.marginals.emplace_back(k, cur - prev);
      ++out.retrainings;
      prev = cur;
      if (std::abs(full - cur) < options.tolerance) cut = true;
    }
    out.final_value = prev;
    return out;
  };
  return run_stream(players.size(), item, options.stream, std::move(resume));
}

namespace {

InductiveView without_node(const InductiveView& view, NodeId node) {
  std::vector<NodeId> keep;
  keep.reserve(view.size());
  for (NodeId v : view.kept_ids()) {
    if (v != node) keep.push_back(v);
  }
  std::vector<Edge> edges;
  for (const Edge& e : view.edges()) {
    if (e.u != node && e.v != node) edges.push_back(e);
  }
  return InductiveView::with_edges(view.parent(), keep, edges);
}

}  // namespace

NodeValueTable run_loo_nodes(const InductiveView& view, const ViewFunction& utility,
                             std::span<const NodeId> candidates) {
  const double base = utility(view);
  NodeValueTable out;
  for (NodeId v : candidates) {
    if (!view.contains(v)) throw LookupError("node " + std::to_string(v) + " not in view");
    out[v] = base - utility(without_node(view, v));
  }
  return out;
}

EdgeValueTable run_loo_edges(const InductiveView& view, const ViewFunction& utility) {
  const double base = utility(view);
  const std::vector<Edge> all = view.edges();
  EdgeValueTable out;
  std::vector<Edge> rest;
  rest.reserve(all.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    rest.clear();
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (j != k) rest.push_back(all[j]);
    }
    out[all[k]] = base - utility(InductiveView::with_edges(view.parent(), view.kept_ids(), rest));
  }
  return out;
}

NodeValueTable degree_values(const InductiveView& view) {
  NodeValueTable out;
  for (std::size_t i = 0; i < view.size(); ++i) {
    out[view.original_id(i)] = static_cast<double>(view.local_neighbors(i).size());
  }
  return out;
}

NodeValueTable random_values(std::span<const NodeId> ids, std::uint64_t seed) {
  std::vector<NodeId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  Rng rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  NodeValueTable out;
  for (NodeId v : sorted) out[v] = uniform(rng);
  return out;
}

EdgeValueTable edge_betweenness(const InductiveView& view) {
  const std::size_t n = view.size();
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> score;
  for (const Edge& e : view.edges()) {
    score[{static_cast<std::uint32_t>(view.local_index(e.u)),
           static_cast<std::uint32_t>(view.local_index(e.v))}] = 0.0;
  }
  auto key = [](std::uint32_t a, std::uint32_t b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  };

  std::vector<double> sigma(n), delta(n);
  std::vector<std::int64_t> dist(n);
  std::vector<std::uint32_t> stack;
  std::vector<std::uint32_t> queue;
  for (std::uint32_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    stack.clear();
    queue.assign(1, s);
    sigma[s] = 1.0;
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t v = queue[head];
      stack.push_back(v);
      for (std::uint32_t w : view.local_neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    while (!stack.empty()) {
      const std::uint32_t w = stack.back();
      stack.pop_back();
      for (std::uint32_t v : view.local_neighbors(w)) {
        if (dist[v] != dist[w] - 1) continue;
        const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
        score[key(v, w)] += c;
        delta[v] += c;
      }
    }
  }
  EdgeValueTable out;
  const double pairs = n < 2 ? 1.0 : static_cast<double>(n) * static_cast<double>(n - 1);
  for (const auto& [k, v] : score) {
    out[Edge::make(view.original_id(k.first), view.original_id(k.second))] = v / pairs;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'P', 'C', 'W', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kCheckpointVersion = 1;

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  template <typename T>
  void put_all(const std::vector<T>& v) {
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
  }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view data, std::string file) : data_(data), file_(std::move(file)) {}

  template <typename T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  template <typename T>
  std::vector<T> get_all(std::size_t n) {
    if (n > (data_.size() - pos_) / sizeof(T)) truncated();
    std::vector<T> v(n);
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) {
    if (data_.size() - pos_ < n) truncated();
  }
  [[noreturn]] void truncated() { throw IntegrityError(file_ + ": checkpoint truncated"); }

  std::string_view data_;
  std::string file_;
  std::size_t pos_ = 0;
};

}  // namespace

void checkpoint_save(const StreamState& state, const CheckpointHeader& header,
                     const std::filesystem::path& file) {
  Writer w;
  w.buffer().append(kMagic, sizeof(kMagic));
  w.put(kCheckpointVersion);
  w.put(header.dataset_fingerprint);
  w.put(header.config_fingerprint);
  w.put(state.seed);
  w.put(state.traversals);
  w.put(state.retrainings);
  w.put(state.elapsed_seconds);
  w.put(static_cast<std::uint32_t>(state.stop));
  w.put(static_cast<std::uint64_t>(state.acc.size()));
  w.put_all(state.acc.sums());
  w.put_all(state.acc.counts());

  const auto& mon = state.monitor;
  w.put(static_cast<std::uint64_t>(mon.settings().window));
  w.put(mon.settings().tolerance);
  w.put(mon.settings().epsilon);
  w.put(static_cast<std::uint8_t>(mon.settings().stop_on_convergence));
  w.put(mon.observed());
  w.put(static_cast<std::uint8_t>(mon.last_change().has_value()));
  w.put(mon.last_change().value_or(0.0));
  w.put(static_cast<std::uint64_t>(mon.history().size()));
  for (const auto& snap : mon.history()) w.put_all(snap);

  Fnv1a h;
  h.update(w.buffer());
  w.put(h.digest());

  AtomicFile out(file);
  out.stream().write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  out.commit();
}

Checkpoint checkpoint_load(const std::filesystem::path& file) {
  const std::string data = read_file(file);
  const std::string name = file.string();
  if (data.size() < sizeof(kMagic) + sizeof(std::uint64_t) ||
      std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IntegrityError(name + ": not a checkpoint file");
  }
  const std::string_view payload(data.data(), data.size() - sizeof(std::uint64_t));
  std::uint64_t stored = 0;
  std::memcpy(&stored, data.data() + payload.size(), sizeof(stored));
  Fnv1a h;
  h.update(payload);
  if (h.digest() != stored) throw IntegrityError(name + ": checkpoint checksum mismatch");

  Reader r(payload.substr(sizeof(kMagic)), name);
  if (r.get<std::uint32_t>() != kCheckpointVersion) {
    throw IntegrityError(name + ": unsupported checkpoint version");
  }
  Checkpoint cp;
  cp.header.dataset_fingerprint = r.get<std::uint64_t>();
  cp.header.config_fingerprint = r.get<std::uint64_t>();
  StreamState& s = cp.state;
  s.seed = r.get<std::uint64_t>();
  s.traversals = r.get<std::uint64_t>();
  s.retrainings = r.get<std::uint64_t>();
  s.elapsed_seconds = r.get<double>();
  const auto stop = r.get<std::uint32_t>();
  if (stop > static_cast<std::uint32_t>(StopReason::interrupted)) {
    throw IntegrityError(name + ": bad stop reason");
  }
  s.stop = static_cast<StopReason>(stop);
  const auto n = static_cast<std::size_t>(r.get<std::uint64_t>());
  s.acc = ValueAccumulator(0);
  s.acc.sums() = r.get_all<double>(n);
  s.acc.counts() = r.get_all<std::uint64_t>(n);

  ConvergenceSettings settings;
  settings.window = static_cast<std::size_t>(r.get<std::uint64_t>());
  settings.tolerance = r.get<double>();
  settings.epsilon = r.get<double>();
  settings.stop_on_convergence = r.get<std::uint8_t>() != 0;
  const auto observed = r.get<std::uint64_t>();
  const bool has_last = r.get<std::uint8_t>() != 0;
  const double last = r.get<double>();
  const auto snaps = static_cast<std::size_t>(r.get<std::uint64_t>());
  std::deque<std::vector<double>> history;
  for (std::size_t k = 0; k < snaps; ++k) history.push_back(r.get_all<double>(n));
  if (!r.done()) throw IntegrityError(name + ": trailing bytes in checkpoint");
  try {
    s.monitor = ConvergenceMonitor(settings);
  } catch (const ConfigError& e) {
    throw IntegrityError(name + ": " + e.what());
  }
  s.monitor.restore(observed, std::move(history), has_last ? std::optional<double>(last) : std::nullopt);
  return cp;
}

Checkpoint checkpoint_load(const std::filesystem::path& file, std::size_t num_players,
                           const CheckpointHeader& expected) {
  Checkpoint cp = checkpoint_load(file);
  if (cp.state.acc.size() != num_players) {
    throw IntegrityError("checkpoint holds " + std::to_string(cp.state.acc.size()) +
                         " players, expected " + std::to_string(num_players));
  }
  if (cp.header.dataset_fingerprint != expected.dataset_fingerprint) {
    throw IntegrityError("checkpoint was written for a different dataset");
  }
  if (cp.header.config_fingerprint != expected.config_fingerprint) {
    throw IntegrityError("checkpoint was written for a different configuration");
  }
  return cp;
}

// ---------------------------------------------------------------------------

void write_values_csv(std::span<const ValueRow> rows, const std::filesystem::path& file) {
  AtomicFile out(file);
  out.stream() << "entity_type,entity_id,value,count\n";
  for (const auto& r : rows) {
    out.stream() << r.entity_type << ',' << r.entity_id << ',' << format_double(r.value) << ','
                 << r.count << '\n';
  }
  out.commit();
}

std::vector<ValueRow> read_values_csv(const std::filesystem::path& file) {
  LineReader in(file);
  std::vector<ValueRow> rows;
  std::string_view line;
  bool header = true;
  while (in.next(line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "entity_type,entity_id,value,count") continue;
    }
    const auto f = split_fields(line, ',');
    if (f.size() != 4) {
      throw ParseError(in.file(), in.line_number(), "expected entity_type,entity_id,value,count");
    }
    if (f[0] != "player" && f[0] != "node" && f[0] != "edge") {
      throw ParseError(in.file(), in.line_number(), "unknown entity type '" + std::string(f[0]) + "'");
    }
    rows.push_back({std::string(f[0]), std::string(f[1]), parse_double(f[2], in), parse_uint(f[3], in)});
  }
  return rows;
}

std::string path_id(std::span<const NodeId> path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '/';
    out += std::to_string(path[i]);
  }
  return out;
}

namespace {

NodeId parse_id_part(std::string_view s, std::string_view whole) {
  NodeId v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("bad entity id '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

std::vector<NodeId> parse_path_id(std::string_view id) {
  std::vector<NodeId> out;
  for (std::string_view part : split_fields(id, '/')) out.push_back(parse_id_part(part, id));
  return out;
}

std::string edge_id(const Edge& e) { return std::to_string(e.u) + "-" + std::to_string(e.v); }

Edge parse_edge_id(std::string_view id) {
  const auto f = split_fields(id, '-');
  if (f.size() != 2) throw ValidationError("bad edge id '" + std::string(id) + "'");
  const NodeId a = parse_id_part(f[0], id);
  const NodeId b = parse_id_part(f[1], id);
  if (a == b) throw ValidationError("bad edge id '" + std::string(id) + "'");
  return Edge::make(a, b);
}

RunReport make_report(const std::string& method, const StreamState& state) {
  RunReport r;
  r.method = method;
  r.traversals = state.traversals;
  r.retrainings_per_traversal =
      state.traversals == 0
          ? 0.0
          : static_cast<double>(state.retrainings) / static_cast<double>(state.traversals);
  r.wall_seconds = state.elapsed_seconds;
  r.converged = state.converged();
  r.stop = state.stop;
  r.last_change = state.monitor.last_change();
  return r;
}

void write_run_report(const RunReport& report, const std::filesystem::path& file) {
  AtomicFile out(file);
  auto& os = out.stream();
  os << "key,value\n";
  os << "method," << report.method << '\n';
  os << "traversals," << report.traversals << '\n';
  os << "retrainings_per_traversal," << format_double(report.retrainings_per_traversal) << '\n';
  os << "wall_seconds," << format_double(report.wall_seconds, 6) << '\n';
  os << "converged," << (report.converged ? "true" : "false") << '\n';
  os << "stop_reason," << to_string(report.stop) << '\n';
  os << "last_relative_change,"
     << (report.last_change ? format_double(*report.last_change, 9) : std::string("nan")) << '\n';
  out.commit();
}

}  // namespace pcwinter
