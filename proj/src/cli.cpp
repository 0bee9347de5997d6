#include "pcwinter/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcwinter/aggregate.hpp"
#include "pcwinter/contribution_tree.hpp"
#include "pcwinter/errors.hpp"
#include "pcwinter/evalharness.hpp"
#include "pcwinter/graph.hpp"
#include "pcwinter/hash.hpp"
#include "pcwinter/textio.hpp"
#include "pcwinter/valuation.hpp"

namespace fs = std::filesystem;

namespace pcwinter {

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--dataset", "dataset", "Dataset directory (edges.tsv, features.csv, labels.csv, split.json)"},
    {"--normalize", "normalize", "L1 row-normalize features (true|false)"},
    {"--depth", "depth", "Computation tree depth K"},
    {"--trunc", "trunc", "Per-depth truncation ratios, e.g. 0.5,0.7"},
    {"--lr", "lr", "Classifier learning rate"},
    {"--epochs", "epochs", "Classifier epochs"},
    {"--weight-decay", "weight_decay", "Classifier L2 penalty"},
    {"--seed", "seed", "Master seed"},
    {"--max-perms", "max_perms", "Maximum number of sampled permutations"},
    {"--max-seconds", "max_seconds", "Wall-clock budget in seconds"},
    {"--window", "window", "Convergence window"},
    {"--tol", "tol", "Convergence tolerance"},
    {"--method", "method", "Valuation method"},
    {"--out", "out", "Output root directory"},
    {"--threads", "threads", "Worker threads"},
    {"--tmc-tol", "tmc_tolerance", "Data Shapley truncation tolerance"},
    {"--checkpoint-every", "checkpoint_every", "Checkpoint interval in permutations (0 = only at the end)"},
    {"--stop-after", "stop_after", "Stop after this many permutations, leaving a resumable checkpoint"},
    {"--step", "step", "Evaluation step fraction"},
    {"--repeats", "repeats", "Evaluation repeats"},
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("bad value '" + text + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError("bad value '" + text + "' for " + key + " (expected true or false)");
}

std::string method_list() {
  std::string out;
  for (const auto& m : kMethods) out += (out.empty() ? "" : ", ") + m;
  return out;
}

bool is_known_key(const std::string& key) {
  for (const auto& f : kFlags) {
    if (key == f.key) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "normalize=" << (normalize ? "true" : "false") << '\n';
  os << "depth=" << depth << '\n';
  os << "trunc=";
  for (std::size_t i = 0; i < trunc.size(); ++i) os << (i ? "," : "") << format_double(trunc[i]);
  os << '\n';
  os << "lr=" << format_double(train.learning_rate) << '\n';
  os << "epochs=" << train.epochs << '\n';
  os << "weight_decay=" << format_double(train.weight_decay) << '\n';
  os << "seed=" << seed << '\n';
  os << "max_perms=" << (max_perms ? std::to_string(*max_perms) : "") << '\n';
  os << "max_seconds=" << (max_seconds ? format_double(*max_seconds) : "") << '\n';
  os << "window=" << window << '\n';
  os << "tol=" << format_double(tol) << '\n';
  os << "method=" << method << '\n';
  os << "tmc_tolerance=" << format_double(tmc_tolerance) << '\n';
  return os.str();
}

ConfigMap read_config_file(const fs::path& file) {
  LineReader in(file);
  ConfigMap out;
  std::string_view line;
  while (in.next(line)) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(in.file(), in.line_number(), "expected key=value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    if (!is_known_key(key)) {
      throw ConfigError(in.file() + ":" + std::to_string(in.line_number()) + ": unknown key '" +
                        key + "'");
    }
    out[key] = trim(std::string_view(text).substr(eq + 1));
  }
  return out;
}

RunConfig resolve_config(const ConfigMap& values) {
  RunConfig c;
  c.threads = std::max(1u, std::thread::hardware_concurrency());
  for (const auto& [key, v] : values) {
    if (key == "dataset") {
      c.dataset = v;
    } else if (key == "normalize") {
      c.normalize = parse_bool(key, v);
    } else if (key == "depth") {
      c.depth = parse_number<int>(key, v);
    } else if (key == "trunc") {
      c.trunc.clear();
      if (!v.empty()) {
        for (auto part : split_fields(v, ',')) c.trunc.push_back(parse_number<double>(key, trim(part)));
      }
    } else if (key == "lr") {
      c.train.learning_rate = parse_number<double>(key, v);
    } else if (key == "epochs") {
      c.train.epochs = parse_number<int>(key, v);
    } else if (key == "weight_decay") {
      c.train.weight_decay = parse_number<double>(key, v);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "max_perms") {
      if (!v.empty()) c.max_perms = parse_number<std::uint64_t>(key, v);
    } else if (key == "max_seconds") {
      if (!v.empty()) c.max_seconds = parse_number<double>(key, v);
    } else if (key == "window") {
      c.window = parse_number<std::size_t>(key, v);
    } else if (key == "tol") {
      c.tol = parse_number<double>(key, v);
    } else if (key == "method") {
      c.method = v;
    } else if (key == "out") {
      c.out = v;
    } else if (key == "threads") {
      c.threads = parse_number<unsigned>(key, v);
    } else if (key == "tmc_tolerance") {
      c.tmc_tolerance = v == "inf" ? std::numeric_limits<double>::infinity() : parse_number<double>(key, v);
    } else if (key == "checkpoint_every") {
      c.checkpoint_every = parse_number<std::uint64_t>(key, v);
    } else if (key == "stop_after") {
      c.stop_after = parse_number<std::uint64_t>(key, v);
    } else if (key == "step") {
      c.step = parse_number<double>(key, v);
    } else if (key == "repeats") {
      c.repeats = parse_number<unsigned>(key, v);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  if (std::find(kMethods.begin(), kMethods.end(), c.method) == kMethods.end()) {
    throw UsageError("unknown method '" + c.method + "'; valid methods: " + method_list());
  }
  if (c.depth < 1) throw ConfigError("depth must be >= 1");
  TruncationRatios(c.trunc);  // validates the range
  c.train.validate();
  if (c.max_perms && *c.max_perms == 0) throw ConfigError("max_perms must be > 0");
  if (c.max_seconds && !(*c.max_seconds > 0.0)) throw ConfigError("max_seconds must be > 0");
  if (c.window < 1) throw ConfigError("window must be >= 1");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (!(c.tmc_tolerance >= 0.0)) throw ConfigError("tmc_tolerance must be >= 0");
  if (!(c.step > 0.0 && c.step <= 1.0)) throw ConfigError("step must lie in (0, 1]");
  if (c.repeats < 1) throw ConfigError("repeats must be >= 1");
  return c;
}

void write_config_file(const RunConfig& cfg, const fs::path& file) {
  AtomicFile out(file);
  out.stream() << "dataset=" << fs::absolute(cfg.dataset).string() << '\n' << cfg.canonical();
  out.stream() << "checkpoint_every=" << cfg.checkpoint_every << '\n';
  out.stream() << "step=" << format_double(cfg.step) << '\n';
  out.stream() << "repeats=" << cfg.repeats << '\n';
  out.commit();
}

fs::path output_root(const fs::path& explicit_root) {
  if (!explicit_root.empty()) return explicit_root;
  if (const char* env = std::getenv("PCWINTER_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

// ---------------------------------------------------------------------------

namespace {

struct Workspace {
  std::unique_ptr<Dataset> data;
  std::unique_ptr<SplitViews> views;
  std::uint64_t fingerprint = 0;
};

Workspace load_workspace(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw UsageError("--dataset is required");
  DatasetPaths paths = DatasetPaths::in_directory(cfg.dataset);
  paths.normalize_features = cfg.normalize;
  Workspace ws;
  ws.data = std::make_unique<Dataset>(load_dataset(paths));
  ws.views = std::make_unique<SplitViews>(inductive_split(ws.data->graph, ws.data->split));
  ws.fingerprint = ws.data->fingerprint();
  const auto& st = ws.data->stats;
  if (st.cleanup.duplicates || st.cleanup.self_loops) {
    std::cerr << "note: merged " << st.cleanup.duplicates << " duplicate edges, dropped "
              << st.cleanup.self_loops << " self-loops\n";
  }
  return ws;
}

std::uint64_t config_hash(const RunConfig& cfg, std::uint64_t dataset_fp) {
  Fnv1a h;
  h.update(cfg.canonical());
  h.update_value(dataset_fp);
  return h.digest();
}

void write_json(const nlohmann::json& doc, const fs::path& file) {
  AtomicFile out(file);
  out.stream() << doc.dump(2) << '\n';
  out.commit();
}

nlohmann::json base_manifest(const std::string& command, const RunConfig& cfg,
                             std::uint64_t dataset_fp, std::uint64_t cfg_hash) {
  nlohmann::json m;
  m["command"] = command;
  m["method"] = cfg.method;
  m["dataset_fingerprint"] = hex64(dataset_fp);
  m["config_hash"] = hex64(cfg_hash);
  m["seed"] = cfg.seed;
  return m;
}

std::vector<ValueRow> node_rows(const NodeValueTable& table, std::uint64_t count) {
  std::vector<ValueRow> rows;
  for (const auto& [v, x] : table) rows.push_back({"node", std::to_string(v), x, count});
  return rows;
}

std::vector<ValueRow> edge_rows(const EdgeValueTable& table, std::uint64_t count) {
  std::vector<ValueRow> rows;
  for (const auto& [e, x] : table) rows.push_back({"edge", edge_id(e), x, count});
  return rows;
}

struct ValueOutputs {
  std::vector<ValueRow> rows;
  std::optional<NodeValueTable> nodes;
  std::optional<EdgeValueTable> edges;
};

void write_value_outputs(const ValueOutputs& out, const fs::path& dir) {
  write_values_csv(out.rows, dir / "values.csv");
  if (out.nodes) write_node_values_csv(*out.nodes, dir / "node_values.csv");
  if (out.edges) write_edge_values_csv(*out.edges, dir / "edge_values.csv");
}

ValueOutputs pc_winter_outputs(const ContributionTree& tree, const StreamState& state) {
  ValueOutputs out;
  const auto values = state.acc.values();
  for (PlayerIndex p = 0; p < tree.num_players(); ++p) {
    out.rows.push_back({"player", path_id(tree.path(p)), values[p], state.acc.counts()[p]});
  }
  out.nodes = node_values(tree, values);
  out.edges = edge_values(tree, values);
  std::map<NodeId, std::uint64_t> node_dups;
  std::map<Edge, std::uint64_t> edge_dups;
  for (PlayerIndex p = 0; p < tree.num_players(); ++p) {
    ++node_dups[player_node(tree, p)];
    if (auto e = player_edge(tree, p)) ++edge_dups[*e];
  }
  for (const auto& [v, x] : *out.nodes) out.rows.push_back({"node", std::to_string(v), x, node_dups[v]});
  for (const auto& [e, x] : *out.edges) out.rows.push_back({"edge", edge_id(e), x, edge_dups[e]});
  return out;
}

StreamOptions stream_options(const RunConfig& cfg) {
  StreamOptions o;
  o.budget.max_traversals = cfg.max_perms;
  if (cfg.max_seconds) o.budget.max_wall_clock = std::chrono::duration<double>(*cfg.max_seconds);
  o.convergence.window = cfg.window;
  o.convergence.tolerance = cfg.tol;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  o.stop_after = cfg.stop_after;
  o.checkpoint_every = cfg.checkpoint_every;
  return o;
}

int finish_stream(const std::string& method, const StreamState& state, const fs::path& dir,
                  nlohmann::json manifest) {
  const RunReport report = make_report(method, state);
  write_run_report(report, dir / "report.csv");
  manifest["traversals"] = state.traversals;
  manifest["stop_reason"] = to_string(state.stop);
  manifest["converged"] = state.converged();
  write_json(manifest, dir / "manifest.json");
  std::cerr << method << ": " << state.traversals << " permutations, "
            << format_double(report.retrainings_per_traversal, 6) << " retrainings each, stop="
            << to_string(state.stop) << '\n';
  if (state.stop == StopReason::interrupted) {
    std::cerr << "interrupted; continue with: resume --checkpoint " << (dir / "checkpoint.bin").string()
              << '\n';
    return kExitOk;
  }
  if (!state.converged()) {
    std::cerr << "budget exhausted before convergence; partial values written\n";
    return kExitBudget;
  }
  return kExitOk;
}

// Runs (or resumes) a valuation method into `dir`.
int run_value(const RunConfig& cfg, const Workspace& ws, const fs::path& dir,
              std::optional<Checkpoint> resume) {
  const Graph& g = ws.data->graph;
  const SplitViews& views = *ws.views;
  const auto& labeled = ws.data->split.labeled_train;
  const std::uint64_t cfg_hash = config_hash(cfg, ws.fingerprint);
  const CheckpointHeader header{ws.fingerprint, cfg_hash};
  nlohmann::json manifest = base_manifest("value", cfg, ws.fingerprint, cfg_hash);
  std::optional<StreamState> resume_state;
  if (resume) resume_state = std::move(resume->state);

  const auto stream_with_checkpoint = [&] {
    StreamOptions o = stream_options(cfg);
    o.on_checkpoint = [&](const StreamState& s) { checkpoint_save(s, header, dir / "checkpoint.bin"); };
    return o;
  };
  EvalSet validation = precompute_validation_representations(views.val, cfg.depth);

  const std::string& m = cfg.method;
  if (m == "pc-winter" || m == "pc-winter-l" || m == "pc-winter-p") {
    const ContributionTree tree = ContributionTree::build(views.train, labeled, cfg.depth);
    tree.write_players_csv(dir / "players.csv");
    SgcTreeGame game(tree, g, std::move(validation), cfg.train);
    PcWinterOptions opt;
    opt.sampler = m == "pc-winter"     ? PermutationSampler::dfs
                  : m == "pc-winter-l" ? PermutationSampler::level_only
                                       : PermutationSampler::precedence_only;
    opt.ratios = TruncationRatios(cfg.trunc);
    opt.stream = stream_with_checkpoint();
    const StreamState state = run_pc_winter(game, tree, opt, std::move(resume_state));
    write_value_outputs(pc_winter_outputs(tree, state), dir);
    manifest["players"] = tree.num_players();
    return finish_stream(m, state, dir, manifest);
  }
  if (m == "data-shapley") {
    const auto players = data_shapley_players(views.train, labeled, cfg.depth);
    ViewUtility u(labeled, std::move(validation), cfg.depth, cfg.train);
    NodeSetUtility utility = [&](std::span<const NodeId> nodes) {
      std::vector<NodeId> sorted(nodes.begin(), nodes.end());
      std::sort(sorted.begin(), sorted.end());
      return u(InductiveView::induced(g, sorted));
    };
    TmcOptions opt;
    opt.tolerance = cfg.tmc_tolerance;
    opt.stream = stream_with_checkpoint();
    const StreamState state = run_data_shapley_tmc(players, utility, opt, std::move(resume_state));
    ValueOutputs out;
    out.nodes.emplace();
    for (std::size_t i = 0; i < players.size(); ++i) {
      (*out.nodes)[players[i]] = state.acc.value(i);
      out.rows.push_back({"node", std::to_string(players[i]), state.acc.value(i), state.acc.counts()[i]});
    }
    write_value_outputs(out, dir);
    return finish_stream(m, state, dir, manifest);
  }

  ValueOutputs out;
  if (m == "loo-node" || m == "loo-edge") {
    ViewUtility u(labeled, std::move(validation), cfg.depth, cfg.train);
    if (m == "loo-node") {
      out.nodes = run_loo_nodes(views.train, u, views.train.kept_ids());
    } else {
      out.edges = run_loo_edges(views.train, u);
    }
  } else if (m == "degree") {
    out.nodes = degree_values(views.train);
  } else if (m == "random") {
    out.nodes = random_values(views.train.kept_ids(), cfg.seed);
  } else if (m == "betweenness") {
    out.edges = edge_betweenness(views.train);
  }
  if (out.nodes) out.rows = node_rows(*out.nodes, 1);
  if (out.edges) out.rows = edge_rows(*out.edges, 1);
  write_value_outputs(out, dir);
  write_json(manifest, dir / "manifest.json");
  return kExitOk;
}

fs::path run_directory(const RunConfig& cfg, std::uint64_t hash) {
  const std::string h = hex64(hash);
  return output_root(cfg.out) / (cfg.method + "-" + h.substr(0, 16));
}

int cmd_value(const RunConfig& cfg) {
  const Workspace ws = load_workspace(cfg);
  const fs::path dir = run_directory(cfg, config_hash(cfg, ws.fingerprint));
  fs::create_directories(dir);
  write_config_file(cfg, dir / "config.txt");
  std::cerr << "output: " << dir.string() << '\n';
  return run_value(cfg, ws, dir, std::nullopt);
}

int cmd_resume(const fs::path& checkpoint, const ConfigMap& overrides) {
  const fs::path dir = checkpoint.parent_path();
  ConfigMap values = read_config_file(dir / "config.txt");
  for (const auto& [k, v] : overrides) {
    if (k != "dataset" && k != "threads" && k != "checkpoint_every") {
      throw UsageError("resume accepts only --dataset, --threads and --checkpoint-every");
    }
    values[k] = v;
  }
  RunConfig cfg = resolve_config(values);
  if (cfg.method != "pc-winter" && cfg.method != "pc-winter-l" && cfg.method != "pc-winter-p" &&
      cfg.method != "data-shapley") {
    throw UsageError("method " + cfg.method + " has no resumable state");
  }
  const Workspace ws = load_workspace(cfg);
  Checkpoint cp = checkpoint_load(checkpoint);
  const CheckpointHeader expected{ws.fingerprint, config_hash(cfg, ws.fingerprint)};
  if (cp.header.dataset_fingerprint != expected.dataset_fingerprint) {
    throw IntegrityError("checkpoint was written for a different dataset");
  }
  if (cp.header.config_fingerprint != expected.config_fingerprint) {
    throw IntegrityError("checkpoint was written for a different configuration");
  }
  if (cp.state.finished()) {
    std::cerr << "run already complete (" << to_string(cp.state.stop) << "); nothing to do\n";
    return kExitOk;
  }
  std::cerr << "resuming at permutation " << cp.state.traversals << '\n';
  return run_value(cfg, ws, dir, std::move(cp));
}

int cmd_ingest(const RunConfig& cfg) {
  const Workspace ws = load_workspace(cfg);
  const Graph& g = ws.data->graph;
  const fs::path dir = output_root(cfg.out) / ("dataset-" + hex64(ws.fingerprint).substr(0, 16));
  save_dataset(*ws.data, dir);
  nlohmann::json doc;
  doc["source"] = fs::absolute(cfg.dataset).string();
  doc["dataset_fingerprint"] = hex64(ws.fingerprint);
  doc["normalized"] = cfg.normalize;
  doc["nodes"] = g.num_nodes();
  doc["edges"] = g.num_edges();
  doc["features"] = g.num_features();
  doc["classes"] = g.num_classes();
  doc["edge_lines"] = ws.data->stats.edge_lines;
  doc["duplicate_edges"] = ws.data->stats.cleanup.duplicates;
  doc["self_loops"] = ws.data->stats.cleanup.self_loops;
  const auto& s = ws.data->split;
  doc["split"] = {{"train", s.train.size()},
                  {"val", s.val.size()},
                  {"test", s.test.size()},
                  {"labeled_train", s.labeled_train.size()}};
  write_json(doc, dir / "ingest.json");
  std::cout << dir.string() << '\n';
  return kExitOk;
}

int cmd_aggregate(const fs::path& values_file, const fs::path& out_dir) {
  std::vector<PathValue> players;
  for (const auto& row : read_values_csv(values_file)) {
    if (row.entity_type == "player") players.push_back({parse_path_id(row.entity_id), row.value});
  }
  if (players.empty()) throw ValidationError(values_file.string() + " holds no player rows");
  const fs::path dir = out_dir.empty() ? values_file.parent_path() : out_dir;
  if (!dir.empty()) fs::create_directories(dir);
  write_node_values_csv(node_values(players), dir / "node_values.csv");
  write_edge_values_csv(edge_values(players), dir / "edge_values.csv");
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const fs::path& values_file, const std::string& experiment,
             const std::string& filter_name) {
  if (experiment != "drop-nodes" && experiment != "add-edges") {
    throw UsageError("unknown experiment '" + experiment + "' (expected drop-nodes or add-edges)");
  }
  const DropFilter filter = parse_drop_filter(filter_name);
  const Workspace ws = load_workspace(cfg);

  std::string method = "unknown";
  const fs::path manifest_file = values_file.parent_path() / "manifest.json";
  if (fs::exists(manifest_file)) {
    const auto doc = nlohmann::json::parse(read_file(manifest_file));
    if (doc.value("dataset_fingerprint", std::string()) != hex64(ws.fingerprint)) {
      throw IntegrityError("values in " + values_file.string() + " were computed on a different dataset");
    }
    method = doc.value("method", method);
  } else {
    std::cerr << "warning: no manifest next to " << values_file.string()
              << "; dataset hash not checked\n";
  }

  NodeValueTable nodes;
  EdgeValueTable edges;
  for (const auto& row : read_values_csv(values_file)) {
    if (row.entity_type == "node") nodes[parse_path_id(row.entity_id).at(0)] = row.value;
    if (row.entity_type == "edge") edges[parse_edge_id(row.entity_id)] = row.value;
  }

  EvalModel model;
  model.labeled = ws.data->split.labeled_train;
  model.test = precompute_validation_representations(ws.views->test, cfg.depth);
  model.depth = cfg.depth;
  model.train = cfg.train;
  std::vector<std::uint64_t> seeds;
  for (unsigned r = 0; r < cfg.repeats; ++r) seeds.push_back(cfg.seed + r);

  ExperimentCurve curve = experiment == "drop-nodes"
                              ? drop_nodes_experiment(ws.views->train, nodes, filter, model, cfg.step, seeds)
                              : add_edges_experiment(ws.views->train, edges, model, cfg.step, seeds);
  curve.method = method;

  Fnv1a h;
  h.update(cfg.canonical());
  h.update(experiment);
  h.update(to_string(filter));
  h.update(format_double(cfg.step));
  h.update_value(cfg.repeats);
  h.update(read_file(values_file));
  h.update_value(ws.fingerprint);
  const fs::path dir = output_root(cfg.out) / ("eval-" + hex64(h.digest()).substr(0, 16));
  fs::create_directories(dir);
  curve_export(curve, dir / "curve.csv");

  nlohmann::json m;
  m["command"] = "eval";
  m["experiment"] = experiment;
  if (experiment == "drop-nodes") m["filter"] = to_string(filter);
  m["method"] = method;
  m["values"] = fs::absolute(values_file).string();
  m["seeds"] = seeds;
  m["step"] = cfg.step;
  m["dataset_fingerprint"] = hex64(ws.fingerprint);
  write_json(m, dir / "manifest.json");
  std::cout << (dir / "curve.csv").string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Graph data valuation with precedence-constrained Winter values"};
  app.require_subcommand(1);

  struct Bound {
    std::string value;
    CLI::Option* option = nullptr;
    const char* key = nullptr;
  };
  auto bind_flags = [](CLI::App* cmd, std::vector<Bound>& slots, std::string& config_file) {
    cmd->add_option("--config", config_file, "Flat key=value config file");
    slots.resize(std::size(kFlags));
    for (std::size_t i = 0; i < std::size(kFlags); ++i) {
      slots[i].key = kFlags[i].key;
      slots[i].option = cmd->add_option(kFlags[i].flag, slots[i].value, kFlags[i].help);
    }
  };

  std::vector<Bound> value_flags, eval_flags, ingest_flags, resume_flags;
  std::string value_cfg, eval_cfg, ingest_cfg, resume_cfg;

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and write a canonical copy");
  bind_flags(ingest, ingest_flags, ingest_cfg);

  auto* value = app.add_subcommand("value", "Compute data values with one method");
  bind_flags(value, value_flags, value_cfg);

  std::string agg_values, agg_out;
  auto* aggregate = app.add_subcommand("aggregate", "Sum player values into node and edge values");
  aggregate->add_option("--values", agg_values, "values.csv with player rows")->required();
  aggregate->add_option("--out", agg_out, "Output directory (default: next to the values file)");

  std::string eval_values, experiment, filter = "unlabeled";
  auto* eval = app.add_subcommand("eval", "Node-dropping or edge-adding experiment");
  bind_flags(eval, eval_flags, eval_cfg);
  eval->add_option("--values", eval_values, "values.csv of a valuation run")->required();
  eval->add_option("--experiment", experiment, "drop-nodes or add-edges")->required();
  eval->add_option("--filter", filter, "unlabeled, labeled or mixed (drop-nodes)");

  std::string checkpoint;
  auto* resume = app.add_subcommand("resume", "Continue an interrupted valuation run");
  resume->add_option("--checkpoint", checkpoint, "checkpoint.bin of the run")->required();
  bind_flags(resume, resume_flags, resume_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto gather = [](const std::vector<Bound>& slots, const std::string& config_file) {
    ConfigMap values;
    if (!config_file.empty()) values = read_config_file(config_file);
    for (const auto& s : slots) {
      if (s.option->count() > 0) values[s.key] = s.value;
    }
    return values;
  };

  try {
    if (*ingest) return cmd_ingest(resolve_config(gather(ingest_flags, ingest_cfg)));
    if (*value) return cmd_value(resolve_config(gather(value_flags, value_cfg)));
    if (*aggregate) return cmd_aggregate(agg_values, agg_out);
    if (*eval) {
      return cmd_eval(resolve_config(gather(eval_flags, eval_cfg)), eval_values, experiment, filter);
    }
    if (*resume) return cmd_resume(checkpoint, gather(resume_flags, resume_cfg));
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const LookupError& e) {
    std::cerr << "lookup error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitUsage;
}

}  // namespace pcwinter
