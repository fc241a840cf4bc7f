#include "cli.hpp"

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "promptsel/promptsel.hpp"

namespace promptsel::cli {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::format:
      return kExitParse;
    case ErrorKind::config:
      return kExitConfig;
    case ErrorKind::transport:
    case ErrorKind::request:
    case ErrorKind::retrieval:
      return kExitTransport;
    case ErrorKind::scheme_violation:
    case ErrorKind::integrity:
    case ErrorKind::alignment:
    case ErrorKind::domain:
    case ErrorKind::normalization:
    case ErrorKind::render:
    case ErrorKind::oracle:
      return kExitValidation;
  }
  return kExitInternal;
}

namespace {

// Flags shared by the pipeline commands; each overrides the config key of
// the same meaning when given.
struct CommonFlags {
  std::string config_path;
  std::string task;
  std::optional<std::size_t> k;
  std::string weights;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::string endpoint;
  std::string provider;
  std::optional<std::size_t> jobs;
  bool resume = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "TOML config file");
  cmd->add_option("--task", f.task, "Task preset: ner, chunk or pos");
  cmd->add_option("--k", f.k, "Examples per prompt");
  cmd->add_option("--weights", f.weights, "Weights w1,w2,w3 (length, entropy, similarity)");
  cmd->add_option("--strategy", f.strategy, "cp, knn or static");
  cmd->add_option("--seed", f.seed, "Seed for sampling and shuffles");
  cmd->add_option("--endpoint", f.endpoint, "Completion endpoint URL");
  cmd->add_option("--provider", f.provider, "Embedding provider id ('hash' for the offline embedder)");
  cmd->add_option("--jobs", f.jobs, "Worker threads");
  cmd->add_flag("--resume", f.resume, "Reuse predictions whose prompt hash is unchanged");
}

KeyValueConfig load_config(const CommonFlags& f) {
  KeyValueConfig cfg = f.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(f.config_path);
  if (!f.task.empty()) cfg.set("task", f.task);
  if (f.k) cfg.set("k", std::to_string(*f.k));
  if (!f.weights.empty()) cfg.set("weights", f.weights);
  if (!f.strategy.empty()) cfg.set("strategy", f.strategy);
  if (f.seed) cfg.set("seed", std::to_string(*f.seed));
  if (!f.endpoint.empty()) cfg.set("endpoint", f.endpoint);
  if (!f.provider.empty()) cfg.set("provider", f.provider);
  if (f.jobs) cfg.set("jobs", std::to_string(*f.jobs));
  if (f.resume) cfg.set("resume", "true");
  return cfg;
}

Task config_task(const KeyValueConfig& cfg) {
  auto name = cfg.get("task");
  if (!name) name = cfg.get("preset");
  if (!name) throw Error(ErrorKind::config, "no task given (use --task or 'task = ...')");
  return parse_task(*name);
}

std::string required(const KeyValueConfig& cfg, std::string_view key) {
  auto v = cfg.get(key);
  if (!v || v->empty()) throw Error(ErrorKind::config, "config key '" + std::string(key) + "' is required");
  return *v;
}

std::optional<std::string> env_value(const std::string& name) {
  if (name.empty()) return std::nullopt;
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

Weights parse_weights(std::string_view text) {
  const auto parts = split_list(text);
  if (parts.size() != 3) throw Error(ErrorKind::config, "weights need exactly three values w1,w2,w3");
  return {parse_double(parts[0], "w1"), parse_double(parts[1], "w2"), parse_double(parts[2], "w3")};
}

SelectionConfig selection_config(const KeyValueConfig& cfg, Task task) {
  SelectionConfig sel = SelectionConfig::preset(task);
  if (auto w = cfg.get("weights")) sel.weights = parse_weights(*w);
  sel.k = cfg.get_size("k", sel.k);
  sel.temperature = cfg.get_double("temperature", sel.temperature);
  sel.provider_id = cfg.get_string("provider", sel.provider_id);
  sel.exclude_duplicates = cfg.get_bool("exclude_duplicates", false);
  sel.validate();
  return sel;
}

std::size_t default_tag_column(Task task) { return task == Task::chunk ? 2 : 3; }

CorpusSplit load_split(const std::string& path, Task task, SplitName name, const KeyValueConfig& cfg,
                       IngestLog* log = nullptr) {
  const auto scheme = LabelScheme::for_task(task);
  const std::string text = read_file(path);
  const std::string format = cfg.get_string("format", task == Task::pos ? "conllu" : "conll");
  if (format == "conllu") return parse_conllu(text, scheme, name, log);
  if (format != "conll") throw Error(ErrorKind::config, "unknown corpus format '" + format + "'");
  ConllOptions options;
  options.tag_column = cfg.get_size("tag_column", default_tag_column(task));
  options.split = name;
  const std::string policy = cfg.get_string("bio_policy", "repair");
  if (policy == "reject") {
    options.bio_policy = BioPolicy::reject;
  } else if (policy != "repair") {
    throw Error(ErrorKind::config, "bio_policy must be repair or reject");
  }
  return parse_conll(text, scheme, options, log);
}

std::uint64_t config_seed(const KeyValueConfig& cfg) { return cfg.get_u64("seed", kDefaultSeed); }

CorpusSplit load_test(const KeyValueConfig& cfg, Task task, std::string_view key = "test") {
  auto split = load_split(required(cfg, key), task, key == "dev" ? SplitName::dev : SplitName::test, cfg);
  if (auto n = cfg.get("test_sample"); n && key == "test") {
    return sample_test_subset(split, parse_size(*n, "test_sample"), config_seed(cfg));
  }
  return split;
}

// Embedding provider, cache and front end with a shared lifetime.
struct EmbeddingStack {
  std::unique_ptr<EmbeddingProvider> provider;
  std::unique_ptr<EmbeddingCache> cache;
  std::unique_ptr<Embedder> embedder;
};

EmbeddingStack make_embedding_stack(const KeyValueConfig& cfg) {
  EmbeddingStack stack;
  const std::string provider = cfg.get_string("provider", kDefaultProviderId);
  const std::size_t dim = cfg.get_size("embedding_dim", kDefaultEmbeddingDim);
  if (provider == "hash") {
    stack.provider = std::make_unique<HashEmbedder>(dim, cfg.get_u64("embedding_seed", 0));
  } else if (auto vectors = cfg.get("embedding_vectors")) {
    stack.provider = std::make_unique<VectorFileProvider>(provider, *vectors);
  } else if (auto url = cfg.get("embedding_endpoint")) {
    RemoteEmbeddingOptions options;
    options.url = *url;
    options.provider_id = provider;
    options.dim = dim;
    options.batch_size = cfg.get_size("embedding_batch", options.batch_size);
    options.max_retries = static_cast<int>(cfg.get_size("max_retries", 3));
    options.auth_token =
        env_value(cfg.get_string("embedding_api_key_env", "PROMPTSEL_EMBED_API_KEY")).value_or("");
    stack.provider = std::make_unique<RemoteEmbeddingProvider>(std::move(options));
  } else {
    throw Error(ErrorKind::config, "provider '" + provider +
                                       "' needs embedding_endpoint or embedding_vectors "
                                       "(or use provider = hash)");
  }
  auto cache_path = cfg.get("embedding_cache");
  stack.cache = cache_path ? std::make_unique<EmbeddingCache>(*cache_path) : std::make_unique<EmbeddingCache>();
  stack.embedder = std::make_unique<Embedder>(*stack.provider, *stack.cache,
                                              cfg.get_size("max_in_flight", 4));
  return stack;
}

// Owns the completion client chain (base client, optional recorder).
struct ClientStack {
  std::unique_ptr<CompletionClient> base;
  std::unique_ptr<CompletionClient> recorder;

  CompletionClient& get() { return recorder ? *recorder : *base; }
};

std::string client_kind(const KeyValueConfig& cfg) {
  if (cfg.contains("replay")) return "replay";
  return cfg.get_string("client", cfg.contains("endpoint") ? "http" : "oracle");
}

ClientStack make_client(const KeyValueConfig& cfg, const CorpusSplit& gold, Task task) {
  ClientStack stack;
  const std::string kind = client_kind(cfg);
  if (kind == "oracle" || kind == "noisy") {
    const double noise = cfg.get_double("noise", kind == "noisy" ? 0.2 : 0.0);
    stack.base = std::make_unique<OracleClient>(gold, noise, config_seed(cfg));
  } else if (kind == "lookup") {
    stack.base = std::make_unique<DemonstrationLookupClient>(LabelScheme::for_task(task));
  } else if (kind == "replay") {
    stack.base = std::make_unique<ReplayClient>(required(cfg, "replay"));
  } else if (kind == "http") {
    HttpClientOptions options;
    options.url = required(cfg, "endpoint");
    options.api_key = env_value(cfg.get_string("api_key_env", "PROMPTSEL_API_KEY")).value_or("");
    options.model = cfg.get_string("model", "");
    options.chat_wrap = cfg.get_bool("chat_wrap", false);
    options.max_retries = static_cast<int>(cfg.get_size("max_retries", 4));
    options.requests_per_interval = cfg.get_size("requests_per_minute", 0);
    options.interval = std::chrono::milliseconds(60000);
    stack.base = std::make_unique<HttpCompletionClient>(std::move(options));
  } else {
    throw Error(ErrorKind::config, "unknown client '" + kind + "' (oracle, noisy, lookup, http, replay)");
  }
  if (auto record = cfg.get("record")) stack.recorder = std::make_unique<RecordingClient>(*stack.base, *record);
  return stack;
}

RunOptions run_options(const KeyValueConfig& cfg, Task task) {
  RunOptions run;
  run.strategy = parse_strategy(cfg.get_string("strategy", "cp"));
  run.selection = selection_config(cfg, task);
  for (const auto& id : cfg.get_list("static_ids")) run.static_ids.push_back(parse_size(id, "static_ids"));
  run.order = parse_example_order(cfg.get_string("order", "descending"));
  run.seed = config_seed(cfg);
  run.jobs = cfg.get_size("jobs", 1);
  const std::string start = cfg.get_string("completion_start", "same_line");
  if (start == "new_line") {
    run.decode.format.completion_start = CompletionStart::new_line;
  } else if (start != "same_line") {
    throw Error(ErrorKind::config, "completion_start must be same_line or new_line");
  }
  run.decode.max_tokens = static_cast<int>(cfg.get_size("max_tokens", 8));
  run.decode.temperature = cfg.get_double("temperature_plm", 0.0);
  return run;
}

std::ofstream open_output(const std::string& path) {
  if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path + "'");
  return out;
}

// ---- commands ------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> paths;
  std::string task;
  std::optional<std::size_t> tag_column;
  std::string format;
  std::string bio_policy;
  std::string jsonl;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  KeyValueConfig cfg;
  const Task task = parse_task(a.task);
  if (a.tag_column) cfg.set("tag_column", std::to_string(*a.tag_column));
  if (!a.format.empty()) cfg.set("format", a.format);
  if (!a.bio_policy.empty()) cfg.set("bio_policy", a.bio_policy);
  std::ofstream jsonl;
  if (!a.jsonl.empty()) jsonl = open_output(a.jsonl);
  for (const auto& path : a.paths) {
    IngestLog log;
    const auto split = load_split(path, task, SplitName::train, cfg, &log);
    std::map<std::string, std::size_t> label_counts;
    std::size_t max_len = 0;
    for (const auto& s : split.sentences()) {
      for (const auto& l : s.labels) ++label_counts[l];
      max_len = std::max(max_len, s.size());
    }
    out << path << '\n';
    out << "  task: " << to_string(task) << "  sentences: " << split.size()
        << "  tokens: " << split.token_count() << "  max length: " << max_len << '\n';
    out << "  documents skipped: " << log.skipped_documents
        << "  BIO repairs: " << log.repaired_transitions
        << "  rejected: " << log.rejected_sentences << "  skipped nodes: " << log.skipped_nodes << '\n';
    out << "  labels (" << label_counts.size() << "):";
    for (const auto& [label, n] : label_counts) out << ' ' << label << '=' << n;
    out << '\n';
    if (jsonl.is_open()) write_jsonl(split, jsonl);
  }
  return kExitOk;
}

struct EmbedArgs {
  CommonFlags common;
  std::vector<std::string> splits{"train", "test"};
};

int cmd_embed(const EmbedArgs& a, std::ostream& out) {
  const auto cfg = load_config(a.common);
  const Task task = config_task(cfg);
  auto stack = make_embedding_stack(cfg);
  for (const auto& key : a.splits) {
    if (key != "train" && key != "dev" && key != "test") {
      throw Error(ErrorKind::config, "unknown split '" + key + "'");
    }
    const auto split = key == "train" ? load_split(required(cfg, "train"), task, SplitName::train, cfg)
                                      : load_test(cfg, task, key);
    const auto before = stack.embedder->stats();
    const auto vectors = stack.embedder->embed_all(split);
    const auto after = stack.embedder->stats();
    const std::size_t hits = after.hits - before.hits;
    const std::size_t misses = after.misses - before.misses;
    out << key << ": " << split.size() << " sentences, " << hits << " hits, " << misses
        << " misses, dim " << (vectors.empty() ? 0 : vectors.front().dim()) << ", hit rate "
        << std::fixed << std::setprecision(1)
        << (split.empty() ? 100.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(split.size()))
        << "%\n";
    out.unsetf(std::ios::fixed);
  }
  out << "cache entries: " << stack.cache->size() << "  provider: " << stack.provider->id() << '\n';
  return kExitOk;
}

// Pool, test split and embeddings shared by select/run.
struct PipelineInputs {
  Task task;
  std::unique_ptr<CorpusSplit> pool_split;
  std::unique_ptr<CorpusSplit> test;
  std::unique_ptr<CandidatePool> pool;
  std::vector<EmbeddingVector> test_embeddings;
};

PipelineInputs load_pipeline(const KeyValueConfig& cfg, Strategy strategy, std::string_view test_key) {
  PipelineInputs in;
  in.task = config_task(cfg);
  in.pool_split = std::make_unique<CorpusSplit>(load_split(required(cfg, "train"), in.task, SplitName::train, cfg));
  in.test = std::make_unique<CorpusSplit>(load_test(cfg, in.task, test_key));
  std::vector<EmbeddingVector> pool_embeddings;
  if (strategy != Strategy::static_examples) {
    auto stack = make_embedding_stack(cfg);
    pool_embeddings = stack.embedder->embed_all(*in.pool_split);
    in.test_embeddings = stack.embedder->embed_all(*in.test);
  }
  in.pool = std::make_unique<CandidatePool>(*in.pool_split, std::move(pool_embeddings));
  return in;
}

struct SelectArgs {
  CommonFlags common;
  std::string output = "selections.jsonl";
  std::string dump_scores;
};

int cmd_select(const SelectArgs& a, std::ostream& out) {
  const auto cfg = load_config(a.common);
  const auto options = run_options(cfg, config_task(cfg));
  auto in = load_pipeline(cfg, options.strategy, "test");
  auto file = open_output(a.output);
  std::ofstream dump;
  if (!a.dump_scores.empty()) dump = open_output(a.dump_scores);
  std::size_t total = 0;
  for (const auto& test : in.test->sentences()) {
    const EmbeddingVector* emb = in.test_embeddings.empty() ? nullptr : &in.test_embeddings[test.id];
    const auto ids = select_examples(test, emb, *in.pool, options);
    if (dump.is_open() && options.strategy == Strategy::cp) {
      write_score_dump(test.id, in.pool->score(test, *emb, options.selection), dump);
    }
    total += ids.size();
    std::ostringstream line;
    line << R"({"test_id":)" << test.id << R"(,"strategy":")" << to_string(options.strategy)
         << R"(","example_ids":[)";
    for (std::size_t i = 0; i < ids.size(); ++i) line << (i ? "," : "") << ids[i];
    line << "]}";
    file << line.str() << '\n';
  }
  out << "selected " << total << " examples for " << in.test->size() << " test sentences (k="
      << options.selection.k << ", strategy=" << to_string(options.strategy) << ") -> " << a.output
      << '\n';
  return kExitOk;
}

struct RunArgs {
  CommonFlags common;
  std::string output;
  std::string prompts_dir;
  std::string client;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  auto cfg = load_config(a.common);
  if (!a.client.empty()) cfg.set("client", a.client);
  auto options = run_options(cfg, config_task(cfg));
  auto in = load_pipeline(cfg, options.strategy, "test");
  const std::string output = a.output.empty() ? cfg.get_string("predictions", "predictions.jsonl") : a.output;

  std::optional<PredictionSet> previous;
  if (cfg.get_bool("resume", false) && std::filesystem::exists(output)) {
    std::ifstream prev(output);
    previous = read_predictions(prev, in.task);
    options.resume = &*previous;
  }
  const std::string prompts_dir = a.prompts_dir.empty() ? cfg.get_string("prompts_dir", "") : a.prompts_dir;
  if (!prompts_dir.empty()) {
    std::filesystem::create_directories(prompts_dir);
    options.on_prompt = [&](const RenderedPrompt& p) {
      std::ofstream f(std::filesystem::path(prompts_dir) / (std::to_string(p.test_id) + ".txt"),
                      std::ios::binary);
      f << p.text;
    };
  }
  auto client = make_client(cfg, *in.test, in.task);
  const auto predictions = run_task(*in.test, in.test_embeddings, *in.pool, client.get(), options);
  {
    auto file = open_output(output);
    write_predictions(predictions, file);
  }
  out << "predictions: " << predictions.predictions.size() << " sentences, "
      << predictions.failures.size() << " failed -> " << output << '\n';
  write_report_table(evaluate(predictions, *in.test), out);
  return kExitOk;
}

struct EvalArgs {
  std::string predictions;
  std::string gold;
  std::string task;
  std::string config_path;
  std::optional<std::size_t> tag_column;
  std::string format;
  bool json = false;
  bool errors = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  KeyValueConfig cfg = a.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config_path);
  if (!a.task.empty()) cfg.set("task", a.task);
  if (a.tag_column) cfg.set("tag_column", std::to_string(*a.tag_column));
  if (!a.format.empty()) cfg.set("format", a.format);
  const Task task = config_task(cfg);
  const std::string gold_path = a.gold.empty() ? required(cfg, "test") : a.gold;
  const auto gold = a.gold.empty() ? load_test(cfg, task) : load_split(gold_path, task, SplitName::test, cfg);
  std::ifstream in(a.predictions);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + a.predictions + "'");
  const auto predictions = read_predictions(in, task);
  const auto report = evaluate(predictions, gold);
  if (a.json) {
    write_report_json(report, out);
  } else {
    write_report_table(report, out);
  }
  if (a.errors) write_error_listing(predictions, out);
  return kExitOk;
}

struct TuneArgs {
  CommonFlags common;
  std::optional<double> step;
  std::string output = "tuning.csv";
  std::string client;
};

int cmd_tune(const TuneArgs& a, std::ostream& out) {
  auto cfg = load_config(a.common);
  if (!a.client.empty()) cfg.set("client", a.client);
  const Task task = config_task(cfg);
  TuneOptions options;
  options.run = run_options(cfg, task);
  options.step = a.step ? *a.step : cfg.get_double("grid_step", options.step);
  options.grid_jobs = options.run.jobs;
  options.run.jobs = 1;
  auto in = load_pipeline(cfg, Strategy::cp, "dev");
  if (client_kind(cfg) == "http" && !cfg.get_bool("live_tuning", false)) {
    throw Error(ErrorKind::config, "tuning against a live endpoint needs live_tuning = true");
  }
  auto client = make_client(cfg, *in.test, task);
  const auto result = grid_search(*in.test, in.test_embeddings, *in.pool, client.get(), options);
  {
    auto file = open_output(a.output);
    write_tuning_csv(result, file);
  }
  out << "grid points: " << result.table.size() << " -> " << a.output << '\n';
  out << "best weights: " << result.best.length << ',' << result.best.entropy << ','
      << result.best.similarity << "  metric: " << result.best_metric << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complexity-based example selection for few-shot sequence tagging", "promptsel"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse and validate corpus files");
  c_ingest->add_option("paths", ingest.paths, "Corpus files")->required();
  c_ingest->add_option("--task", ingest.task, "ner, chunk or pos")->required();
  c_ingest->add_option("--tag-column", ingest.tag_column, "0-based tag column for CoNLL files");
  c_ingest->add_option("--format", ingest.format, "conll or conllu");
  c_ingest->add_option("--bio", ingest.bio_policy, "repair or reject invalid I-X transitions");
  c_ingest->add_option("--jsonl", ingest.jsonl, "Also export {id,tokens,labels} JSON lines");

  EmbedArgs embed;
  auto* c_embed = app.add_subcommand("embed", "Fill the embedding cache");
  add_common(c_embed, embed.common);
  c_embed->add_option("--split", embed.splits, "Splits to embed (train, dev, test)");

  SelectArgs select;
  auto* c_select = app.add_subcommand("select", "Write the selected example ids per test sentence");
  add_common(c_select, select.common);
  c_select->add_option("-o,--output", select.output, "Selection JSON lines");
  c_select->add_option("--dump-scores", select.dump_scores, "Per-candidate score dump (cp only)");

  RunArgs runargs;
  auto* c_run = app.add_subcommand("run", "Select, prompt and decode every test sentence");
  add_common(c_run, runargs.common);
  c_run->add_option("-o,--output", runargs.output, "Predictions JSON lines");
  c_run->add_option("--prompts-dir", runargs.prompts_dir, "Export each prompt as <test_id>.txt");
  c_run->add_option("--client", runargs.client, "oracle, noisy, lookup, http or replay");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score a predictions file against gold");
  c_eval->add_option("predictions", eval.predictions, "Predictions JSON lines")->required();
  c_eval->add_option("--gold", eval.gold, "Gold corpus file (defaults to the config's test split)");
  c_eval->add_option("--task", eval.task, "ner, chunk or pos");
  c_eval->add_option("-c,--config", eval.config_path, "Config file");
  c_eval->add_option("--tag-column", eval.tag_column, "0-based tag column of the gold file");
  c_eval->add_option("--format", eval.format, "Gold format: conll or conllu");
  c_eval->add_flag("--json", eval.json, "Emit JSON instead of a table");
  c_eval->add_flag("--errors", eval.errors, "List sentences with wrong labels");

  TuneArgs tune;
  auto* c_tune = app.add_subcommand("tune", "Grid-search the weights on the dev split");
  add_common(c_tune, tune.common);
  c_tune->add_option("--step", tune.step, "Simplex lattice step (default 0.05)");
  c_tune->add_option("-o,--output", tune.output, "Tuning CSV");
  c_tune->add_option("--client", tune.client, "oracle, noisy, lookup, http or replay");

  std::vector<const char*> argv{"promptsel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*c_ingest) return cmd_ingest(ingest, out);
    if (*c_embed) return cmd_embed(embed, out);
    if (*c_select) return cmd_select(select, out);
    if (*c_run) return cmd_run(runargs, out);
    if (*c_eval) return cmd_eval(eval, out);
    if (*c_tune) return cmd_tune(tune, out);
  } catch (const Error& e) {
    err << "promptsel: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "promptsel: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitConfig;
}

}  // namespace promptsel::cli
