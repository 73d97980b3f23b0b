#pragma once

// Benchmark stages over a shared run configuration. Every stage reads its inputs from
// and writes its artifact into the output directory, then records itself in
// manifest.json:
//
//   sample  -> pool.json (and corpus.json for synthetic corpora)
//   gen     -> suite.jsonl
//   run     -> answers.jsonl
//   eval    -> results.jsonl
//   report  -> report.csv, report.txt, plot/drift_k<k>.dat

#include "memdrift/corpus.hpp"
#include "memdrift/error.hpp"
#include "memdrift/extraction.hpp"
#include "memdrift/hashing.hpp"
#include "memdrift/live_client.hpp"
#include "memdrift/metrics.hpp"
#include "memdrift/modelclient.hpp"
#include "memdrift/promptgen.hpp"
#include "memdrift/report.hpp"
#include "memdrift/sampling.hpp"
#include "memdrift/templates.hpp"
#include "memdrift/tokens.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace memdrift {

inline constexpr std::string_view kToolVersion = "0.1.0";

namespace fs = std::filesystem;

struct DispersionSweep {
  std::vector<std::size_t> k = {1};
  std::vector<std::size_t> n = {10};
  std::vector<double> s = {0.0};
  std::vector<double> e = {1.0};
  std::size_t count = 10;
  std::uint64_t seed = 0;
  bool top_up_from_unused_pairs = false;

  /// Cartesian product over k, n, s, e in that nesting order. Each combination gets its own
  /// seed drawn from (seed, combination index).
  std::vector<DispersionParams> expand() const {
    std::vector<DispersionParams> out;
    std::uint64_t index = 0;
    for (auto kk : k)
      for (auto nn : n)
        for (auto ss : s)
          for (auto ee : e) {
            DispersionParams p{kk, nn, ss, ee, count, Rng(seed, index++).next(), top_up_from_unused_pairs};
            out.push_back(p);
          }
    return out;
  }
};

struct RunConfig {
  std::optional<fs::path> corpus_path;
  std::optional<SynthSpec> synthetic;
  ConnectionKind task = ConnectionKind::Edge;
  std::size_t sampler_param = 0;
  DispersionSweep dispersion;
  TemplateId template_id = TemplateId::Regular;
  std::optional<fs::path> template_file;
  std::string token_counter = "whitespace";
  std::optional<fs::path> vocab_file;
  AnswerSource source = AnswerSource::Simulated;
  std::optional<DriftProfile> drift;
  std::optional<EndpointConfig> endpoint;
  std::optional<fs::path> cache_path;
  std::string model_name;  ///< replay key component; defaults to the endpoint model or "simulated"
  std::optional<std::vector<std::size_t>> bin_edges;
  std::size_t bin_width = 500;
  Aggregation aggregation = Aggregation::Macro;
  DriftWeights weights;
  fs::path output_dir = "memdrift-out";

  std::string effective_model_name() const {
    if (!model_name.empty()) return model_name;
    if (endpoint) return endpoint->model_name;
    return to_string(source);
  }
};

// ---------------------------------------------------------------------------
// Config documents
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
std::vector<T> scalar_or_list(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {"corpus",        "task",    "sampler_param", "dispersion",
                                             "template",      "template_file", "token_counter", "vocab_file",
                                             "model",         "bins",    "aggregation",   "weights",
                                             "output_dir"};
  return keys;
}

}  // namespace detail

/// Parses a run-config document. Structural problems raise ConfigError listing every issue.
inline RunConfig parse_run_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("run config must be a JSON object");
  std::vector<std::string> problems;
  for (const auto& [key, _] : doc.items()) {
    if (!detail::known_config_keys().count(key)) problems.push_back("unknown key '" + key + "'");
  }

  RunConfig cfg;
  auto guard = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const nlohmann::json::exception& ex) {
      problems.push_back(std::string(what) + ": " + ex.what());
    } catch (const Error& ex) {
      problems.push_back(std::string(what) + ": " + ex.what());
    }
  };

  guard("corpus", [&] {
    if (!doc.contains("corpus")) {
      problems.push_back("corpus: missing; give exactly one of 'path' or 'synthetic'");
      return;
    }
    const auto& c = doc.at("corpus");
    const bool has_path = c.contains("path");
    const bool has_synth = c.contains("synthetic");
    if (has_path == has_synth) {
      problems.push_back("corpus: give exactly one of 'path' or 'synthetic'");
      return;
    }
    if (has_path) cfg.corpus_path = fs::path(c.at("path").get<std::string>());
    if (has_synth) cfg.synthetic = c.at("synthetic").get<SynthSpec>();
  });
  guard("task", [&] {
    if (doc.contains("task")) cfg.task = doc.at("task").get<ConnectionKind>();
    if (doc.contains("sampler_param")) cfg.sampler_param = doc.at("sampler_param").get<std::size_t>();
  });
  guard("dispersion", [&] {
    if (!doc.contains("dispersion")) return;
    const auto& d = doc.at("dispersion");
    if (d.contains("k")) cfg.dispersion.k = detail::scalar_or_list<std::size_t>(d.at("k"));
    if (d.contains("n")) cfg.dispersion.n = detail::scalar_or_list<std::size_t>(d.at("n"));
    if (d.contains("s")) cfg.dispersion.s = detail::scalar_or_list<double>(d.at("s"));
    if (d.contains("e")) cfg.dispersion.e = detail::scalar_or_list<double>(d.at("e"));
    if (d.contains("count")) cfg.dispersion.count = d.at("count").get<std::size_t>();
    if (d.contains("seed")) cfg.dispersion.seed = d.at("seed").get<std::uint64_t>();
    if (d.contains("top_up_from_unused_pairs")) {
      cfg.dispersion.top_up_from_unused_pairs = d.at("top_up_from_unused_pairs").get<bool>();
    }
  });
  guard("template", [&] {
    if (doc.contains("template")) cfg.template_id = doc.at("template").get<TemplateId>();
    if (doc.contains("template_file")) cfg.template_file = fs::path(doc.at("template_file").get<std::string>());
  });
  guard("token_counter", [&] {
    if (doc.contains("token_counter")) cfg.token_counter = doc.at("token_counter").get<std::string>();
    if (doc.contains("vocab_file")) cfg.vocab_file = fs::path(doc.at("vocab_file").get<std::string>());
  });
  guard("model", [&] {
    if (!doc.contains("model")) {
      problems.push_back("model: missing; set model.source to live, replay or simulated");
      return;
    }
    const auto& m = doc.at("model");
    cfg.source = m.at("source").get<AnswerSource>();
    if (m.contains("drift")) cfg.drift = m.at("drift").get<DriftProfile>();
    if (m.contains("endpoint")) cfg.endpoint = m.at("endpoint").get<EndpointConfig>();
    if (m.contains("cache")) cfg.cache_path = fs::path(m.at("cache").get<std::string>());
    if (m.contains("model_name")) cfg.model_name = m.at("model_name").get<std::string>();
  });
  guard("bins", [&] {
    if (!doc.contains("bins")) return;
    const auto& b = doc.at("bins");
    if (b.contains("edges")) cfg.bin_edges = b.at("edges").get<std::vector<std::size_t>>();
    if (b.contains("width")) cfg.bin_width = b.at("width").get<std::size_t>();
  });
  guard("aggregation", [&] {
    if (!doc.contains("aggregation")) return;
    auto a = doc.at("aggregation").get<std::string>();
    if (a == "macro") {
      cfg.aggregation = Aggregation::Macro;
    } else if (a == "micro") {
      cfg.aggregation = Aggregation::Micro;
    } else {
      problems.push_back("aggregation: expected 'macro' or 'micro', got '" + a + "'");
    }
  });
  guard("weights", [&] {
    if (doc.contains("weights")) cfg.weights = doc.at("weights").get<DriftWeights>();
  });
  guard("output_dir", [&] {
    if (doc.contains("output_dir")) cfg.output_dir = fs::path(doc.at("output_dir").get<std::string>());
  });

  if (!problems.empty()) {
    std::string msg = "invalid run config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

inline nlohmann::json to_json_document(const RunConfig& cfg) {
  nlohmann::json doc;
  if (cfg.corpus_path) doc["corpus"] = {{"path", cfg.corpus_path->string()}};
  if (cfg.synthetic) doc["corpus"] = {{"synthetic", *cfg.synthetic}};
  doc["task"] = cfg.task;
  doc["sampler_param"] = cfg.sampler_param;
  doc["dispersion"] = {{"k", cfg.dispersion.k},
                       {"n", cfg.dispersion.n},
                       {"s", cfg.dispersion.s},
                       {"e", cfg.dispersion.e},
                       {"count", cfg.dispersion.count},
                       {"seed", cfg.dispersion.seed},
                       {"top_up_from_unused_pairs", cfg.dispersion.top_up_from_unused_pairs}};
  doc["template"] = cfg.template_id;
  if (cfg.template_file) doc["template_file"] = cfg.template_file->string();
  doc["token_counter"] = cfg.token_counter;
  if (cfg.vocab_file) doc["vocab_file"] = cfg.vocab_file->string();
  nlohmann::json model = {{"source", cfg.source}};
  if (cfg.drift) model["drift"] = *cfg.drift;
  if (cfg.endpoint) model["endpoint"] = *cfg.endpoint;
  if (cfg.cache_path) model["cache"] = cfg.cache_path->string();
  if (!cfg.model_name.empty()) model["model_name"] = cfg.model_name;
  doc["model"] = model;
  doc["bins"] = {{"width", cfg.bin_width}};
  if (cfg.bin_edges) doc["bins"]["edges"] = *cfg.bin_edges;
  doc["aggregation"] = cfg.aggregation == Aggregation::Macro ? "macro" : "micro";
  doc["weights"] = cfg.weights;
  doc["output_dir"] = cfg.output_dir.string();
  return doc;
}

inline RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_run_config(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError("config " + path.string() + ": " + ex.what());
  }
}

/// Semantic checks that need no file access. Empty result means the config is usable.
inline std::vector<std::string> config_problems(const RunConfig& cfg) {
  std::vector<std::string> problems;
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& ex) {
      problems.emplace_back(ex.what());
    }
  };
  if (cfg.corpus_path.has_value() == cfg.synthetic.has_value()) {
    problems.emplace_back("exactly one corpus source (path or synthetic) is required");
  }
  if (cfg.synthetic) check([&] { cfg.synthetic->validate(); });
  check([&] { validate_selector(cfg.task, cfg.sampler_param); });
  if (cfg.dispersion.k.empty() || cfg.dispersion.n.empty() || cfg.dispersion.s.empty() || cfg.dispersion.e.empty()) {
    problems.emplace_back("dispersion lists k, n, s, e must be non-empty");
  }
  for (const auto& p : cfg.dispersion.expand()) check([&] { p.validate(); });
  if (cfg.token_counter == "vocab") {
    if (!cfg.vocab_file) problems.emplace_back("token_counter 'vocab' needs vocab_file");
  } else if (cfg.token_counter != "whitespace" && cfg.token_counter != "bytes4") {
    problems.emplace_back("token_counter must be whitespace, bytes4 or vocab");
  }
  switch (cfg.source) {
    case AnswerSource::Simulated:
      if (!cfg.drift) problems.emplace_back("simulated source needs model.drift");
      if (cfg.endpoint) problems.emplace_back("exactly one model source: simulated source with an endpoint section");
      if (cfg.drift) check([&] { cfg.drift->validate(); });
      break;
    case AnswerSource::Replay:
      if (!cfg.cache_path) problems.emplace_back("replay source needs model.cache");
      if (cfg.drift) problems.emplace_back("exactly one model source: replay source with a drift section");
      if (cfg.effective_model_name() == "replay" && !cfg.endpoint) {
        problems.emplace_back("replay source needs model.model_name (or an endpoint) to form cache keys");
      }
      break;
    case AnswerSource::Live:
      if (!cfg.endpoint) problems.emplace_back("live source needs model.endpoint");
      if (cfg.drift) problems.emplace_back("exactly one model source: live source with a drift section");
      if (cfg.endpoint) check([&] { cfg.endpoint->validate(); });
      break;
  }
  if (cfg.bin_edges) {
    check([&] { BinSpec{*cfg.bin_edges}.validate(); });
  } else if (cfg.bin_width == 0) {
    problems.emplace_back("bin width must be positive");
  }
  check([&] { cfg.weights.validate(); });
  return problems;
}

inline void require_valid(const RunConfig& cfg) {
  auto problems = config_problems(cfg);
  if (problems.empty()) return;
  std::string msg = "invalid run config:";
  for (const auto& p : problems) msg += "\n  - " + p;
  throw ConfigError(msg);
}

// ---------------------------------------------------------------------------
// Shared stage plumbing
// ---------------------------------------------------------------------------

namespace artifact {
inline constexpr const char* kCorpus = "corpus.json";
inline constexpr const char* kPool = "pool.json";
inline constexpr const char* kSuite = "suite.jsonl";
inline constexpr const char* kAnswers = "answers.jsonl";
inline constexpr const char* kResults = "results.jsonl";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace artifact

inline std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return content_hash(ss.str());
}

inline fs::path require_artifact(const RunConfig& cfg, const char* name, const char* producer) {
  fs::path p = cfg.output_dir / name;
  if (!fs::exists(p)) {
    throw MissingArtifactError("missing " + p.string() + "; run the '" + std::string(producer) + "' stage first");
  }
  return p;
}

inline void ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.output_dir.string() + ": " + ec.message());
}

inline Corpus resolve_corpus(const RunConfig& cfg) {
  if (cfg.corpus_path) return load_corpus(*cfg.corpus_path);
  return load_corpus(require_artifact(cfg, artifact::kCorpus, "sample"));
}

inline PromptTemplate resolve_template(const RunConfig& cfg) {
  if (cfg.template_file) return load_template(*cfg.template_file);
  return builtin_template(cfg.template_id);
}

inline TokenCounter resolve_counter(const RunConfig& cfg) {
  if (cfg.token_counter == "bytes4") return TokenCounter::bytes_over_4();
  if (cfg.token_counter == "vocab") return TokenCounter::from_vocab_file(*cfg.vocab_file);
  return TokenCounter::whitespace();
}

/// Read-modify-write of manifest.json. The manifest carries no timestamps, so identical
/// runs produce identical manifests.
inline void record_stage(const RunConfig& cfg, const std::string& stage, const std::vector<fs::path>& inputs,
                         const std::vector<fs::path>& outputs, nlohmann::json extra = nlohmann::json::object()) {
  const fs::path path = cfg.output_dir / artifact::kManifest;
  nlohmann::json manifest = nlohmann::json::object();
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error&) {
      manifest = nlohmann::json::object();
    }
  }
  manifest["tool"] = "memdrift";
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = to_json_document(cfg);
  manifest["model_source"] = to_string(cfg.source);
  manifest["seed"] = cfg.dispersion.seed;
  auto hashes = [&](const std::vector<fs::path>& files) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : files) j[fs::relative(f, cfg.output_dir).generic_string()] = file_hash(f);
    return j;
  };
  nlohmann::json entry = {{"inputs", hashes(inputs)}, {"outputs", hashes(outputs)}};
  for (auto& [k, v] : extra.items()) {
    entry[k] = v;
    manifest[k] = v;
  }
  manifest["stages"][stage] = entry;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

struct StageOutput {
  std::vector<fs::path> files;
  std::vector<std::string> notes;
};

/// Checks the config, then builds the corpus and pool in memory and confirms every sweep
/// combination can be laid out. Returns the problems found; an empty list means valid.
inline StageOutput cmd_validate(const RunConfig& cfg, std::vector<std::string>& problems) {
  StageOutput out;
  problems = config_problems(cfg);
  if (!problems.empty()) return out;
  try {
    Corpus corpus = cfg.corpus_path ? load_corpus(*cfg.corpus_path) : generate_synthetic_corpus(*cfg.synthetic);
    out.notes.push_back("corpus: " + std::to_string(corpus.graph().node_count()) + " entities, " +
                        std::to_string(corpus.graph().edge_count()) + " edges");
    SamplePool pool = run_subgraph_sampling(corpus.graph(), cfg.task, cfg.sampler_param);
    out.notes.push_back("pool: " + std::to_string(pool.connections.size()) + " " + to_string(cfg.task) +
                        " units, " + std::to_string(pool.distractors.size()) + " distractors");
    for (const auto& p : cfg.dispersion.expand()) {
      try {
        Rng rng(p.seed);
        build_layout(pool, p, rng);
      } catch (const ParameterError& ex) {
        problems.push_back("k=" + std::to_string(p.k) + " n=" + std::to_string(p.n) + " s=" + std::to_string(p.s) +
                           " e=" + std::to_string(p.e) + ": " + ex.what());
      }
    }
    resolve_template(cfg);
    resolve_counter(cfg);
  } catch (const Error& ex) {
    problems.emplace_back(ex.what());
  }
  return out;
}

inline StageOutput cmd_sample(const RunConfig& cfg) {
  require_valid(cfg);
  ensure_output_dir(cfg);
  StageOutput out;
  std::vector<fs::path> inputs;
  Corpus corpus;
  if (cfg.corpus_path) {
    corpus = load_corpus(*cfg.corpus_path);
  } else {
    corpus = generate_synthetic_corpus(*cfg.synthetic);
    out.files.push_back(cfg.output_dir / artifact::kCorpus);
    save_corpus(corpus, out.files.back());
  }
  SamplePool pool = run_subgraph_sampling(corpus.graph(), cfg.task, cfg.sampler_param);
  out.files.push_back(cfg.output_dir / artifact::kPool);
  save_pool(pool, out.files.back());
  out.notes.push_back(std::to_string(pool.connections.size()) + " units, " + std::to_string(pool.distractors.size()) +
                      " distractors");
  record_stage(cfg, "sample", inputs, out.files, {{"corpus_hash", corpus_hash(corpus)}});
  return out;
}

inline StageOutput cmd_gen(const RunConfig& cfg) {
  require_valid(cfg);
  const fs::path pool_path = require_artifact(cfg, artifact::kPool, "sample");
  Corpus corpus = resolve_corpus(cfg);
  SamplePool pool = load_pool(pool_path);
  if (pool.kind != cfg.task) throw IntegrityError("pool.json was sampled for a different task; rerun 'sample'");
  const PromptTemplate tmpl = resolve_template(cfg);
  const TokenCounter counter = resolve_counter(cfg);

  std::vector<TestCase> suite;
  for (const auto& params : cfg.dispersion.expand()) {
    auto cases = generate_test_cases(pool, corpus, params, tmpl, counter);
    suite.insert(suite.end(), std::make_move_iterator(cases.begin()), std::make_move_iterator(cases.end()));
  }
  StageOutput out;
  out.files.push_back(cfg.output_dir / artifact::kSuite);
  save_suite(suite, out.files.back());
  out.notes.push_back(std::to_string(suite.size()) + " test cases");
  record_stage(cfg, "gen", {pool_path}, out.files,
               {{"corpus_hash", corpus_hash(corpus)}, {"template_hash", tmpl.hash()},
                {"token_counter", counter.description()}});
  return out;
}

inline StageOutput cmd_run(const RunConfig& cfg) {
  require_valid(cfg);
  const fs::path suite_path = require_artifact(cfg, artifact::kSuite, "gen");
  const auto suite = load_suite(suite_path);
  std::vector<ModelAnswer> answers;
  answers.reserve(suite.size());
  const std::string model = cfg.effective_model_name();

  switch (cfg.source) {
    case AnswerSource::Simulated:
      for (const auto& tc : suite) answers.push_back(query_simulated(tc, *cfg.drift));
      break;
    case AnswerSource::Replay: {
      ReplayCache cache(*cfg.cache_path);
      for (const auto& tc : suite) answers.push_back(query_replay(cache, tc, model));
      break;
    }
    case AnswerSource::Live: {
      LiveClient client(*cfg.endpoint);
      if (cfg.cache_path) {
        ReplayCache cache(*cfg.cache_path);
        answers = client.query_all(suite, &cache);
      } else {
        answers = client.query_all(suite);
      }
      break;
    }
  }
  StageOutput out;
  out.files.push_back(cfg.output_dir / artifact::kAnswers);
  save_answers(answers, out.files.back());
  out.notes.push_back(std::to_string(answers.size()) + " answers from " + to_string(cfg.source));
  record_stage(cfg, "run", {suite_path}, out.files);
  return out;
}

inline std::vector<CaseResult> evaluate(const std::vector<TestCase>& suite, const std::vector<ModelAnswer>& answers,
                                        const DriftWeights& weights) {
  std::map<std::string, const ModelAnswer*> by_case;
  for (const auto& a : answers) by_case[a.case_id] = &a;
  std::vector<CaseResult> results;
  results.reserve(suite.size());
  for (const auto& tc : suite) {
    auto it = by_case.find(tc.case_id);
    if (it == by_case.end()) throw IntegrityError("no answer for case " + tc.case_id);
    PredictedGraph predicted = parse_prediction(it->second->raw_text, Roster::of(tc));
    CaseResult r;
    r.case_id = tc.case_id;
    r.kind = tc.kind;
    r.density = tc.density;
    r.token_length = tc.token_length;
    r.delta_tokens = tc.delta_tokens;
    r.unresolved = predicted.unresolved_mentions.size();
    r.metrics = score(tally(predicted, tc.gold_edges), weights);
    results.push_back(r);
  }
  return results;
}

inline StageOutput cmd_eval(const RunConfig& cfg) {
  require_valid(cfg);
  const fs::path suite_path = require_artifact(cfg, artifact::kSuite, "gen");
  const fs::path answers_path = require_artifact(cfg, artifact::kAnswers, "run");
  auto results = evaluate(load_suite(suite_path), load_answers(answers_path), cfg.weights);
  StageOutput out;
  out.files.push_back(cfg.output_dir / artifact::kResults);
  save_results(results, out.files.back());
  out.notes.push_back(std::to_string(results.size()) + " cases scored");
  record_stage(cfg, "eval", {suite_path, answers_path}, out.files);
  return out;
}

inline BinSpec resolve_bins(const RunConfig& cfg, const std::vector<CaseResult>& results) {
  if (cfg.bin_edges) return BinSpec{*cfg.bin_edges};
  std::size_t max_tokens = 0;
  for (const auto& r : results) max_tokens = std::max(max_tokens, r.token_length);
  return BinSpec::uniform(max_tokens, cfg.bin_width);
}

inline StageOutput cmd_report(const RunConfig& cfg) {
  require_valid(cfg);
  const fs::path results_path = require_artifact(cfg, artifact::kResults, "eval");
  const auto results = load_results(results_path);
  const BinSpec bins = resolve_bins(cfg, results);
  const BinnedReport report = aggregate(results, bins, cfg.aggregation, cfg.weights);
  StageOutput out;
  for (auto fmt : {ReportFormat::Csv, ReportFormat::Table, ReportFormat::PlotData}) {
    auto files = emit(report, fmt, cfg.output_dir);
    out.files.insert(out.files.end(), files.begin(), files.end());
  }
  out.notes.push_back(to_table(report));
  record_stage(cfg, "report", {results_path}, out.files, {{"bins", bins.edges}});
  return out;
}

inline StageOutput cmd_all(const RunConfig& cfg) {
  StageOutput all;
  for (auto stage : {cmd_sample, cmd_gen, cmd_run, cmd_eval, cmd_report}) {
    auto out = stage(cfg);
    all.files.insert(all.files.end(), out.files.begin(), out.files.end());
    all.notes.insert(all.notes.end(), out.notes.begin(), out.notes.end());
  }
  return all;
}

// ---------------------------------------------------------------------------
// Exit status per failure class.
// ---------------------------------------------------------------------------

enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitConfig = 2,
  kExitMissingArtifact = 3,
  kExitParse = 4,
  kExitIntegrity = 5,
  kExitParameter = 6,
  kExitCacheMiss = 7,
  kExitAuth = 8,
  kExitRetriesExhausted = 9,
  kExitHttpStatus = 10,
  kExitIo = 11,
};

inline int exit_code_for(const std::exception& ex) {
  if (dynamic_cast<const ConfigError*>(&ex)) return kExitConfig;
  if (dynamic_cast<const MissingArtifactError*>(&ex)) return kExitMissingArtifact;
  if (dynamic_cast<const ParseError*>(&ex)) return kExitParse;
  if (dynamic_cast<const IntegrityError*>(&ex)) return kExitIntegrity;
  if (dynamic_cast<const ParameterError*>(&ex)) return kExitParameter;
  if (dynamic_cast<const CacheMissError*>(&ex)) return kExitCacheMiss;
  if (dynamic_cast<const AuthError*>(&ex)) return kExitAuth;
  if (dynamic_cast<const RetriesExhaustedError*>(&ex)) return kExitRetriesExhausted;
  if (dynamic_cast<const HttpStatusError*>(&ex)) return kExitHttpStatus;
  if (dynamic_cast<const IoError*>(&ex)) return kExitIo;
  return kExitUnexpected;
}

}  // namespace memdrift
