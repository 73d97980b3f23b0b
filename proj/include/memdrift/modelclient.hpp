#pragma once

#include "memdrift/error.hpp"
#include "memdrift/hashing.hpp"
#include "memdrift/promptgen.hpp"
#include "memdrift/random.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace memdrift {

enum class AnswerSource { Live, Replay, Simulated };

inline std::string to_string(AnswerSource s) {
  switch (s) {
    case AnswerSource::Live: return "live";
    case AnswerSource::Replay: return "replay";
    case AnswerSource::Simulated: return "simulated";
  }
  return "live";
}

inline AnswerSource parse_answer_source(std::string_view s) {
  if (s == "live") return AnswerSource::Live;
  if (s == "replay") return AnswerSource::Replay;
  if (s == "simulated") return AnswerSource::Simulated;
  throw ParameterError("unknown model source '" + std::string(s) + "'");
}

inline void to_json(nlohmann::json& j, AnswerSource s) { j = to_string(s); }
inline void from_json(const nlohmann::json& j, AnswerSource& s) { s = parse_answer_source(j.get<std::string>()); }

struct ModelAnswer {
  std::string case_id;
  std::string raw_text;
  double latency_seconds = 0.0;
  AnswerSource source = AnswerSource::Simulated;

  friend bool operator==(const ModelAnswer&, const ModelAnswer&) = default;
};

inline void to_json(nlohmann::json& j, const ModelAnswer& a) {
  j = {{"case_id", a.case_id}, {"raw_text", a.raw_text}, {"latency", a.latency_seconds}, {"source", a.source}};
}

inline void from_json(const nlohmann::json& j, ModelAnswer& a) {
  a.case_id = j.at("case_id").get<std::string>();
  a.raw_text = j.at("raw_text").get<std::string>();
  a.latency_seconds = j.at("latency").get<double>();
  a.source = j.at("source").get<AnswerSource>();
}

inline void save_answers(const std::vector<ModelAnswer>& answers, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write answers file " + path.string());
  for (const auto& a : answers) out << nlohmann::json(a).dump() << "\n";
}

inline std::vector<ModelAnswer> load_answers(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open answers file " + path.string());
  std::vector<ModelAnswer> answers;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      answers.push_back(nlohmann::json::parse(line).get<ModelAnswer>());
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return answers;
}

/// Replay key: prompt, model and template all participate, so prompting-style runs never collide.
inline std::string cache_key(std::string_view prompt_text, std::string_view model_name,
                             std::string_view template_hash) {
  return Fnv1a{}.field(prompt_text).field(model_name).field(template_hash).hex();
}

inline std::string cache_key(const TestCase& tc, std::string_view model_name) {
  return cache_key(tc.prompt_text, model_name, tc.template_hash);
}

/// Append-only answer store, one JSON record per line: {key, model_name, raw_text, timestamp}.
/// Lookups may run concurrently; appends are serialized and flushed per record.
class ReplayCache {
 public:
  ReplayCache() = default;

  explicit ReplayCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.empty()) continue;
      try {
        auto rec = nlohmann::json::parse(line);
        entries_[rec.at("key").get<std::string>()] = rec.at("raw_text").get<std::string>();
      } catch (const nlohmann::json::exception& ex) {
        throw ParseError(path_.string() + ":" + std::to_string(line_no) + ": " + ex.what());
      }
    }
  }

  std::optional<std::string> find(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void append(const std::string& key, const std::string& model_name, const std::string& raw_text) {
    std::lock_guard lock(mutex_);
    entries_[key] = raw_text;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to cache " + path_.string());
    nlohmann::json rec = {{"key", key}, {"model_name", model_name}, {"raw_text", raw_text}, {"timestamp", now_utc()}};
    out << rec.dump() << "\n";
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  static std::string now_utc() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
};

inline ModelAnswer query_replay(const ReplayCache& cache, const TestCase& tc, std::string_view model_name) {
  const std::string key = cache_key(tc, model_name);
  auto hit = cache.find(key);
  if (!hit) throw CacheMissError(key, "replay cache miss for case " + tc.case_id + " (key " + key + ")");
  return ModelAnswer{tc.case_id, *hit, 0.0, AnswerSource::Replay};
}

inline ModelAnswer query_replay(const std::filesystem::path& cache_path, const TestCase& tc,
                                std::string_view model_name) {
  return query_replay(ReplayCache(cache_path), tc, model_name);
}

// ---------------------------------------------------------------------------
// Simulated responder
// ---------------------------------------------------------------------------

/// Parameters of the simulated forgetting model.
struct DriftProfile {
  double tau = 500.0;               ///< token-distance decay scale
  double hallucination_rate = 0.0;  ///< expected spurious edges per gold edge
  std::uint64_t seed = 0;

  void validate() const {
    if (!(tau > 0.0)) throw ParameterError("drift profile needs tau > 0");
    if (!(hallucination_rate >= 0.0 && hallucination_rate <= 1.0)) {
      throw ParameterError("hallucination_rate must lie in [0, 1]");
    }
  }
};

inline void to_json(nlohmann::json& j, const DriftProfile& p) {
  j = {{"tau", p.tau}, {"hallucination_rate", p.hallucination_rate}, {"seed", p.seed}};
}

inline void from_json(const nlohmann::json& j, DriftProfile& p) {
  p = DriftProfile{};
  if (j.contains("tau")) p.tau = j.at("tau").get<double>();
  if (j.contains("hallucination_rate")) p.hallucination_rate = j.at("hallucination_rate").get<double>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
}

/// Renders pairs in the answer grammar the shipped templates request.
inline std::string render_answer_block(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::string out = "```\n";
  for (const auto& [a, b] : pairs) out += a + " -- " + b + "\n";
  out += "```\n";
  return out;
}

/// Tokens between the start of the edge's earlier endpoint frame and the end of the prompt,
/// i.e. how far back the relation sits when the model starts answering.
inline std::size_t recall_distance(const TestCase& tc, const Edge& e) {
  std::size_t a = tc.frame_offsets[tc.position_of(e.first)];
  std::size_t b = tc.frame_offsets[tc.position_of(e.second)];
  return tc.token_length - std::min(a, b);
}

inline double emission_probability(const TestCase& tc, const Edge& e, const DriftProfile& profile) {
  return std::exp(-static_cast<double>(recall_distance(tc, e)) / profile.tau);
}

/// Emits each gold edge with probability exp(-distance / tau); then, once per gold edge and
/// with probability hallucination_rate, one uniformly chosen layout pair that is not a gold
/// edge. Pure function of (case, profile).
inline ModelAnswer query_simulated(const TestCase& tc, const DriftProfile& profile) {
  profile.validate();
  Rng rng(profile.seed, Fnv1a{}.update(tc.case_id).digest());

  std::vector<std::pair<std::string, std::string>> lines;
  for (const auto& e : tc.gold_edges) {
    if (rng.bernoulli(emission_probability(tc, e, profile))) {
      lines.emplace_back(tc.names[tc.position_of(e.first)], tc.names[tc.position_of(e.second)]);
    }
  }

  if (profile.hallucination_rate > 0.0) {
    const std::size_t n = tc.layout.size();
    const std::size_t all_pairs = n * (n - 1) / 2;
    std::set<Edge> emitted;
    for (std::size_t g = 0; g < tc.gold_edges.size(); ++g) {
      if (!rng.bernoulli(profile.hallucination_rate)) continue;
      if (emitted.size() + tc.gold_edges.size() >= all_pairs) break;
      while (true) {
        std::size_t i = rng.below(n);
        std::size_t j = rng.below(n);
        if (i == j) continue;
        Edge e = Edge::make(tc.layout[i], tc.layout[j]);
        if (tc.gold_edges.count(e) || emitted.count(e)) continue;
        emitted.insert(e);
        lines.emplace_back(tc.names[i], tc.names[j]);
        break;
      }
    }
  }
  return ModelAnswer{tc.case_id, render_answer_block(lines), 0.0, AnswerSource::Simulated};
}

}  // namespace memdrift
