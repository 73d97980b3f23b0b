#pragma once

// Test-case construction: pick k connections and a distractor set from a pool,
// lay them out with controlled dispersion, render the prompt, and measure the
// token separation between the first and last embedded connection.
//
// Layout shape for k connections and distractor sequence D:
//
//   [head] c_1 [gap_1] c_2 [gap_2] ... [gap_{k-1}] c_k [tail]
//
// gap_1 .. gap_{k-1} are the k-1 bounded segments, each of length in
// [ceil(s*|D|), floor(e*|D|)]. The last segment takes the remainder and is cut at
// a seeded point into head and tail, which places the whole block sequence at a
// seeded position. Wider (s, e) therefore pushes c_1 and c_k further apart.

#include "memdrift/corpus.hpp"
#include "memdrift/error.hpp"
#include "memdrift/graph.hpp"
#include "memdrift/hashing.hpp"
#include "memdrift/random.hpp"
#include "memdrift/sampling.hpp"
#include "memdrift/templates.hpp"
#include "memdrift/tokens.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace memdrift {

struct DispersionParams {
  std::size_t k = 1;      ///< connections per test case
  std::size_t n = 10;     ///< total entities per prompt
  double s = 0.0;         ///< lower segment bound, as a fraction of |D|
  double e = 1.0;         ///< upper segment bound, as a fraction of |D|
  std::size_t count = 1;  ///< number of test cases
  std::uint64_t seed = 0;
  /// Edge tasks only: when surviving distractors run short, borrow at most one node from
  /// each unused connection pair.
  bool top_up_from_unused_pairs = false;

  void validate() const {
    if (k < 1) throw ParameterError("k must be >= 1");
    if (!(s >= 0.0 && s < e && e <= 1.0)) throw ParameterError("segment bounds must satisfy 0 <= s < e <= 1");
    if (count < 1) throw ParameterError("count must be >= 1");
  }

  friend bool operator==(const DispersionParams&, const DispersionParams&) = default;
};

struct SegmentBounds {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

inline SegmentBounds segment_bounds(std::size_t distractors, double s, double e) {
  constexpr double eps = 1e-9;
  const double d = static_cast<double>(distractors);
  auto lo = static_cast<std::size_t>(std::ceil(s * d - eps));
  auto hi = static_cast<std::size_t>(std::floor(e * d + eps));
  return {lo, std::min(hi, distractors)};
}

/// Splits `distractors` into k segment lengths: k-1 bounded gaps drawn in order, each
/// uniform over the range that keeps the remaining gaps feasible, then the remainder.
inline std::vector<std::size_t> partition_distractors(std::size_t distractors, std::size_t k, double s, double e,
                                                      Rng& rng) {
  std::vector<std::size_t> lengths;
  lengths.reserve(k);
  if (k > 1) {
    const auto [lo, hi] = segment_bounds(distractors, s, e);
    if (lo > hi || (k - 1) * lo > distractors) {
      throw ParameterError("infeasible partition: " + std::to_string(k - 1) + " segments of length in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "] do not fit in " +
                           std::to_string(distractors) + " distractors");
    }
    std::size_t remaining = distractors;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      const std::size_t later = k - 2 - j;
      const std::size_t cap = std::min(hi, remaining - later * lo);
      const std::size_t len = rng.between(lo, cap);
      lengths.push_back(len);
      remaining -= len;
    }
    lengths.push_back(remaining);
  } else {
    lengths.push_back(distractors);
  }
  return lengths;
}

struct Layout {
  std::vector<EntityId> entities;
  std::vector<std::size_t> connection_indices;  ///< c_1..c_k as indices into the pool
  std::vector<std::size_t> block_starts;        ///< position of c_j's first member
  std::vector<std::size_t> segment_lengths;     ///< k-1 gaps, then the remainder segment
  std::size_t head = 0;                         ///< distractors before c_1
};

inline Layout build_layout(const SamplePool& pool, const DispersionParams& params, Rng& rng) {
  params.validate();
  const std::size_t k = params.k;
  if (pool.connections.size() < k) {
    throw ParameterError("insufficient connections: pool has " + std::to_string(pool.connections.size()) +
                         ", k = " + std::to_string(k));
  }

  Layout layout;
  layout.connection_indices = rng.sample_indices(pool.connections.size(), k);

  std::size_t members = 0;
  for (auto idx : layout.connection_indices) members += pool.connections[idx].members.size();
  if (params.n < members) {
    throw ParameterError("entity budget n = " + std::to_string(params.n) + " is smaller than the " +
                         std::to_string(members) + " connection members");
  }
  const std::size_t needed = params.n - members;

  std::vector<EntityId> distractors(pool.distractors.begin(), pool.distractors.end());
  if (distractors.size() < needed && params.top_up_from_unused_pairs && pool.kind == ConnectionKind::Edge) {
    std::vector<bool> used(pool.connections.size(), false);
    for (auto idx : layout.connection_indices) used[idx] = true;
    std::vector<EntityId> borrowed;
    for (std::size_t i = 0; i < pool.connections.size(); ++i) {
      if (used[i]) continue;
      const auto& m = pool.connections[i].members;
      borrowed.push_back(m[rng.below(m.size())]);
    }
    rng.shuffle(borrowed);
    const std::size_t take = std::min(borrowed.size(), needed - distractors.size());
    distractors.insert(distractors.end(), borrowed.begin(), borrowed.begin() + static_cast<std::ptrdiff_t>(take));
  }
  if (distractors.size() < needed) {
    throw ParameterError("insufficient distractors: need " + std::to_string(needed) + ", have " +
                         std::to_string(distractors.size()));
  }
  rng.shuffle(distractors);
  distractors.resize(needed);

  layout.segment_lengths = partition_distractors(needed, k, params.s, params.e, rng);
  layout.head = rng.between(0, layout.segment_lengths.back());

  auto next = distractors.begin();
  auto take = [&](std::size_t count) {
    layout.entities.insert(layout.entities.end(), next, next + static_cast<std::ptrdiff_t>(count));
    next += static_cast<std::ptrdiff_t>(count);
  };
  take(layout.head);
  for (std::size_t j = 0; j < k; ++j) {
    layout.block_starts.push_back(layout.entities.size());
    const auto& m = pool.connections[layout.connection_indices[j]].members;
    layout.entities.insert(layout.entities.end(), m.begin(), m.end());
    if (j + 1 < k) take(layout.segment_lengths[j]);
  }
  take(layout.segment_lengths.back() - layout.head);
  return layout;
}

/// Deterministic for a fixed params.seed.
inline Layout build_layout(const SamplePool& pool, const DispersionParams& params) {
  Rng rng(params.seed);
  return build_layout(pool, params, rng);
}

// ---------------------------------------------------------------------------
// Rendering and token accounting
// ---------------------------------------------------------------------------

struct RenderedPrompt {
  std::string text;
  std::vector<std::size_t> frame_tokens;   ///< token count of each entity frame
  std::vector<std::size_t> frame_offsets;  ///< token offset of each frame start within the prompt
  std::size_t preamble_tokens = 0;
  std::size_t closing_tokens = 0;
  std::size_t token_length = 0;            ///< counter applied to the whole prompt text
};

inline RenderedPrompt render_prompt_detailed(const std::vector<EntityId>& layout, const Corpus& corpus,
                                             const PromptTemplate& tmpl, const TokenCounter& counter) {
  RenderedPrompt out;
  out.text = tmpl.preamble;
  out.preamble_tokens = counter.count(tmpl.preamble);
  std::size_t offset = out.preamble_tokens;
  for (const auto& id : layout) {
    const auto& p = corpus.profile(id);
    std::string frame = tmpl.render_frame(p.display_name, id.str(), p.description);
    const std::size_t tokens = counter.count(frame);
    out.frame_offsets.push_back(offset);
    out.frame_tokens.push_back(tokens);
    offset += tokens;
    out.text += frame;
  }
  out.text += tmpl.closing_instruction;
  out.closing_tokens = counter.count(tmpl.closing_instruction);
  out.token_length = counter.count(out.text);
  return out;
}

inline std::string render_prompt(const std::vector<EntityId>& layout, const Corpus& corpus,
                                 const PromptTemplate& tmpl) {
  return render_prompt_detailed(layout, corpus, tmpl, TokenCounter::whitespace()).text;
}

/// Tokens from the start of the earlier entity's frame to the start of the later one's.
inline std::size_t token_distance(const std::vector<EntityId>& layout, const Corpus& corpus,
                                  const PromptTemplate& tmpl, const TokenCounter& counter, const EntityId& from,
                                  const EntityId& to) {
  auto a = std::find(layout.begin(), layout.end(), from);
  auto b = std::find(layout.begin(), layout.end(), to);
  if (a == layout.end()) throw ParameterError("entity '" + from.str() + "' not in layout");
  if (b == layout.end()) throw ParameterError("entity '" + to.str() + "' not in layout");
  if (b < a) std::swap(a, b);
  std::size_t tokens = 0;
  for (auto it = a; it != b; ++it) {
    const auto& p = corpus.profile(*it);
    tokens += counter.count(tmpl.render_frame(p.display_name, it->str(), p.description));
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Test cases
// ---------------------------------------------------------------------------

struct TestCase {
  std::string case_id;
  ConnectionKind kind = ConnectionKind::Edge;
  std::size_t density = 0;  ///< k
  std::size_t entity_budget = 0;  ///< n
  double s = 0.0;
  double e = 1.0;
  std::uint64_t seed = 0;
  std::size_t index = 0;
  TemplateId template_id = TemplateId::Regular;
  std::string template_hash;
  std::vector<EntityId> layout;
  std::vector<std::string> names;            ///< display names, parallel to layout
  std::vector<std::size_t> frame_offsets;    ///< parallel to layout
  std::vector<std::vector<EntityId>> connections;  ///< members of c_1..c_k
  std::string prompt_text;
  std::size_t delta_tokens = 0;
  std::size_t token_length = 0;
  EdgeSet gold_edges;

  std::size_t position_of(const EntityId& id) const {
    auto it = std::find(layout.begin(), layout.end(), id);
    if (it == layout.end()) throw ParameterError("entity '" + id.str() + "' not in case " + case_id);
    return static_cast<std::size_t>(it - layout.begin());
  }

  /// Start-to-start token separation between two layout entities.
  std::size_t separation(const EntityId& a, const EntityId& b) const {
    std::size_t pa = frame_offsets[position_of(a)];
    std::size_t pb = frame_offsets[position_of(b)];
    return pa > pb ? pa - pb : pb - pa;
  }

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

inline TestCase make_test_case(const SamplePool& pool, const Corpus& corpus, const DispersionParams& params,
                               const PromptTemplate& tmpl, const TokenCounter& counter, std::size_t index) {
  Rng rng(params.seed, index);
  Layout layout = build_layout(pool, params, rng);
  RenderedPrompt rendered = render_prompt_detailed(layout.entities, corpus, tmpl, counter);

  TestCase tc;
  tc.kind = pool.kind;
  tc.density = params.k;
  tc.entity_budget = params.n;
  tc.s = params.s;
  tc.e = params.e;
  tc.seed = params.seed;
  tc.index = index;
  tc.template_id = tmpl.id;
  tc.template_hash = tmpl.hash();
  tc.layout = layout.entities;
  for (const auto& id : tc.layout) tc.names.push_back(corpus.profile(id).display_name);
  tc.frame_offsets = rendered.frame_offsets;
  for (auto idx : layout.connection_indices) {
    const auto& c = pool.connections[idx];
    tc.connections.push_back(c.members);
    tc.gold_edges.insert(c.internal_edges.begin(), c.internal_edges.end());
  }
  const std::size_t first = layout.block_starts.front();
  const std::size_t last = params.k == 1 ? first + 1 : layout.block_starts.back();
  tc.delta_tokens = rendered.frame_offsets[last] - rendered.frame_offsets[first];
  tc.prompt_text = std::move(rendered.text);
  tc.token_length = rendered.token_length;

  Fnv1a h;
  h.field(tc.template_hash).field(counter.description()).field(std::to_string(params.seed));
  h.field(std::to_string(params.s)).field(std::to_string(params.e)).field(std::to_string(index));
  for (const auto& id : tc.layout) h.field(id.str());
  char prefix[96];
  std::snprintf(prefix, sizeof prefix, "%s-k%zu-n%zu-%04zu-", to_string(tc.kind).c_str(), params.k, params.n, index);
  tc.case_id = prefix + h.hex().substr(0, 10);
  return tc;
}

/// params.count cases; case i draws from its own stream (params.seed, i).
inline std::vector<TestCase> generate_test_cases(const SamplePool& pool, const Corpus& corpus,
                                                 const DispersionParams& params, const PromptTemplate& tmpl,
                                                 const TokenCounter& counter) {
  params.validate();
  std::vector<TestCase> cases;
  cases.reserve(params.count);
  for (std::size_t i = 0; i < params.count; ++i) {
    cases.push_back(make_test_case(pool, corpus, params, tmpl, counter, i));
  }
  return cases;
}

// ---------------------------------------------------------------------------
// Suite files: one JSON record per line.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const TestCase& tc) {
  j = {{"case_id", tc.case_id},
       {"kind", tc.kind},
       {"params", {{"k", tc.density}, {"n", tc.entity_budget}, {"s", tc.s}, {"e", tc.e}, {"seed", tc.seed},
                   {"index", tc.index}}},
       {"template", tc.template_id},
       {"template_hash", tc.template_hash},
       {"layout", tc.layout},
       {"names", tc.names},
       {"frame_offsets", tc.frame_offsets},
       {"connections", tc.connections},
       {"delta", tc.delta_tokens},
       {"token_length", tc.token_length},
       {"gold_edges", tc.gold_edges},
       {"prompt", tc.prompt_text}};
}

inline void from_json(const nlohmann::json& j, TestCase& tc) {
  tc.case_id = j.at("case_id").get<std::string>();
  tc.kind = j.at("kind").get<ConnectionKind>();
  const auto& p = j.at("params");
  tc.density = p.at("k").get<std::size_t>();
  tc.entity_budget = p.at("n").get<std::size_t>();
  tc.s = p.at("s").get<double>();
  tc.e = p.at("e").get<double>();
  tc.seed = p.at("seed").get<std::uint64_t>();
  tc.index = p.at("index").get<std::size_t>();
  tc.template_id = j.at("template").get<TemplateId>();
  tc.template_hash = j.at("template_hash").get<std::string>();
  tc.layout = j.at("layout").get<std::vector<EntityId>>();
  tc.names = j.at("names").get<std::vector<std::string>>();
  tc.frame_offsets = j.at("frame_offsets").get<std::vector<std::size_t>>();
  tc.connections = j.at("connections").get<std::vector<std::vector<EntityId>>>();
  tc.delta_tokens = j.at("delta").get<std::size_t>();
  tc.token_length = j.at("token_length").get<std::size_t>();
  tc.gold_edges.clear();
  for (const auto& e : j.at("gold_edges")) tc.gold_edges.insert(e.get<Edge>());
  tc.prompt_text = j.at("prompt").get<std::string>();
  if (tc.names.size() != tc.layout.size() || tc.frame_offsets.size() != tc.layout.size()) {
    throw ParseError("case " + tc.case_id + ": layout, names and frame_offsets differ in length");
  }
}

inline void save_suite(const std::vector<TestCase>& cases, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write suite file " + path.string());
  for (const auto& tc : cases) out << nlohmann::json(tc).dump() << "\n";
}

inline std::vector<TestCase> load_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open suite file " + path.string());
  std::vector<TestCase> cases;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      cases.push_back(nlohmann::json::parse(line).get<TestCase>());
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return cases;
}

}  // namespace memdrift
