#pragma once

#include "memdrift/error.hpp"
#include "memdrift/graph.hpp"
#include "memdrift/hashing.hpp"
#include "memdrift/random.hpp"
#include "memdrift/text.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace memdrift {

struct EntityProfile {
  EntityId id;
  std::string display_name;
  std::string description;

  friend bool operator==(const EntityProfile&, const EntityProfile&) = default;
};

/// Entity profiles bound to the latent graph over the same id set. Immutable after construction.
class Corpus {
 public:
  Corpus() = default;

  /// Validates: non-empty descriptions, profile ids == graph nodes, no display-name collisions
  /// after normalization (names and ids share one resolution namespace).
  Corpus(std::map<EntityId, EntityProfile> profiles, LatentGraph graph)
      : profiles_(std::move(profiles)), graph_(std::move(graph)) {
    validate();
  }

  const std::map<EntityId, EntityProfile>& profiles() const noexcept { return profiles_; }
  const LatentGraph& graph() const noexcept { return graph_; }

  const EntityProfile& profile(const EntityId& id) const {
    auto it = profiles_.find(id);
    if (it == profiles_.end()) throw IntegrityError("unknown entity '" + id.str() + "'");
    return it->second;
  }

  bool contains(const EntityId& id) const { return profiles_.count(id) != 0; }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  void validate() const {
    std::map<std::string, EntityId> claimed;
    auto claim = [&](const std::string& key, const EntityId& owner, const std::string& what) {
      if (key.empty()) throw IntegrityError(what + " of '" + owner.str() + "' normalizes to empty");
      auto [it, fresh] = claimed.emplace(key, owner);
      if (!fresh && it->second != owner) {
        throw IntegrityError(what + " '" + key + "' of '" + owner.str() + "' collides with entity '" +
                             it->second.str() + "'");
      }
    };
    for (const auto& [id, p] : profiles_) {
      if (id != p.id) throw IntegrityError("profile key '" + id.str() + "' != profile id '" + p.id.str() + "'");
      if (p.description.empty()) throw IntegrityError("empty description for '" + id.str() + "'");
      if (!graph_.contains(id)) throw IntegrityError("profile '" + id.str() + "' missing from graph");
      claim(normalize_name(id.str()), id, "id");
      claim(normalize_name(p.display_name), id, "display name");
    }
    for (const auto& v : graph_.nodes()) {
      if (!profiles_.count(v)) throw IntegrityError("graph node '" + v.str() + "' has no profile");
    }
  }

  std::map<EntityId, EntityProfile> profiles_;
  LatentGraph graph_;
};

// ---------------------------------------------------------------------------
// Corpus file format:
//   {"profiles": [{"id": "...", "name": "...", "text": "..."}, ...],
//    "edges":    [["id", "id"], ...]}
// ---------------------------------------------------------------------------

inline Corpus corpus_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("profiles") || !doc.contains("edges")) {
    throw ParseError("corpus document needs top-level 'profiles' and 'edges'");
  }
  const auto& profiles_json = doc.at("profiles");
  const auto& edges_json = doc.at("edges");
  if (!profiles_json.is_array() || !edges_json.is_array()) {
    throw ParseError("'profiles' and 'edges' must be arrays");
  }

  std::map<EntityId, EntityProfile> profiles;
  LatentGraph graph;
  for (const auto& rec : profiles_json) {
    EntityProfile p;
    try {
      p.id = EntityId(rec.at("id").get<std::string>());
      p.display_name = rec.at("name").get<std::string>();
      p.description = rec.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("malformed profile record " + rec.dump() + ": " + ex.what());
    }
    if (p.id.empty()) throw IntegrityError("profile with empty id: " + rec.dump());
    if (profiles.count(p.id)) throw IntegrityError("duplicate entity id '" + p.id.str() + "'");
    graph.add_node(p.id);
    profiles.emplace(p.id, std::move(p));
  }
  for (const auto& rec : edges_json) {
    if (!rec.is_array() || rec.size() != 2 || !rec[0].is_string() || !rec[1].is_string()) {
      throw ParseError("malformed edge record " + rec.dump());
    }
    EntityId a(rec[0].get<std::string>());
    EntityId b(rec[1].get<std::string>());
    for (const auto* v : {&a, &b}) {
      if (!graph.contains(*v)) {
        throw IntegrityError("edge " + rec.dump() + " references unknown entity '" + v->str() + "'");
      }
    }
    graph.add_edge(a, b);
  }
  return Corpus(std::move(profiles), std::move(graph));
}

inline nlohmann::json corpus_to_json(const Corpus& corpus) {
  nlohmann::json profiles = nlohmann::json::array();
  for (const auto& [id, p] : corpus.profiles()) {
    profiles.push_back({{"id", id.str()}, {"name", p.display_name}, {"text", p.description}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : corpus.graph().edges()) edges.push_back(e);
  return {{"profiles", std::move(profiles)}, {"edges", std::move(edges)}};
}

inline std::string corpus_to_string(const Corpus& corpus) { return corpus_to_json(corpus).dump(2) + "\n"; }

inline std::string corpus_hash(const Corpus& corpus) { return content_hash(corpus_to_string(corpus)); }

inline Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError("corpus " + path.string() + ": " + ex.what());
  }
  return corpus_from_json(doc);
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  out << corpus_to_string(corpus);
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

enum class CueStyle { SharedEvent, SharedLocation, SharedContact };

inline std::string to_string(CueStyle style) {
  switch (style) {
    case CueStyle::SharedEvent: return "shared-event";
    case CueStyle::SharedLocation: return "shared-location";
    case CueStyle::SharedContact: return "shared-contact";
  }
  return "shared-event";
}

inline CueStyle parse_cue_style(std::string_view s) {
  if (s == "shared-event") return CueStyle::SharedEvent;
  if (s == "shared-location") return CueStyle::SharedLocation;
  if (s == "shared-contact") return CueStyle::SharedContact;
  throw ParameterError("unknown cue style '" + std::string(s) + "'");
}

inline void to_json(nlohmann::json& j, CueStyle s) { j = to_string(s); }
inline void from_json(const nlohmann::json& j, CueStyle& s) { s = parse_cue_style(j.get<std::string>()); }

struct TokenBudget {
  std::size_t min_tokens = 40;
  std::size_t max_tokens = 80;
};

struct SynthSpec {
  std::size_t node_count = 50;
  double edge_probability = 0.05;
  TokenBudget profile_token_budget;
  CueStyle cue_style = CueStyle::SharedEvent;
  std::uint64_t seed = 0;

  void validate() const {
    if (node_count < 2) throw ParameterError("synthetic corpus needs node_count >= 2");
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
      throw ParameterError("edge_probability must lie in [0, 1]");
    }
    if (profile_token_budget.min_tokens == 0 ||
        profile_token_budget.min_tokens >= profile_token_budget.max_tokens) {
      throw ParameterError("profile token budget must satisfy 0 < min < max");
    }
  }
};

namespace detail {

inline constexpr std::array<std::string_view, 40> kGivenNames = {
    "Amira", "Bastian", "Celeste", "Dmitri", "Elena", "Farid", "Greta", "Hakim", "Ingrid", "Jonas",
    "Keiko", "Leandro", "Marisol", "Nikolai", "Odette", "Pavel", "Quinn", "Rosalind", "Samir", "Tamsin",
    "Ulrich", "Valeria", "Wendell", "Xiomara", "Yusuf", "Zelda", "Anselm", "Beatrix", "Cyrus", "Delphine",
    "Emeric", "Fiona", "Gideon", "Helena", "Ivo", "Juniper", "Kasimir", "Lucinda", "Matthias", "Noor"};

inline constexpr std::array<std::string_view, 40> kFamilyNames = {
    "Abernathy", "Baptiste", "Castellanos", "Dragomir", "Eriksen", "Fairbanks", "Galloway", "Hadid",
    "Iversen", "Jablonski", "Kowalczyk", "Lindqvist", "Marchetti", "Nakamura", "Okonkwo", "Petrosyan",
    "Quiroga", "Rasmussen", "Salazar", "Thorne", "Umarov", "Vasquez", "Whitaker", "Xu", "Yilmaz",
    "Zabrowski", "Achterberg", "Bellamy", "Cardenas", "Delacroix", "Esposito", "Fontaine", "Grunwald",
    "Halvorsen", "Ibarra", "Janssen", "Kaur", "Lombardi", "Moreau", "Novak"};

inline constexpr std::array<std::string_view, 12> kOccupations = {
    "a freight dispatcher", "a hospital pharmacist", "a secondary-school teacher", "a civil engineer",
    "a bakery owner", "a courier", "an accountant", "a translator", "a taxi driver", "a lab technician",
    "a graphic designer", "a warehouse supervisor"};

inline constexpr std::array<std::string_view, 12> kCities = {
    "Lisbon", "Rotterdam", "Marseille", "Hamburg", "Antwerp", "Genoa",
    "Valencia", "Gdansk", "Porto", "Trieste", "Bilbao", "Naples"};

inline constexpr std::array<std::string_view, 12> kPastimes = {
    "amateur astronomy", "long-distance cycling", "chess", "restoring old radios", "birdwatching",
    "choir singing", "pottery", "rock climbing", "sailing", "baking bread", "photography", "gardening"};

inline constexpr std::array<std::string_view, 10> kFillerTemplates = {
    "{name} works as {occupation} in {city}.",
    "Neighbours describe {name} as quiet, punctual, and rarely seen at social gatherings.",
    "In spare hours {name} spends most weekends on {pastime}.",
    "{name} moved to {city} several years ago after finishing a vocational programme.",
    "Records show that {name} pays rent on time and keeps a modest savings account.",
    "Former colleagues recall that {name} was reliable but kept personal matters private.",
    "{name} travels by train to visit relatives a few times each year.",
    "A library card issued to {name} shows frequent loans of history and travel books.",
    "{name} volunteers occasionally at a community kitchen near the old harbour.",
    "Phone records list {name} as the holder of a prepaid line registered in {city}."};

inline std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        auto it = vars.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

inline std::string cue_code(CueStyle style, std::size_t edge_index, Rng& rng) {
  static constexpr std::string_view letters = "ABCDEFGHJKLMNPQRSTUVWXYZ";
  std::string prefix = style == CueStyle::SharedEvent      ? "OP"
                       : style == CueStyle::SharedLocation ? "SITE"
                                                           : "LINE";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", edge_index);
  std::string code = prefix + "-" + buf + "-";
  code.push_back(letters[rng.below(letters.size())]);
  code.push_back(letters[rng.below(letters.size())]);
  return code;
}

inline std::string cue_sentence(CueStyle style, const std::string& name, const std::string& code, Rng& rng) {
  static constexpr std::array<std::string_view, 3> event = {
      "{name} took part in the gathering recorded under code {code}.",
      "A ledger entry places {name} at the operation logged as {code}.",
      "{name} was listed among the attendees of meeting {code}."};
  static constexpr std::array<std::string_view, 3> location = {
      "{name} holds a key to the storage unit registered as {code}.",
      "Surveillance notes place {name} at the address filed under {code}.",
      "{name} has been seen entering the premises catalogued as {code}."};
  static constexpr std::array<std::string_view, 3> contact = {
      "{name} regularly calls the number tagged {code}.",
      "Messages from {name} were routed through the relay account {code}.",
      "{name} exchanged letters with the postbox identified as {code}."};
  const auto& pool = style == CueStyle::SharedEvent ? event : style == CueStyle::SharedLocation ? location : contact;
  return fill(pool[rng.below(pool.size())], {{"name", name}, {"code", code}});
}

}  // namespace detail

/// Builds a corpus whose latent graph is G(n, p). Edge draws happen first, on a stream seeded
/// directly with spec.seed, in (i, j) order over i < j; one draw per pair. Text comes from a
/// separate stream. Each edge plants a unique code token into both endpoint descriptions.
inline Corpus generate_synthetic_corpus(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.node_count;
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n - 1).size());

  std::vector<EntityId> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    ids.emplace_back("P" + std::string(width - digits.size(), '0') + digits);
  }

  LatentGraph graph;
  for (const auto& id : ids) graph.add_node(id);
  Rng edge_rng(spec.seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (edge_rng.bernoulli(spec.edge_probability)) graph.add_edge(ids[i], ids[j]);
    }
  }

  Rng text_rng(spec.seed, 1);
  const std::size_t combos = detail::kGivenNames.size() * detail::kFamilyNames.size();
  auto name_order = text_rng.sample_indices(combos, std::min(n, combos));
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = name_order[i % name_order.size()];
    names[i] = std::string(detail::kGivenNames[c / detail::kFamilyNames.size()]) + " " +
               std::string(detail::kFamilyNames[c % detail::kFamilyNames.size()]);
    if (i >= combos) names[i] += " " + std::to_string(i / combos + 1);
  }

  // Cue sentences per node, in canonical edge order.
  std::map<EntityId, std::vector<std::string>> cues;
  std::map<EntityId, std::size_t> index_of;
  for (std::size_t i = 0; i < n; ++i) index_of[ids[i]] = i;
  std::size_t edge_index = 0;
  for (const auto& e : graph.edges()) {
    std::string code = detail::cue_code(spec.cue_style, edge_index++, text_rng);
    for (const auto* v : {&e.first, &e.second}) {
      cues[*v].push_back(detail::cue_sentence(spec.cue_style, names[index_of[*v]], code, text_rng));
    }
  }

  std::map<EntityId, EntityProfile> profiles;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string first = names[i].substr(0, names[i].find(' '));
    const std::map<std::string, std::string> vars = {
        {"name", first},
        {"occupation", std::string(detail::kOccupations[text_rng.below(detail::kOccupations.size())])},
        {"city", std::string(detail::kCities[text_rng.below(detail::kCities.size())])},
        {"pastime", std::string(detail::kPastimes[text_rng.below(detail::kPastimes.size())])}};
    const std::size_t target =
        text_rng.between(spec.profile_token_budget.min_tokens, spec.profile_token_budget.max_tokens);

    std::vector<std::string> sentences;
    sentences.push_back(names[i] + " is " + vars.at("occupation") + " based in " + vars.at("city") + ".");
    std::size_t words = count_words(sentences.back());
    for (const auto& c : cues[ids[i]]) words += count_words(c);
    std::vector<std::size_t> filler_order(detail::kFillerTemplates.size());
    for (std::size_t f = 0; f < filler_order.size(); ++f) filler_order[f] = f;
    text_rng.shuffle(filler_order);
    for (std::size_t f = 0; words < target; ++f) {
      std::string s = detail::fill(detail::kFillerTemplates[filler_order[f % filler_order.size()]], vars);
      words += count_words(s);
      sentences.push_back(std::move(s));
    }
    for (const auto& c : cues[ids[i]]) {
      auto pos = 1 + text_rng.below(sentences.size());
      sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(pos), c);
    }

    std::string text;
    for (const auto& s : sentences) {
      if (!text.empty()) text.push_back(' ');
      text += s;
    }
    profiles.emplace(ids[i], EntityProfile{ids[i], names[i], std::move(text)});
  }
  return Corpus(std::move(profiles), std::move(graph));
}

inline void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = {{"node_count", s.node_count},
       {"edge_probability", s.edge_probability},
       {"profile_token_budget", {s.profile_token_budget.min_tokens, s.profile_token_budget.max_tokens}},
       {"cue_style", s.cue_style},
       {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, SynthSpec& s) {
  s = SynthSpec{};
  if (j.contains("node_count")) s.node_count = j.at("node_count").get<std::size_t>();
  if (j.contains("edge_probability")) s.edge_probability = j.at("edge_probability").get<double>();
  if (j.contains("profile_token_budget")) {
    const auto& b = j.at("profile_token_budget");
    s.profile_token_budget = {b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>()};
  }
  if (j.contains("cue_style")) s.cue_style = j.at("cue_style").get<CueStyle>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
}

}  // namespace memdrift
