#pragma once

// Turns a raw model answer into a predicted edge set over a test case's roster.
//
// Only the first fenced block is read when one exists; otherwise every line is scanned.
// A line yields mentions when it contains one of the pair separators
//   "<-->", "<->", "->", "--", em dash, en dash, " - ", "-", ",", ";", " and ", " with "
// (tried in that order; the first one present splits the line). Chains such as
// "A -- B -- C" yield the consecutive pairs. Mentions resolve through normalize_name
// against roster display names and ids, exact match only.

#include "memdrift/graph.hpp"
#include "memdrift/promptgen.hpp"
#include "memdrift/text.hpp"

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace memdrift {

/// Names and ids the answer may mention, mapped to entity ids.
class Roster {
 public:
  Roster() = default;

  Roster(const std::vector<EntityId>& ids, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      add(normalize_name(ids[i].str()), ids[i]);
      if (i < names.size()) add(normalize_name(names[i]), ids[i]);
    }
  }

  static Roster of(const TestCase& tc) { return Roster(tc.layout, tc.names); }

  std::optional<EntityId> resolve(std::string_view mention) const {
    auto it = by_key_.find(normalize_name(mention));
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
  }

 private:
  void add(std::string key, const EntityId& id) {
    if (!key.empty()) by_key_.emplace(std::move(key), id);
  }

  std::map<std::string, EntityId, std::less<>> by_key_;
};

struct PredictedGraph {
  EdgeSet edges;
  std::vector<std::pair<std::string, std::string>> unresolved_mentions;
};

struct EdgeTally {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t gold_count = 0;  ///< P

  friend bool operator==(const EdgeTally&, const EdgeTally&) = default;
};

namespace detail {

/// Text inside the first ``` fence (language tag line skipped), or nullopt if there is none.
inline std::optional<std::string_view> fenced_block(std::string_view text) {
  auto open = text.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  auto body_start = open + 3;
  auto close = text.find("```", body_start);
  std::string_view body = text.substr(body_start, close == std::string_view::npos ? std::string_view::npos
                                                                                  : close - body_start);
  // A tag such as ```text on the opening line is not content.
  auto nl = body.find('\n');
  if (nl != std::string_view::npos) {
    std::string_view tag = trim(body.substr(0, nl));
    if (!tag.empty() && tag.find_first_of(" ,-") == std::string_view::npos &&
        tag.find("\xE2\x80") == std::string_view::npos) {
      body.remove_prefix(nl + 1);
    }
  }
  return body;
}

inline std::string_view strip_list_marker(std::string_view line) {
  line = trim(line);
  for (std::string_view bullet : {"- ", "* ", "+ ", "\xE2\x80\xA2 "}) {
    if (line.substr(0, bullet.size()) == bullet) return trim(line.substr(bullet.size()));
  }
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ') {
    return trim(line.substr(i + 2));
  }
  return line;
}

inline std::string_view strip_brackets(std::string_view s) {
  s = trim(s);
  while (s.size() >= 2 && ((s.front() == '(' && s.back() == ')') || (s.front() == '[' && s.back() == ']') ||
                           (s.front() == '{' && s.back() == '}'))) {
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

inline std::vector<std::string_view> split_all(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto at = s.find(sep, start);
    if (at == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, at - start));
    start = at + sep.size();
  }
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Splits a line into mentions using the first separator present; fewer than two means no pair.
inline std::vector<std::string> split_mentions(std::string_view line) {
  static constexpr std::array<std::string_view, 10> symbolic = {
      "<-->", "<->", "->", "--", "\xE2\x80\x94", "\xE2\x80\x93", " - ", "-", ",", ";"};
  line = strip_brackets(strip_list_marker(line));
  for (auto sep : symbolic) {
    if (line.find(sep) == std::string_view::npos) continue;
    std::vector<std::string> out;
    for (auto part : split_all(line, sep)) out.emplace_back(strip_brackets(part));
    return out;
  }
  // Word separators, case-insensitive; offsets line up because lowering is bytewise.
  const std::string lowered = lower_ascii(line);
  for (std::string_view sep : {" and ", " with "}) {
    if (lowered.find(sep) == std::string::npos) continue;
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      auto at = lowered.find(sep, start);
      auto end = at == std::string::npos ? line.size() : at;
      out.emplace_back(strip_brackets(line.substr(start, end - start)));
      if (at == std::string::npos) break;
      start = at + sep.size();
    }
    return out;
  }
  return {};
}

}  // namespace detail

inline PredictedGraph parse_prediction(std::string_view raw_text, const Roster& roster) {
  PredictedGraph out;
  auto block = detail::fenced_block(raw_text);
  const std::string_view scope = block ? *block : raw_text;

  bool saw_pair = false;
  for (auto line : split_lines(scope)) {
    auto mentions = detail::split_mentions(line);
    if (mentions.size() < 2) continue;
    saw_pair = true;
    for (std::size_t i = 0; i + 1 < mentions.size(); ++i) {
      const auto& a = mentions[i];
      const auto& b = mentions[i + 1];
      auto ra = roster.resolve(a);
      auto rb = roster.resolve(b);
      if (!ra || !rb) {
        out.unresolved_mentions.emplace_back(a, b);
        continue;
      }
      if (*ra == *rb) continue;
      out.edges.insert(Edge::make(*ra, *rb));
    }
  }
  if (!block && !saw_pair && !trim(raw_text).empty()) {
    out.unresolved_mentions.emplace_back(std::string(raw_text), std::string());
  }
  return out;
}

inline EdgeTally tally(const PredictedGraph& predicted, const EdgeSet& gold) {
  EdgeTally t;
  t.gold_count = gold.size();
  for (const auto& e : predicted.edges) {
    if (gold.count(e)) {
      ++t.tp;
    } else {
      ++t.fp;
    }
  }
  t.fn = t.gold_count - t.tp;
  return t;
}

}  // namespace memdrift
