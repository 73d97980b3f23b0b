#pragma once

#include "memdrift/memdrift.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace memdrift::testing {

inline EntityId id(const std::string& s) { return EntityId(s); }

inline NodeSet nodes(std::initializer_list<const char*> names) {
  NodeSet out;
  for (const auto* n : names) out.insert(EntityId(n));
  return out;
}

inline EdgeSet edges(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  EdgeSet out;
  for (const auto& [a, b] : pairs) out.insert(Edge::make(std::string(a), std::string(b)));
  return out;
}

/// Graph over the given node names plus every endpoint mentioned in `pairs`.
inline LatentGraph graph(std::initializer_list<const char*> names,
                         std::initializer_list<std::pair<const char*, const char*>> pairs = {}) {
  LatentGraph g;
  for (const auto* n : names) g.add_node(EntityId(n));
  for (const auto& [a, b] : pairs) {
    g.add_node(EntityId(a));
    g.add_node(EntityId(b));
    g.add_edge(EntityId(a), EntityId(b));
  }
  return g;
}

/// Corpus whose profiles have fixed word counts, so whitespace token counts are known.
inline Corpus corpus_with_word_counts(const std::vector<std::pair<std::string, std::size_t>>& entities,
                                      const LatentGraph& g = {}) {
  std::map<EntityId, EntityProfile> profiles;
  LatentGraph graph = g;
  for (const auto& [name, words] : entities) {
    std::string text;
    for (std::size_t i = 0; i < words; ++i) text += (i ? " w" : "w") + std::to_string(i);
    profiles.emplace(EntityId(name), EntityProfile{EntityId(name), "Name " + name, text});
    graph.add_node(EntityId(name));
  }
  return Corpus(std::move(profiles), std::move(graph));
}

/// Template whose frame is just the description, with empty preamble and closing.
inline PromptTemplate bare_template() {
  PromptTemplate t;
  t.id = TemplateId::Regular;
  t.per_entity_frame = "{text}\n";
  return t;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("memdrift-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace memdrift::testing
