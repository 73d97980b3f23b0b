#pragma once

#include "memdrift/error.hpp"
#include "memdrift/hashing.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace memdrift {

enum class TokenCounterMode { Whitespace, BytesOver4, ExternalVocab };

/// Counts prompt tokens. count("") == 0 in every mode. Counting a concatenation differs
/// from the sum of the parts' counts by at most one token per join; joins that fall on
/// whitespace are exact in Whitespace and ExternalVocab modes.
class TokenCounter {
 public:
  TokenCounter() = default;

  static TokenCounter whitespace() { return TokenCounter{}; }

  static TokenCounter bytes_over_4() {
    TokenCounter c;
    c.mode_ = TokenCounterMode::BytesOver4;
    return c;
  }

  /// Greedy longest-match over a vocabulary, applied to each whitespace-delimited word.
  /// Bytes not covered by any entry count one token each.
  static TokenCounter from_vocab(const std::vector<std::string>& entries, std::string label = "inline") {
    TokenCounter c;
    c.mode_ = TokenCounterMode::ExternalVocab;
    auto vocab = std::make_shared<Vocab>();
    Fnv1a h;
    for (const auto& e : entries) {
      if (e.empty()) continue;
      vocab->entries.insert(e);
      vocab->max_len = std::max(vocab->max_len, e.size());
      h.field(e);
    }
    c.vocab_ = std::move(vocab);
    c.label_ = std::move(label) + ":" + h.hex();
    return c;
  }

  /// One vocabulary entry per line.
  static TokenCounter from_vocab_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vocabulary file " + path.string());
    std::vector<std::string> entries;
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      entries.push_back(std::move(line));
    }
    return from_vocab(entries, "vocab");
  }

  TokenCounterMode mode() const noexcept { return mode_; }

  /// Stable identifier of the counting rule, recorded in manifests.
  std::string description() const {
    switch (mode_) {
      case TokenCounterMode::Whitespace: return "whitespace";
      case TokenCounterMode::BytesOver4: return "bytes4";
      case TokenCounterMode::ExternalVocab: return label_;
    }
    return "whitespace";
  }

  std::size_t count(std::string_view text) const {
    switch (mode_) {
      case TokenCounterMode::Whitespace: return count_whitespace(text);
      case TokenCounterMode::BytesOver4: return (text.size() + 3) / 4;
      case TokenCounterMode::ExternalVocab: return count_vocab(text);
    }
    return 0;
  }

  /// Largest allowed |count(a+b+...) - (count(a)+count(b)+...)| for the given number of joins.
  static std::size_t boundary_tolerance(std::size_t joins) noexcept { return joins; }

 private:
  struct Vocab {
    std::unordered_set<std::string> entries;
    std::size_t max_len = 0;
  };

  static bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

  static std::size_t count_whitespace(std::string_view text) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
      bool space = is_space(c);
      if (!space && !in_word) ++n;
      in_word = !space;
    }
    return n;
  }

  std::size_t count_vocab(std::string_view text) const {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < text.size()) {
      if (is_space(text[i])) {
        ++i;
        continue;
      }
      std::size_t end = i;
      while (end < text.size() && !is_space(text[end])) ++end;
      n += count_word(text.substr(i, end - i));
      i = end;
    }
    return n;
  }

  std::size_t count_word(std::string_view word) const {
    std::size_t n = 0;
    std::size_t i = 0;
    std::string probe;
    while (i < word.size()) {
      std::size_t len = std::min(vocab_->max_len, word.size() - i);
      for (; len > 1; --len) {
        probe.assign(word.substr(i, len));
        if (vocab_->entries.count(probe)) break;
      }
      i += std::max<std::size_t>(len, 1);
      ++n;
    }
    return n;
  }

  TokenCounterMode mode_ = TokenCounterMode::Whitespace;
  std::shared_ptr<const Vocab> vocab_;
  std::string label_;
};

}  // namespace memdrift
