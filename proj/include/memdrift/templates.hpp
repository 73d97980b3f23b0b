#pragma once

#include "memdrift/error.hpp"
#include "memdrift/hashing.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace memdrift {

enum class TemplateId { Regular, CotBasic, CotExpanded };

inline std::string to_string(TemplateId id) {
  switch (id) {
    case TemplateId::Regular: return "regular";
    case TemplateId::CotBasic: return "cot-basic";
    case TemplateId::CotExpanded: return "cot-expanded";
  }
  return "regular";
}

inline TemplateId parse_template_id(std::string_view s) {
  if (s == "regular") return TemplateId::Regular;
  if (s == "cot-basic") return TemplateId::CotBasic;
  if (s == "cot-expanded") return TemplateId::CotExpanded;
  throw ParameterError("unknown template '" + std::string(s) + "'");
}

inline void to_json(nlohmann::json& j, TemplateId id) { j = to_string(id); }
inline void from_json(const nlohmann::json& j, TemplateId& id) { id = parse_template_id(j.get<std::string>()); }

/// Prompt = preamble + one frame per entity + closing instruction.
/// Frames substitute {name}, {id} and {text}.
struct PromptTemplate {
  TemplateId id = TemplateId::Regular;
  int version = 1;
  std::string preamble;
  std::string per_entity_frame;
  std::string closing_instruction;

  std::string hash() const {
    return Fnv1a{}
        .field(to_string(id))
        .field(std::to_string(version))
        .field(preamble)
        .field(per_entity_frame)
        .field(closing_instruction)
        .hex();
  }

  std::string render_frame(std::string_view name, std::string_view entity_id, std::string_view text) const {
    std::string out;
    std::string_view f = per_entity_frame;
    for (std::size_t i = 0; i < f.size();) {
      if (f.substr(i, 6) == "{name}") {
        out += name;
        i += 6;
      } else if (f.substr(i, 4) == "{id}") {
        out += entity_id;
        i += 4;
      } else if (f.substr(i, 6) == "{text}") {
        out += text;
        i += 6;
      } else {
        out.push_back(f[i++]);
      }
    }
    return out;
  }

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

/// The answer grammar every shipped template asks for. Extraction parses this shape.
inline constexpr std::string_view kAnswerGrammar =
    "Reply with a single fenced code block (```) containing one pair per line in the form "
    "`Name -- Name`, using the names exactly as written above. If no pairs are connected, "
    "reply with an empty code block.\n";

inline const PromptTemplate& builtin_template(TemplateId id) {
  static const std::string frame = "## {name}\n{text}\n\n";
  static const std::string preamble =
      "You will read short profiles of several people. Some pairs of people are connected: "
      "their profiles mention the same event, place, or contact. Most people are unrelated "
      "to anyone else.\n\n";
  static const PromptTemplate regular{TemplateId::Regular, 1, preamble, frame,
                                      "List every pair of connected people. " + std::string(kAnswerGrammar)};
  static const PromptTemplate cot_basic{
      TemplateId::CotBasic, 1, preamble, frame,
      "List every pair of connected people. Think step by step about which profiles share an "
      "event, place, or contact before you answer. " +
          std::string(kAnswerGrammar)};
  static const PromptTemplate cot_expanded{
      TemplateId::CotExpanded, 1,
      preamble,
      frame,
      "List every pair of connected people. Work through these steps before you answer:\n"
      "1. For each profile, note every event, place, account, or code it mentions.\n"
      "2. Group the profiles that mention the same item.\n"
      "3. For each candidate pair, reread both profiles and confirm the shared item.\n"
      "4. Drop pairs whose only overlap is generic, such as a city, a job, or a hobby.\n"
      "After the steps, give the final answer. " +
          std::string(kAnswerGrammar)};
  switch (id) {
    case TemplateId::Regular: return regular;
    case TemplateId::CotBasic: return cot_basic;
    case TemplateId::CotExpanded: return cot_expanded;
  }
  return regular;
}

inline void to_json(nlohmann::json& j, const PromptTemplate& t) {
  j = {{"id", t.id},
       {"version", t.version},
       {"preamble", t.preamble},
       {"per_entity_frame", t.per_entity_frame},
       {"closing_instruction", t.closing_instruction}};
}

inline void from_json(const nlohmann::json& j, PromptTemplate& t) {
  t.id = j.at("id").get<TemplateId>();
  t.version = j.at("version").get<int>();
  t.preamble = j.at("preamble").get<std::string>();
  t.per_entity_frame = j.at("per_entity_frame").get<std::string>();
  t.closing_instruction = j.at("closing_instruction").get<std::string>();
}

inline PromptTemplate load_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open template file " + path.string());
  try {
    return nlohmann::json::parse(in).get<PromptTemplate>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("template " + path.string() + ": " + ex.what());
  }
}

}  // namespace memdrift
