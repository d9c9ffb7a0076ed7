#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nner/error.hpp"

namespace nner {

enum class EntityType { PER, LOC, ORG, MISC };

inline const char* to_string(EntityType t) {
  switch (t) {
    case EntityType::PER: return "PER";
    case EntityType::LOC: return "LOC";
    case EntityType::ORG: return "ORG";
    case EntityType::MISC: return "MISC";
  }
  return "?";
}

inline EntityType entity_type_from(std::string_view s) {
  if (s == "PER") return EntityType::PER;
  if (s == "LOC") return EntityType::LOC;
  if (s == "ORG") return EntityType::ORG;
  if (s == "MISC") return EntityType::MISC;
  fail(ErrorKind::unknown_entity_type, "'" + std::string(s) + "'");
}

/// All four types, in the report order used throughout.
inline const std::vector<EntityType>& all_entity_types() {
  static const std::vector<EntityType> types = {
      EntityType::PER, EntityType::LOC, EntityType::ORG, EntityType::MISC};
  return types;
}

/// One word token. Offsets are code-point offsets into the sentence text,
/// end exclusive. Multi-syllable words carry "_" as the syllable joiner.
struct Token {
  std::string surface;
  size_t char_start = 0;
  size_t char_end = 0;

  bool operator==(const Token&) const = default;
};

/// Typed entity span over token indices, end exclusive. `level` is 1 for
/// innermost entities, 2 for entities containing only level-1 entities,
/// 3 for entities containing a level-2 entity.
struct EntitySpan {
  EntityType type = EntityType::PER;
  size_t token_start = 0;
  size_t token_end = 0;
  int level = 1;

  bool operator==(const EntitySpan&) const = default;
  auto operator<=>(const EntitySpan&) const = default;
};

/// Typed entity span over code-point offsets, before token projection.
struct CharSpan {
  EntityType type = EntityType::PER;
  size_t begin = 0;
  size_t end = 0;
  int level = 0;  // 0 until assign_entity_levels has run

  bool operator==(const CharSpan&) const = default;
  auto operator<=>(const CharSpan&) const = default;
};

struct Sentence {
  std::string raw_text;
  std::vector<Token> tokens;
  std::vector<EntitySpan> entities;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
};

}  // namespace nner
