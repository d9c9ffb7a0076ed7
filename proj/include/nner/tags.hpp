#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nner/error.hpp"
#include "nner/types.hpp"

namespace nner {

/// B-I-O tag for one token at one nesting level. Rendered as "O", "B-XXX"
/// or "I-XXX".
struct BioTag {
  enum class Kind { O, B, I };
  Kind kind = Kind::O;
  EntityType type = EntityType::PER;  // meaningful only for B/I

  static BioTag o() { return {}; }
  static BioTag b(EntityType t) { return {Kind::B, t}; }
  static BioTag i(EntityType t) { return {Kind::I, t}; }

  bool is_o() const { return kind == Kind::O; }

  bool operator==(const BioTag& other) const {
    if (kind != other.kind) return false;
    return kind == Kind::O || type == other.type;
  }
};

inline std::string to_string(const BioTag& t) {
  switch (t.kind) {
    case BioTag::Kind::O: return "O";
    case BioTag::Kind::B: return std::string("B-") + to_string(t.type);
    case BioTag::Kind::I: return std::string("I-") + to_string(t.type);
  }
  return "O";
}

inline BioTag bio_tag_from(std::string_view s) {
  if (s == "O") return BioTag::o();
  if (s.size() >= 3 && s[1] == '-' && (s[0] == 'B' || s[0] == 'I')) {
    EntityType t = entity_type_from(s.substr(2));
    return s[0] == 'B' ? BioTag::b(t) : BioTag::i(t);
  }
  fail(ErrorKind::malformed_tag, "'" + std::string(s) + "' is not a BIO tag");
}

/// Pair of per-level BIO tags rendered as "<level1>+<level2>",
/// e.g. "B-LOC+I-ORG".
struct JointTag {
  BioTag level1;
  BioTag level2;

  bool operator==(const JointTag&) const = default;
};

inline std::string to_string(const JointTag& t) {
  return to_string(t.level1) + "+" + to_string(t.level2);
}

inline JointTag joint_tag_from(std::string_view s) {
  size_t plus = s.find('+');
  if (plus == std::string_view::npos || s.find('+', plus + 1) != std::string_view::npos) {
    fail(ErrorKind::malformed_joint_tag,
         "'" + std::string(s) + "' needs exactly one '+'");
  }
  try {
    return {bio_tag_from(s.substr(0, plus)), bio_tag_from(s.substr(plus + 1))};
  } catch (const Error&) {
    fail(ErrorKind::malformed_joint_tag, "'" + std::string(s) + "'");
  }
}

/// Encodes disjoint same-level spans as a BIO tag sequence of length
/// `n_tokens`. Throws OverlappingSpans if two spans share a token.
inline std::vector<BioTag> bio_encode(std::span<const EntitySpan> spans, size_t n_tokens) {
  std::vector<BioTag> tags(n_tokens, BioTag::o());
  std::vector<EntitySpan> ordered(spans.begin(), spans.end());
  std::sort(ordered.begin(), ordered.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return a.token_start < b.token_start;
  });
  size_t prev_end = 0;
  bool first = true;
  for (const EntitySpan& s : ordered) {
    if (s.token_start >= s.token_end || s.token_end > n_tokens) {
      fail(ErrorKind::overlapping_spans,
           "span [" + std::to_string(s.token_start) + "," + std::to_string(s.token_end) +
               ") out of range for " + std::to_string(n_tokens) + " tokens");
    }
    if (!first && s.token_start < prev_end) {
      fail(ErrorKind::overlapping_spans,
           "spans overlap at token " + std::to_string(s.token_start));
    }
    first = false;
    prev_end = s.token_end;
    tags[s.token_start] = BioTag::b(s.type);
    for (size_t t = s.token_start + 1; t < s.token_end; ++t) tags[t] = BioTag::i(s.type);
  }
  return tags;
}

/// Decodes maximal spans from a BIO sequence. With repair=true a stray I-X
/// (no preceding B-X/I-X of the same type) is treated as B-X; with
/// repair=false it throws InvalidSequence. Decoded spans carry level 0;
/// callers stamp the level they encoded.
inline std::vector<EntitySpan> bio_decode(std::span<const BioTag> tags, bool repair = true) {
  std::vector<EntitySpan> spans;
  bool open = false;
  EntitySpan cur;
  auto close = [&] {
    if (open) spans.push_back(cur);
    open = false;
  };
  for (size_t t = 0; t < tags.size(); ++t) {
    const BioTag& tag = tags[t];
    switch (tag.kind) {
      case BioTag::Kind::O:
        close();
        break;
      case BioTag::Kind::B:
        close();
        open = true;
        cur = {tag.type, t, t + 1, 0};
        break;
      case BioTag::Kind::I:
        if (open && cur.type == tag.type) {
          cur.token_end = t + 1;
        } else {
          if (!repair) {
            fail(ErrorKind::invalid_sequence,
                 "stray " + to_string(tag) + " at token " + std::to_string(t));
          }
          close();
          open = true;
          cur = {tag.type, t, t + 1, 0};
        }
        break;
    }
  }
  close();
  return spans;
}

/// Pairs per-level tag sequences element-wise into joint tags.
inline std::vector<JointTag> encode_joint(std::span<const BioTag> level1,
                                          std::span<const BioTag> level2) {
  if (level1.size() != level2.size()) {
    fail(ErrorKind::length_mismatch,
         std::to_string(level1.size()) + " level-1 tags vs " +
             std::to_string(level2.size()) + " level-2 tags");
  }
  std::vector<JointTag> out(level1.size());
  for (size_t i = 0; i < level1.size(); ++i) out[i] = {level1[i], level2[i]};
  return out;
}

/// Splits joint tags back into the two per-level sequences.
inline std::pair<std::vector<BioTag>, std::vector<BioTag>> decode_joint(
    std::span<const JointTag> tags) {
  std::pair<std::vector<BioTag>, std::vector<BioTag>> out;
  out.first.reserve(tags.size());
  out.second.reserve(tags.size());
  for (const JointTag& t : tags) {
    out.first.push_back(t.level1);
    out.second.push_back(t.level2);
  }
  return out;
}

inline std::vector<std::string> split_syllables(std::string_view surface) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t us = surface.find('_', start);
    if (us == std::string_view::npos) {
      parts.emplace_back(surface.substr(start));
      return parts;
    }
    parts.emplace_back(surface.substr(start, us - start));
    start = us + 1;
  }
}

inline std::vector<EntitySpan> entities_at_level(std::span<const EntitySpan> entities,
                                                 int level) {
  std::vector<EntitySpan> out;
  for (const EntitySpan& e : entities)
    if (e.level == level) out.push_back(e);
  return out;
}

/// Per-level BIO columns plus the joint column for one sentence. Level-3
/// entities do not contribute to any column.
struct TagColumns {
  std::vector<BioTag> level1;
  std::vector<BioTag> level2;
  std::vector<JointTag> joint;
};

inline TagColumns tag_columns(const Sentence& sent) {
  TagColumns cols;
  cols.level1 = bio_encode(entities_at_level(sent.entities, 1), sent.tokens.size());
  cols.level2 = bio_encode(entities_at_level(sent.entities, 2), sent.tokens.size());
  cols.joint = encode_joint(cols.level1, cols.level2);
  return cols;
}

/// Splits underscore-joined words into syllables and re-tags so the decoded
/// entity set is preserved: B-X yields B-X on the first syllable and I-X on
/// the rest, I-X and O propagate to every syllable.
inline std::pair<std::vector<std::string>, std::vector<BioTag>> syllable_explode(
    std::span<const std::string> surfaces, std::span<const BioTag> tags) {
  if (surfaces.size() != tags.size()) {
    fail(ErrorKind::length_mismatch,
         std::to_string(surfaces.size()) + " tokens vs " + std::to_string(tags.size()) +
             " tags");
  }
  std::pair<std::vector<std::string>, std::vector<BioTag>> out;
  for (size_t i = 0; i < surfaces.size(); ++i) {
    std::vector<std::string> syls = split_syllables(surfaces[i]);
    for (size_t k = 0; k < syls.size(); ++k) {
      BioTag tag = tags[i];
      if (tag.kind == BioTag::Kind::B && k > 0) tag = BioTag::i(tag.type);
      out.first.push_back(std::move(syls[k]));
      out.second.push_back(tag);
    }
  }
  return out;
}

}  // namespace nner
