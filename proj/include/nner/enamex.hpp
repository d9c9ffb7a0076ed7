#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nner/error.hpp"
#include "nner/types.hpp"
#include "nner/unicode.hpp"

namespace nner {

struct EnamexParse {
  std::string text;             // input with all ENAMEX markup stripped
  std::vector<CharSpan> spans;  // code-point spans, in tag-opening order
};

namespace detail {

inline bool starts_with_at(std::string_view s, size_t i, std::string_view prefix) {
  return s.compare(i, prefix.size(), prefix) == 0;
}

inline size_t skip_spaces(std::string_view s, size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

// Reads TYPE="X" or TYPE=``X'' starting at i; returns (type, next index).
inline std::pair<EntityType, size_t> parse_type_attr(std::string_view s, size_t i) {
  i = skip_spaces(s, i);
  if (!starts_with_at(s, i, "TYPE")) {
    fail(ErrorKind::parse_error,
         "expected TYPE attribute at byte " + std::to_string(i));
  }
  i = skip_spaces(s, i + 4);
  if (i >= s.size() || s[i] != '=') {
    fail(ErrorKind::parse_error, "expected '=' at byte " + std::to_string(i));
  }
  i = skip_spaces(s, i + 1);
  std::string_view closer;
  if (i < s.size() && s[i] == '"') {
    closer = "\"";
    ++i;
  } else if (starts_with_at(s, i, "``")) {
    closer = "''";
    i += 2;
  } else {
    fail(ErrorKind::parse_error,
         "expected quoted attribute value at byte " + std::to_string(i));
  }
  size_t end = s.find(closer, i);
  if (end == std::string_view::npos) {
    fail(ErrorKind::parse_error,
         "unterminated attribute value at byte " + std::to_string(i));
  }
  EntityType type = entity_type_from(s.substr(i, end - i));
  return {type, end + closer.size()};
}

}  // namespace detail

/// Parses nested <ENAMEX TYPE="X">...</ENAMEX> markup. Returns the plain
/// text plus one span per element at every nesting depth, in tag-opening
/// order, with offsets counted in code points of the plain text. A '<' not
/// introducing an ENAMEX tag is kept as literal text.
inline EnamexParse parse_enamex(std::string_view raw) {
  EnamexParse out;
  std::vector<size_t> open;  // indices into out.spans
  std::string plain;
  size_t cp_count = 0;
  size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] == '<') {
      if (detail::starts_with_at(raw, i, "</ENAMEX")) {
        size_t j = detail::skip_spaces(raw, i + 8);
        if (j >= raw.size() || raw[j] != '>') {
          fail(ErrorKind::parse_error,
               "malformed closing tag at byte " + std::to_string(i));
        }
        if (open.empty()) {
          fail(ErrorKind::unbalanced_tag,
               "closing tag without opener at byte " + std::to_string(i));
        }
        out.spans[open.back()].end = cp_count;
        open.pop_back();
        i = j + 1;
        continue;
      }
      if (detail::starts_with_at(raw, i, "<ENAMEX") && i + 7 < raw.size() &&
          (raw[i + 7] == ' ' || raw[i + 7] == '\t')) {
        auto [type, j] = detail::parse_type_attr(raw, i + 7);
        j = detail::skip_spaces(raw, j);
        if (j >= raw.size() || raw[j] != '>') {
          fail(ErrorKind::parse_error,
               "expected '>' at byte " + std::to_string(j));
        }
        open.push_back(out.spans.size());
        out.spans.push_back({type, cp_count, cp_count, 0});
        i = j + 1;
        continue;
      }
    }
    utf8_append(plain, utf8_next(raw, i));
    ++cp_count;
  }
  if (!open.empty()) {
    fail(ErrorKind::unbalanced_tag,
         std::to_string(open.size()) + " ENAMEX tag(s) left open at end of input");
  }
  out.text = std::move(plain);
  return out;
}

namespace detail {

/// Throws CrossingSpans unless every pair of spans is disjoint or strictly
/// nested.
inline void require_proper_nesting(std::span<const CharSpan> spans) {
  for (size_t a = 0; a < spans.size(); ++a) {
    for (size_t b = a + 1; b < spans.size(); ++b) {
      const CharSpan& x = spans[a];
      const CharSpan& y = spans[b];
      if (x.begin == y.begin && x.end == y.end) {
        fail(ErrorKind::crossing_spans,
             "coincident spans at [" + std::to_string(x.begin) + "," + std::to_string(x.end) +
                 ")");
      }
      bool disjoint = x.end <= y.begin || y.end <= x.begin;
      bool x_in_y = y.begin <= x.begin && x.end <= y.end;
      bool y_in_x = x.begin <= y.begin && y.end <= x.end;
      if (!disjoint && !x_in_y && !y_in_x) {
        fail(ErrorKind::crossing_spans,
             "spans [" + std::to_string(x.begin) + "," + std::to_string(x.end) + ") and [" +
                 std::to_string(y.begin) + "," + std::to_string(y.end) +
                 ") partially overlap");
      }
    }
  }
}

}  // namespace detail

/// Inverse of parse_enamex: inserts normalized double-quoted ENAMEX tags
/// around the given spans. Spans must be properly nested.
inline std::string render_enamex(std::string_view text, std::span<const CharSpan> spans) {
  detail::require_proper_nesting(spans);
  std::vector<CharSpan> ordered(spans.begin(), spans.end());
  // Opens sorted by (begin asc, end desc): outer tags open first.
  std::sort(ordered.begin(), ordered.end(), [](const CharSpan& a, const CharSpan& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  std::string out;
  size_t next_open = 0;
  std::vector<CharSpan> open;
  size_t cp = 0;
  size_t i = 0;
  auto emit_tags = [&] {
    while (!open.empty() && open.back().end == cp) {
      out += "</ENAMEX>";
      open.pop_back();
    }
    while (next_open < ordered.size() && ordered[next_open].begin == cp) {
      out += "<ENAMEX TYPE=\"";
      out += to_string(ordered[next_open].type);
      out += "\">";
      open.push_back(ordered[next_open]);
      ++next_open;
    }
  };
  while (i < text.size()) {
    emit_tags();
    utf8_append(out, utf8_next(text, i));
    ++cp;
  }
  emit_tags();
  return out;
}

/// Assigns nesting levels: level = 1 + max level among strictly contained
/// spans (0 if none). Rejects partially overlapping or coincident spans.
/// Output order matches input order; assignment is permutation-invariant.
inline std::vector<CharSpan> assign_entity_levels(std::span<const CharSpan> spans) {
  detail::require_proper_nesting(spans);
  const size_t n = spans.size();
  // Process smallest spans first so contained levels are known.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return spans[a].end - spans[a].begin < spans[b].end - spans[b].begin;
  });
  std::vector<CharSpan> out(spans.begin(), spans.end());
  for (size_t oi : order) {
    int inner_max = 0;
    for (size_t j = 0; j < n; ++j) {
      if (j == oi) continue;
      const CharSpan& inner = out[j];
      const CharSpan& outer = out[oi];
      if (outer.begin <= inner.begin && inner.end <= outer.end &&
          (outer.begin < inner.begin || inner.end < outer.end)) {
        inner_max = std::max(inner_max, inner.level);
      }
    }
    out[oi].level = inner_max + 1;
  }
  return out;
}

struct Projection {
  std::vector<EntitySpan> kept;   // token-indexed, level preserved
  std::vector<CharSpan> dropped;  // boundaries inside a token
};

/// Maps character spans onto token indices. A span is kept iff its begin
/// coincides with some token's char_start and its end with some token's
/// char_end; everything else is a boundary conflict and is dropped (the
/// affected tokens stay O).
inline Projection project_entities_to_tokens(std::span<const Token> tokens,
                                             std::span<const CharSpan> spans) {
  constexpr size_t npos = static_cast<size_t>(-1);
  Projection out;
  for (const CharSpan& s : spans) {
    size_t start_tok = npos, end_tok = npos;
    for (size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].char_start == s.begin) start_tok = t;
      if (tokens[t].char_end == s.end) end_tok = t + 1;
    }
    if (start_tok != npos && end_tok != npos && start_tok < end_tok) {
      out.kept.push_back({s.type, start_tok, end_tok, s.level});
    } else {
      out.dropped.push_back(s);
    }
  }
  return out;
}

}  // namespace nner
