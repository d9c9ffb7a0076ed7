#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nner/error.hpp"
#include "nner/types.hpp"
#include "nner/unicode.hpp"

namespace nner {

struct SentencePiece {
  std::string text;
  size_t char_offset = 0;  // code-point offset into the original text
};

/// Splits after every period immediately followed by one space and an
/// upper-case letter. The period stays with the left sentence and the
/// separating space is consumed. Offsets are code-point offsets into the
/// original text.
inline std::vector<SentencePiece> split_sentences(std::string_view text) {
  std::vector<SentencePiece> out;
  std::string current;
  size_t current_start = 0;
  size_t cp_index = 0;
  size_t i = 0;
  while (i < text.size()) {
    size_t next_i = i;
    char32_t cp = utf8_next(text, next_i);
    if (cp == U'.' && next_i < text.size() && text[next_i] == ' ') {
      size_t after_space = next_i + 1;
      if (after_space < text.size()) {
        size_t probe = after_space;
        char32_t following = utf8_next(text, probe);
        if (is_upper_cp(following)) {
          current.push_back('.');
          out.push_back({std::move(current), current_start});
          current.clear();
          current_start = cp_index + 2;  // past the period and the space
          i = after_space;
          cp_index += 2;
          continue;
        }
      }
    }
    utf8_append(current, cp);
    ++cp_index;
    i = next_i;
  }
  out.push_back({std::move(current), current_start});
  return out;
}

/// Word segmenter seam. Built-ins tokenize on whitespace; external
/// segmenters are integrated by running them offline and feeding their
/// underscore-joined output through the `presegmented` convention.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<Token> segment(std::string_view sentence) const = 0;
};

namespace detail {

inline std::vector<Token> whitespace_tokens(std::string_view sentence) {
  std::vector<Token> out;
  std::string cur;
  size_t cur_start = 0;
  size_t cp_index = 0;
  size_t i = 0;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back({std::move(cur), cur_start, cp_index});
      cur.clear();
    }
  };
  while (i < sentence.size()) {
    char32_t cp = utf8_next(sentence, i);
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r') {
      flush();
    } else {
      if (cur.empty()) cur_start = cp_index;
      utf8_append(cur, cp);
    }
    ++cp_index;
  }
  flush();
  return out;
}

}  // namespace detail

/// Each whitespace-separated syllable becomes one token.
class WhitespaceSegmenter final : public Segmenter {
 public:
  std::string_view name() const override { return "whitespace"; }
  std::vector<Token> segment(std::string_view sentence) const override {
    return detail::whitespace_tokens(sentence);
  }
};

/// Input already carries underscore-joined words; tokens split on spaces
/// and keep their underscores (an underscore in a surface stands for a
/// single space of the unsegmented form).
class PresegmentedSegmenter final : public Segmenter {
 public:
  std::string_view name() const override { return "presegmented"; }
  std::vector<Token> segment(std::string_view sentence) const override {
    return detail::whitespace_tokens(sentence);
  }
};

inline const Segmenter& segmenter_by_name(std::string_view name) {
  static const WhitespaceSegmenter whitespace;
  static const PresegmentedSegmenter presegmented;
  if (name == "whitespace") return whitespace;
  if (name == "presegmented") return presegmented;
  fail(ErrorKind::unknown_segmenter, "'" + std::string(name) + "'");
}

inline std::vector<Token> segment_words(std::string_view sentence, const Segmenter& seg) {
  return seg.segment(sentence);
}

}  // namespace nner
