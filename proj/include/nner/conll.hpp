#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nner/error.hpp"
#include "nner/tags.hpp"
#include "nner/types.hpp"
#include "nner/unicode.hpp"

namespace nner {

/// Column layouts for CoNLL-style files: `surface tag` (one level or joint)
/// or `surface level1tag level2tag`.
enum class ConllColumns { level1, level2, joint, two_level };

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

inline Sentence sentence_from_columns(const std::vector<std::vector<std::string>>& rows,
                                      bool repair) {
  Sentence sent;
  size_t n_fields = rows.front().size();
  std::vector<BioTag> l1, l2;
  size_t cp = 0;
  for (const auto& row : rows) {
    const std::string& surface = row[0];
    size_t len = utf8_length(surface);
    sent.tokens.push_back({surface, cp, cp + len});
    if (!sent.raw_text.empty()) {
      sent.raw_text += ' ';
    }
    sent.raw_text += surface;
    cp += len + 1;
    if (n_fields == 3) {
      l1.push_back(bio_tag_from(row[1]));
      l2.push_back(bio_tag_from(row[2]));
    } else if (n_fields == 2) {
      if (row[1].find('+') != std::string::npos) {
        JointTag jt = joint_tag_from(row[1]);
        l1.push_back(jt.level1);
        l2.push_back(jt.level2);
      } else {
        l1.push_back(bio_tag_from(row[1]));
        l2.push_back(BioTag::o());
      }
    }
  }
  if (n_fields >= 2) {
    for (EntitySpan s : bio_decode(l1, repair)) {
      s.level = 1;
      sent.entities.push_back(s);
    }
    for (EntitySpan s : bio_decode(l2, repair)) {
      s.level = 2;
      sent.entities.push_back(s);
    }
  }
  return sent;
}

}  // namespace detail

struct ConllCorpus {
  std::vector<Document> docs;
  bool explicit_ids = false;
};

/// Reads a CoNLL-style file. Blank lines separate sentences; `#doc <id>`
/// lines separate documents. Token lines carry 1, 2 or 3 whitespace
/// separated fields and every row of a sentence must carry the same number.
/// Two-field rows holding a '+' are joint tags.
inline ConllCorpus read_conll(std::istream& in, const std::string& fallback_id = "doc",
                              bool repair = true) {
  ConllCorpus corpus;
  Document current;
  current.id = fallback_id;
  bool have_doc_line = false;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  size_t line_no = 0;

  auto flush_sentence = [&] {
    if (rows.empty()) return;
    current.sentences.push_back(detail::sentence_from_columns(rows, repair));
    rows.clear();
  };
  auto flush_document = [&] {
    flush_sentence();
    if (!current.sentences.empty() || have_doc_line) corpus.docs.push_back(std::move(current));
    current = {};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#doc", 0) == 0) {
      flush_document();
      have_doc_line = true;
      corpus.explicit_ids = true;
      std::vector<std::string> fields = detail::split_fields(line);
      current.id = fields.size() > 1 ? fields[1] : fallback_id;
      continue;
    }
    if (line.empty()) {
      flush_sentence();
      continue;
    }
    std::vector<std::string> fields = detail::split_fields(line);
    if (fields.empty()) {
      flush_sentence();
      continue;
    }
    if (fields.size() > 3)
      fail(ErrorKind::malformed_line,
           "line " + std::to_string(line_no) + ": expected at most 3 columns");
    if (!rows.empty() && rows.front().size() != fields.size())
      fail(ErrorKind::malformed_line,
           "line " + std::to_string(line_no) + ": inconsistent column count within sentence");
    rows.push_back(std::move(fields));
  }
  flush_document();
  return corpus;
}

namespace detail {

inline void write_conll_sentence(std::ostream& out, const Sentence& sent, ConllColumns columns) {
  TagColumns cols = tag_columns(sent);
  for (size_t t = 0; t < sent.tokens.size(); ++t) {
    out << sent.tokens[t].surface;
    switch (columns) {
      case ConllColumns::level1: out << '\t' << to_string(cols.level1[t]); break;
      case ConllColumns::level2: out << '\t' << to_string(cols.level2[t]); break;
      case ConllColumns::joint: out << '\t' << to_string(cols.joint[t]); break;
      case ConllColumns::two_level:
        out << '\t' << to_string(cols.level1[t]) << '\t' << to_string(cols.level2[t]);
        break;
    }
    out << "\n";
  }
}

}  // namespace detail

/// Writes documents in CoNLL form with tab separation and `#doc` markers.
inline void write_conll(std::ostream& out, std::span<const Document> docs, ConllColumns columns) {
  for (const Document& doc : docs) {
    out << "#doc " << doc.id << "\n";
    for (const Sentence& sent : doc.sentences) {
      detail::write_conll_sentence(out, sent, columns);
      out << "\n";
    }
  }
}

}  // namespace nner
