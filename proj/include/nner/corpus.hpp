#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nner/conll.hpp"
#include "nner/enamex.hpp"
#include "nner/error.hpp"
#include "nner/preprocess.hpp"
#include "nner/types.hpp"
#include "nner/unicode.hpp"

namespace nner {

struct RawDocument {
  std::string id;
  std::string body;  // ENAMEX markup still inside
};

struct EnamexCorpus {
  std::vector<RawDocument> docs;
  bool explicit_ids = false;
};

/// Splits file content into documents. Content starting with `<doc` is a
/// sequence of `<doc id="...">...</doc>` blocks; anything else is one
/// document under the fallback id.
inline EnamexCorpus split_enamex_documents(std::string_view content,
                                           const std::string& fallback_id) {
  EnamexCorpus corpus;
  size_t first = content.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos || content.compare(first, 4, "<doc") != 0) {
    corpus.docs.push_back({fallback_id, std::string(content)});
    return corpus;
  }
  corpus.explicit_ids = true;
  size_t i = first;
  while (true) {
    i = content.find("<doc", i);
    if (i == std::string_view::npos) break;
    size_t id_start = content.find("id=\"", i);
    size_t tag_end = content.find('>', i);
    if (tag_end == std::string_view::npos || id_start == std::string_view::npos ||
        id_start > tag_end)
      fail(ErrorKind::parse_error, "malformed <doc> tag at byte " + std::to_string(i));
    size_t id_end = content.find('"', id_start + 4);
    if (id_end == std::string_view::npos || id_end > tag_end)
      fail(ErrorKind::parse_error, "unterminated doc id at byte " + std::to_string(id_start));
    std::string id(content.substr(id_start + 4, id_end - id_start - 4));
    if (id.empty()) fail(ErrorKind::parse_error, "empty doc id at byte " + std::to_string(i));
    size_t body_start = tag_end + 1;
    if (body_start < content.size() && content[body_start] == '\n') ++body_start;
    size_t close = content.find("</doc>", body_start);
    if (close == std::string_view::npos)
      fail(ErrorKind::unbalanced_tag, "<doc id=\"" + id + "\"> never closed");
    size_t body_end = close;
    if (body_end > body_start && content[body_end - 1] == '\n') --body_end;
    corpus.docs.push_back({std::move(id), std::string(content.substr(body_start, body_end - body_start))});
    i = close + 6;
  }
  if (corpus.docs.empty()) fail(ErrorKind::parse_error, "no documents in input");
  return corpus;
}

enum class DropReason { boundary_conflict, crosses_sentence, level3_excluded };

inline const char* to_string(DropReason r) {
  switch (r) {
    case DropReason::boundary_conflict: return "boundary_conflict";
    case DropReason::crosses_sentence: return "crosses_sentence";
    case DropReason::level3_excluded: return "level3_excluded";
  }
  return "?";
}

struct DropRecord {
  std::string doc_id;
  size_t sentence_index = 0;  // meaningless for crosses_sentence
  CharSpan span;              // sentence-local offsets where applicable
  DropReason reason = DropReason::boundary_conflict;
};

struct PipelineOptions {
  bool sent_seg = true;
  std::string segmenter = "presegmented";
};

/// Full ingestion for one raw document: strip markup, assign entity levels,
/// split lines (and optionally sentences), segment words, and project
/// entities onto token boundaries. Level-3 entities are kept in the data
/// model; downstream consumers exclude them.
inline Document document_from_enamex(const RawDocument& raw, const PipelineOptions& opts,
                                     std::vector<DropRecord>* drops = nullptr) {
  const Segmenter& seg = segmenter_by_name(opts.segmenter);
  EnamexParse parsed = parse_enamex(raw.body);
  std::vector<CharSpan> leveled = assign_entity_levels(parsed.spans);

  // Sentence units: lines, further split by the period rule when enabled.
  struct Unit {
    std::string text;
    size_t offset;  // code points into the stripped text
  };
  std::vector<Unit> units;
  {
    size_t line_offset = 0;
    std::istringstream lines(parsed.text);
    std::string line;
    while (std::getline(lines, line)) {
      bool had_cr = !line.empty() && line.back() == '\r';
      if (had_cr) line.pop_back();
      size_t line_len = utf8_length(line);
      if (!line.empty()) {
        if (opts.sent_seg) {
          for (SentencePiece& piece : split_sentences(line))
            units.push_back({std::move(piece.text), line_offset + piece.char_offset});
        } else {
          units.push_back({line, line_offset});
        }
      }
      line_offset += line_len + (had_cr ? 2 : 1);  // the line terminator
    }
  }

  Document doc;
  doc.id = raw.id;
  std::vector<bool> span_used(leveled.size(), false);
  for (const Unit& unit : units) {
    Sentence sent;
    sent.raw_text = unit.text;
    sent.tokens = seg.segment(unit.text);
    const size_t begin = unit.offset;
    const size_t end = begin + utf8_length(unit.text);
    std::vector<CharSpan> local;
    for (size_t k = 0; k < leveled.size(); ++k) {
      const CharSpan& s = leveled[k];
      if (s.end <= begin || s.begin >= end) continue;
      if (s.begin >= begin && s.end <= end) {
        local.push_back({s.type, s.begin - begin, s.end - begin, s.level});
        span_used[k] = true;
      } else if (!span_used[k]) {
        span_used[k] = true;
        if (drops)
          drops->push_back({doc.id, doc.sentences.size(), s, DropReason::crosses_sentence});
      }
    }
    Projection proj = project_entities_to_tokens(sent.tokens, local);
    sent.entities = std::move(proj.kept);
    if (drops)
      for (const CharSpan& d : proj.dropped)
        drops->push_back({doc.id, doc.sentences.size(), d, DropReason::boundary_conflict});
    doc.sentences.push_back(std::move(sent));
  }
  return doc;
}

struct LoadedCorpus {
  std::vector<Document> docs;
  bool explicit_ids = false;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string path_stem(const std::string& path) {
  size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = name.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

inline LoadedCorpus load_enamex_corpus(const std::string& path, const PipelineOptions& opts,
                                       std::vector<DropRecord>* drops = nullptr) {
  std::string content = read_file(path);
  EnamexCorpus raw = split_enamex_documents(content, path_stem(path));
  LoadedCorpus out;
  out.explicit_ids = raw.explicit_ids;
  for (const RawDocument& rd : raw.docs)
    out.docs.push_back(document_from_enamex(rd, opts, drops));
  return out;
}

/// Reads either an ENAMEX or a CoNLL file, sniffing on content. ENAMEX
/// input is whitespace-tokenized without sentence re-splitting.
inline LoadedCorpus load_documents_any(const std::string& path) {
  std::string content = read_file(path);
  bool enamex = content.find("<ENAMEX") != std::string::npos ||
                (content.find("<doc") != std::string::npos &&
                 content.find('\t') == std::string::npos && content.find("#doc") == std::string::npos);
  LoadedCorpus out;
  if (enamex) {
    EnamexCorpus raw = split_enamex_documents(content, path_stem(path));
    out.explicit_ids = raw.explicit_ids;
    PipelineOptions opts;
    opts.sent_seg = false;
    opts.segmenter = "whitespace";
    for (const RawDocument& rd : raw.docs)
      out.docs.push_back(document_from_enamex(rd, opts, nullptr));
  } else {
    std::istringstream in(content);
    ConllCorpus conll = read_conll(in, path_stem(path));
    out.docs = std::move(conll.docs);
    out.explicit_ids = conll.explicit_ids;
  }
  return out;
}

}  // namespace nner
