#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nner/error.hpp"
#include "nner/tags.hpp"
#include "nner/types.hpp"

namespace nner {

enum class EvalMode { level1, level2, all_levels };

inline const char* to_string(EvalMode m) {
  switch (m) {
    case EvalMode::level1: return "level1";
    case EvalMode::level2: return "level2";
    case EvalMode::all_levels: return "all_levels";
  }
  return "?";
}

inline EvalMode eval_mode_from(std::string_view s) {
  if (s == "level1") return EvalMode::level1;
  if (s == "level2") return EvalMode::level2;
  if (s == "all_levels" || s == "all") return EvalMode::all_levels;
  fail(ErrorKind::parse_error, "unknown eval mode '" + std::string(s) + "'");
}

/// Exact-match counts per entity type plus the pooled totals.
struct EvalCounts {
  struct Bucket {
    long gold = 0;
    long predicted = 0;
    long correct = 0;

    Bucket& operator+=(const Bucket& o) {
      gold += o.gold;
      predicted += o.predicted;
      correct += o.correct;
      return *this;
    }
  };
  std::map<EntityType, Bucket> per_type;

  Bucket total() const {
    Bucket t;
    for (const auto& [_, b] : per_type) t += b;
    return t;
  }
  EvalCounts& operator+=(const EvalCounts& o) {
    for (const auto& [ty, b] : o.per_type) per_type[ty] += b;
    return *this;
  }
};

/// Exact phrase matching: a prediction is correct iff type, start and end
/// all equal a gold entity's; every gold entity matches at most one
/// prediction and vice versa. Duplicate identical spans on one side are
/// collapsed first.
inline EvalCounts match_entities(std::span<const EntitySpan> gold,
                                 std::span<const EntitySpan> pred) {
  using Key = std::tuple<EntityType, size_t, size_t, int>;
  auto dedup = [](std::span<const EntitySpan> spans) {
    std::set<Key> out;
    for (const EntitySpan& s : spans) out.insert({s.type, s.token_start, s.token_end, s.level});
    return out;
  };
  // Matching ignores the level: identical (type, boundaries) on both sides
  // pair up by multiplicity.
  using MatchKey = std::tuple<EntityType, size_t, size_t>;
  std::map<MatchKey, long> gold_multi, pred_multi;
  EvalCounts counts;
  for (const Key& k : dedup(gold)) {
    ++gold_multi[{std::get<0>(k), std::get<1>(k), std::get<2>(k)}];
    ++counts.per_type[std::get<0>(k)].gold;
  }
  for (const Key& k : dedup(pred)) {
    ++pred_multi[{std::get<0>(k), std::get<1>(k), std::get<2>(k)}];
    ++counts.per_type[std::get<0>(k)].predicted;
  }
  for (const auto& [key, g] : gold_multi) {
    auto it = pred_multi.find(key);
    if (it == pred_multi.end()) continue;
    counts.per_type[std::get<0>(key)].correct += std::min(g, it->second);
  }
  return counts;
}

struct EvalReport {
  struct Row {
    std::string name;
    long gold = 0;
    long predicted = 0;
    long correct = 0;
    double precision = 0.0;  // percentages
    double recall = 0.0;
    double f1 = 0.0;
  };
  std::vector<Row> rows;  // one per entity type, fixed order
  Row all;
  std::string mode = "all_levels";
  bool syllable = false;
};

/// Precision/recall/F1 percentages with the conventions P=0 when nothing
/// was predicted, R=0 when there is no gold, F1=0 when P+R=0.
inline EvalReport prf(const EvalCounts& counts) {
  EvalReport report;
  auto make_row = [](const std::string& name, const EvalCounts::Bucket& b) {
    EvalReport::Row row;
    row.name = name;
    row.gold = b.gold;
    row.predicted = b.predicted;
    row.correct = b.correct;
    row.precision = b.predicted == 0 ? 0.0 : 100.0 * static_cast<double>(b.correct) /
                                                 static_cast<double>(b.predicted);
    row.recall =
        b.gold == 0 ? 0.0 : 100.0 * static_cast<double>(b.correct) / static_cast<double>(b.gold);
    row.f1 = row.precision + row.recall == 0.0
                 ? 0.0
                 : 2.0 * row.precision * row.recall / (row.precision + row.recall);
    return row;
  };
  for (EntityType ty : all_entity_types()) {
    EvalCounts::Bucket b;
    auto it = counts.per_type.find(ty);
    if (it != counts.per_type.end()) b = it->second;
    report.rows.push_back(make_row(to_string(ty), b));
  }
  report.all = make_row("All", counts.total());
  return report;
}

/// Fixed-width table plus a machine-readable key=value block, stable for
/// golden-file comparison.
inline std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %7s %7s %7s %9s %9s %9s\n", "Type", "Gold", "Pred",
                "Corr", "Prec", "Rec", "F1");
  out << line;
  auto emit = [&](const EvalReport::Row& r) {
    std::snprintf(line, sizeof(line), "%-8s %7ld %7ld %7ld %9.2f %9.2f %9.2f\n", r.name.c_str(),
                  r.gold, r.predicted, r.correct, r.precision, r.recall, r.f1);
    out << line;
  };
  for (const auto& r : report.rows) emit(r);
  emit(report.all);
  out << "\n";
  out << "eval.mode=" << report.mode << "\n";
  out << "eval.syllable=" << (report.syllable ? "on" : "off") << "\n";
  auto kv = [&](const EvalReport::Row& r) {
    char num[32];
    out << r.name << ".gold=" << r.gold << "\n";
    out << r.name << ".pred=" << r.predicted << "\n";
    out << r.name << ".correct=" << r.correct << "\n";
    std::snprintf(num, sizeof(num), "%.2f", r.precision);
    out << r.name << ".precision=" << num << "\n";
    std::snprintf(num, sizeof(num), "%.2f", r.recall);
    out << r.name << ".recall=" << num << "\n";
    std::snprintf(num, sizeof(num), "%.2f", r.f1);
    out << r.name << ".f1=" << num << "\n";
  };
  for (const auto& r : report.rows) kv(r);
  kv(report.all);
  return out.str();
}

namespace detail {

inline std::vector<EntitySpan> spans_for_mode(std::span<const EntitySpan> entities,
                                              EvalMode mode) {
  std::vector<EntitySpan> out;
  for (const EntitySpan& e : entities) {
    bool keep = (mode == EvalMode::level1 && e.level == 1) ||
                (mode == EvalMode::level2 && e.level == 2) ||
                (mode == EvalMode::all_levels && (e.level == 1 || e.level == 2));
    if (keep) out.push_back(e);
  }
  return out;
}

/// Re-expresses token spans in syllable indices (tokens split on "_").
inline std::vector<EntitySpan> to_syllable_space(const Sentence& sent,
                                                 std::span<const EntitySpan> spans) {
  std::vector<size_t> syl_start(sent.tokens.size() + 1, 0);
  for (size_t t = 0; t < sent.tokens.size(); ++t)
    syl_start[t + 1] = syl_start[t] + split_syllables(sent.tokens[t].surface).size();
  std::vector<EntitySpan> out;
  out.reserve(spans.size());
  for (const EntitySpan& s : spans)
    out.push_back({s.type, syl_start[s.token_start], syl_start[s.token_end], s.level});
  return out;
}

inline size_t syllable_count(const Sentence& sent) {
  size_t n = 0;
  for (const Token& t : sent.tokens) n += split_syllables(t.surface).size();
  return n;
}

}  // namespace detail

/// Scores predicted documents against gold. Documents pair up positionally
/// and must agree in count and per-document sentence count. With
/// syllable=true spans are re-projected onto syllable indices first, so
/// differing word segmentations still compare.
inline EvalReport evaluate_corpus(std::span<const Document> gold_docs,
                                  std::span<const Document> pred_docs, EvalMode mode,
                                  bool syllable) {
  if (gold_docs.size() != pred_docs.size())
    fail(ErrorKind::alignment_error,
         std::to_string(gold_docs.size()) + " gold documents vs " +
             std::to_string(pred_docs.size()) + " predicted");
  EvalCounts counts;
  for (size_t d = 0; d < gold_docs.size(); ++d) {
    const Document& g = gold_docs[d];
    const Document& p = pred_docs[d];
    if (g.sentences.size() != p.sentences.size())
      fail(ErrorKind::alignment_error,
           "document " + g.id + ": " + std::to_string(g.sentences.size()) +
               " gold sentences vs " + std::to_string(p.sentences.size()) + " predicted");
    for (size_t s = 0; s < g.sentences.size(); ++s) {
      const Sentence& gs = g.sentences[s];
      const Sentence& ps = p.sentences[s];
      std::vector<EntitySpan> gold_spans = detail::spans_for_mode(gs.entities, mode);
      std::vector<EntitySpan> pred_spans = detail::spans_for_mode(ps.entities, mode);
      if (syllable) {
        if (detail::syllable_count(gs) != detail::syllable_count(ps))
          fail(ErrorKind::alignment_error,
               "document " + g.id + " sentence " + std::to_string(s) +
                   ": syllable counts differ between gold and prediction");
        gold_spans = detail::to_syllable_space(gs, gold_spans);
        pred_spans = detail::to_syllable_space(ps, pred_spans);
      } else if (gs.tokens.size() != ps.tokens.size()) {
        fail(ErrorKind::alignment_error,
             "document " + g.id + " sentence " + std::to_string(s) +
                 ": token counts differ (use syllable mode for differing segmentations)");
      }
      counts += match_entities(gold_spans, pred_spans);
    }
  }
  EvalReport report = prf(counts);
  report.mode = to_string(mode);
  report.syllable = syllable;
  return report;
}

}  // namespace nner
