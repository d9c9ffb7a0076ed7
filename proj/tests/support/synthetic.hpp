#pragma once

// Synthetic nested-NER corpus with patterned entities:
//   - "ông <PER>" person frames,
//   - "TP <name>+" location phrases,
//   - "UBND TP <name>+" organization frames whose level-2 extent is tied to
//     the level-1 location extent, sometimes followed directly by a bare
//     capitalized person name so the organization boundary is only
//     recoverable from the level-1 structure.
// Everything is deterministic for a fixed seed.

#include <string>
#include <vector>

#include "nner/enamex.hpp"
#include "nner/types.hpp"
#include "nner/unicode.hpp"
#include "support/rng.hpp"

namespace nner::testing {

struct SyntheticSentence {
  std::vector<std::string> tokens;
  std::vector<EntitySpan> entities;  // leveled, token-indexed
};

struct SyntheticCorpus {
  std::vector<SyntheticSentence> train;
  std::vector<SyntheticSentence> test;
};

namespace synth_detail {

inline std::vector<std::string> location_parts(size_t pool) {
  const std::vector<std::string> a = {"Yên", "Sơn",  "Hòa", "Phú",  "Quảng", "Hải", "Tân",
                                      "Vĩnh", "Bắc", "Nam", "Đông", "Tây",   "Kim", "Gia"};
  const std::vector<std::string> b = {"Bình", "Giang", "Châu", "Thọ", "Lộc",
                                      "Khê",  "Thành", "Môn",  "Hạ"};
  std::vector<std::string> out;
  for (size_t i = 0; i < a.size() && out.size() < pool; ++i)
    for (size_t j = 0; j < b.size() && out.size() < pool; ++j) {
      if ((i + j) % 2 == 0)
        out.push_back(a[i] + "_" + b[j]);
      else
        out.push_back(a[i] + "_" + b[j] + "_" + a[(i + 1) % a.size()]);
    }
  return out;
}

inline std::vector<std::string> person_names(size_t pool) {
  const std::vector<std::string> f = {"Nguyễn", "Trần", "Lê",  "Phạm", "Hoàng",
                                      "Vũ",     "Đặng", "Bùi", "Đỗ"};
  const std::vector<std::string> m = {"Văn", "Thị", "Đức", "Minh", "Hữu"};
  const std::vector<std::string> l = {"An",  "Cường", "Dũng", "Hà",  "Khang",
                                      "Lâm", "Phúc",  "Quý",  "Sang"};
  std::vector<std::string> out;
  for (size_t i = 0; i < f.size() && out.size() < pool; ++i)
    for (size_t j = 0; j < l.size() && out.size() < pool; ++j) {
      if ((i + j) % 2 == 0)
        out.push_back(f[i] + "_" + m[(i + j) % m.size()] + "_" + l[j]);
      else
        out.push_back(f[i] + "_" + l[j]);
    }
  return out;
}

inline const std::vector<std::string>& fillers() {
  static const std::vector<std::string> out = {
      "hôm_nay",   "đã",       "đến",       "thăm",     "làm_việc", "và",
      "của",       "theo",     "chiều",     "sáng",     "nói",      "cho_biết",
      "về",        "với",      "trong",     "khu_vực",  "dự_án",    "kế_hoạch",
      "người_dân", "chính_quyền"};
  return out;
}

}  // namespace synth_detail

struct SyntheticOptions {
  size_t loc_pool = 44;
  size_t per_pool = 44;
  bool ambiguous_trigger = false;  // also emit "UBND <PER>" frames with no ORG
};

class SyntheticGenerator {
 public:
  explicit SyntheticGenerator(uint64_t seed, SyntheticOptions opts = {})
      : rng_(seed),
        opts_(opts),
        locs_(synth_detail::location_parts(opts.loc_pool)),
        pers_(synth_detail::person_names(opts.per_pool)) {}

  SyntheticSentence sentence() {
    SyntheticSentence s;
    double roll = rng_.uniform();
    if (roll < 0.26)
      per_and_loc(s);
    else if (roll < 0.44)
      loc_only(s);
    else if (roll < 0.52)
      per_only(s);
    else if (roll < 0.58)
      (opts_.ambiguous_trigger ? trigger_without_org(s) : per_only(s));
    else if (roll < 0.70)
      loc_then_per(s);
    else if (roll < 0.82)
      org_frame(s, /*adjacent_person=*/false);
    else if (roll < 0.88)
      org_frame(s, /*adjacent_person=*/true);
    else
      filler_only(s);
    s.tokens.push_back(".");
    return s;
  }

  SyntheticCorpus corpus(size_t n_sentences) {
    SyntheticCorpus out;
    for (size_t i = 0; i < n_sentences; ++i) {
      SyntheticSentence s = sentence();
      if (i % 5 == 4)
        out.test.push_back(std::move(s));
      else
        out.train.push_back(std::move(s));
    }
    return out;
  }

 private:
  Rng rng_;
  SyntheticOptions opts_;
  std::vector<std::string> locs_;
  std::vector<std::string> pers_;

  const std::string& filler() {
    const auto& f = synth_detail::fillers();
    return f[rng_.index(f.size())];
  }
  void fill(SyntheticSentence& s, int n) {
    for (int i = 0; i < n; ++i) s.tokens.push_back(filler());
  }

  // Appends "TP <name>{1,2}" (or a bare name phrase) and records the
  // level-1 LOC span.
  void loc_phrase(SyntheticSentence& s) {
    size_t start = s.tokens.size();
    if (rng_.chance(0.65)) s.tokens.push_back("TP");
    int parts = rng_.chance(0.45) ? 2 : 1;
    for (int i = 0; i < parts; ++i) s.tokens.push_back(locs_[rng_.index(locs_.size())]);
    s.entities.push_back({EntityType::LOC, start, s.tokens.size(), 1});
  }

  void per_name(SyntheticSentence& s) {
    size_t start = s.tokens.size();
    s.tokens.push_back(pers_[rng_.index(pers_.size())]);
    s.entities.push_back({EntityType::PER, start, s.tokens.size(), 1});
  }

  void per_and_loc(SyntheticSentence& s) {
    s.tokens.push_back("ông");
    per_name(s);
    fill(s, rng_.range(1, 2));
    s.tokens.push_back("tại");
    loc_phrase(s);
    if (rng_.chance(0.5)) fill(s, 1);
  }

  void loc_only(SyntheticSentence& s) {
    fill(s, rng_.range(1, 2));
    s.tokens.push_back("tại");
    loc_phrase(s);
    fill(s, rng_.range(1, 2));
  }

  void per_only(SyntheticSentence& s) {
    s.tokens.push_back("ông");
    per_name(s);
    fill(s, rng_.range(2, 4));
  }

  void loc_then_per(SyntheticSentence& s) {
    fill(s, rng_.range(0, 1));
    loc_phrase(s);
    per_name(s);
    s.tokens.push_back("nói");
    fill(s, rng_.range(0, 2));
  }

  void org_frame(SyntheticSentence& s, bool adjacent_person) {
    fill(s, rng_.range(0, 1));
    size_t org_start = s.tokens.size();
    s.tokens.push_back("UBND");
    loc_phrase(s);
    s.entities.push_back({EntityType::ORG, org_start, s.tokens.size(), 2});
    if (adjacent_person) {
      per_name(s);
      s.tokens.push_back("nói");
    } else {
      fill(s, rng_.range(1, 2));
    }
  }

  // The trigger word followed by a person: no organization span at all.
  void trigger_without_org(SyntheticSentence& s) {
    fill(s, rng_.range(0, 1));
    s.tokens.push_back("UBND");
    per_name(s);
    fill(s, rng_.range(1, 2));
  }

  void filler_only(SyntheticSentence& s) { fill(s, rng_.range(4, 7)); }
};

/// Renders one synthetic sentence as a tagged ENAMEX line.
inline std::string to_enamex_line(const SyntheticSentence& s) {
  std::string text;
  std::vector<size_t> tok_start(s.tokens.size()), tok_end(s.tokens.size());
  size_t cp = 0;
  for (size_t t = 0; t < s.tokens.size(); ++t) {
    if (t) {
      text += ' ';
      ++cp;
    }
    tok_start[t] = cp;
    text += s.tokens[t];
    cp += utf8_length(s.tokens[t]);
    tok_end[t] = cp;
  }
  std::vector<CharSpan> spans;
  for (const EntitySpan& e : s.entities)
    spans.push_back({e.type, tok_start[e.token_start], tok_end[e.token_end - 1], e.level});
  return render_enamex(text, spans);
}

inline std::string to_enamex_file(const std::vector<SyntheticSentence>& sentences) {
  std::string out;
  for (const SyntheticSentence& s : sentences) {
    out += to_enamex_line(s);
    out += '\n';
  }
  return out;
}

}  // namespace nner::testing
