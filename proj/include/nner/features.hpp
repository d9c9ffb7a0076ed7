#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nner/error.hpp"
#include "nner/types.hpp"
#include "nner/unicode.hpp"

namespace nner {

struct FeatureValue {
  std::string name;
  double value = 1.0;

  bool operator==(const FeatureValue&) const = default;
};

/// Named real-valued features for one token position. Binary features carry
/// value 1.0; embedding features carry the vector component. Names are
/// deterministic functions of (sentence, position, template) and never
/// contain raw tab or newline characters.
using SparseFeatureVector = std::vector<FeatureValue>;

/// Which feature families to extract and how far the context window
/// reaches. The serialized fingerprint is stored in trained models and
/// checked at predict time.
struct FeatureTemplate {
  int window = 2;  // half-width; 2 means a window of size 5
  bool use_word = true;
  bool use_lower = true;
  std::vector<int> affix_lengths = {1, 2, 3, 4};
  bool use_shape = true;
  bool use_clusters = false;
  std::vector<int> cluster_prefix_lengths = {2, 4, 6, 8, 10, 12, 16, 20};
  bool use_full_bitstring = true;
  std::optional<int> embedding_dim;

  void validate() const {
    if (window < 0) fail(ErrorKind::parse_error, "window must be >= 0");
    for (int k : affix_lengths)
      if (k < 1) fail(ErrorKind::parse_error, "affix lengths must be >= 1");
    for (int k : cluster_prefix_lengths)
      if (k < 1) fail(ErrorKind::parse_error, "cluster prefix lengths must be >= 1");
    if (embedding_dim && *embedding_dim < 1)
      fail(ErrorKind::parse_error, "embedding dim must be >= 1");
  }

  std::string fingerprint() const {
    std::ostringstream os;
    auto ints = [&](const std::vector<int>& v) {
      for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    };
    os << "v1;window=" << window << ";word=" << use_word << ";lower=" << use_lower
       << ";affix=";
    ints(affix_lengths);
    os << ";shape=" << use_shape << ";clusters=" << use_clusters << ";cluster_prefixes=";
    ints(cluster_prefix_lengths);
    os << ";full_bc=" << use_full_bitstring << ";emb_dim=";
    if (embedding_dim)
      os << *embedding_dim;
    else
      os << "-";
    return os.str();
  }

  static FeatureTemplate from_fingerprint(std::string_view fp);
};

namespace detail {

inline std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, p - start));
    start = p + 1;
  }
}

inline std::vector<int> parse_int_list(std::string_view s) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const std::string& part : split_on(s, ',')) {
    int v = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size())
      fail(ErrorKind::parse_error, "bad integer '" + part + "' in fingerprint");
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

inline FeatureTemplate FeatureTemplate::from_fingerprint(std::string_view fp) {
  std::vector<std::string> parts = detail::split_on(fp, ';');
  if (parts.empty() || parts[0] != "v1")
    fail(ErrorKind::parse_error, "unsupported template fingerprint '" + std::string(fp) + "'");
  FeatureTemplate t;
  for (size_t i = 1; i < parts.size(); ++i) {
    size_t eq = parts[i].find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::parse_error, "bad fingerprint field '" + parts[i] + "'");
    std::string key = parts[i].substr(0, eq);
    std::string val = parts[i].substr(eq + 1);
    if (key == "window")
      t.window = detail::parse_int_list(val).at(0);
    else if (key == "word")
      t.use_word = val == "1";
    else if (key == "lower")
      t.use_lower = val == "1";
    else if (key == "affix")
      t.affix_lengths = detail::parse_int_list(val);
    else if (key == "shape")
      t.use_shape = val == "1";
    else if (key == "clusters")
      t.use_clusters = val == "1";
    else if (key == "cluster_prefixes")
      t.cluster_prefix_lengths = detail::parse_int_list(val);
    else if (key == "full_bc")
      t.use_full_bitstring = val == "1";
    else if (key == "emb_dim")
      t.embedding_dim = val == "-" ? std::nullopt : std::optional<int>(detail::parse_int_list(val).at(0));
    else
      fail(ErrorKind::parse_error, "unknown fingerprint key '" + key + "'");
  }
  t.validate();
  return t;
}

/// Word -> Brown bit-string. Lookup tries the surface first, then its
/// lowercased form.
struct ClusterLexicon {
  std::unordered_map<std::string, std::string> paths;

  const std::string* lookup(const std::string& surface) const {
    auto it = paths.find(surface);
    if (it != paths.end()) return &it->second;
    it = paths.find(utf8_to_lower(surface));
    return it == paths.end() ? nullptr : &it->second;
  }
};

/// Word -> dense vector, keyed by lowercased form. Unknown words contribute
/// no embedding features.
struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* lookup(const std::string& surface) const {
    auto it = vectors.find(utf8_to_lower(surface));
    return it == vectors.end() ? nullptr : &it->second;
  }
};

struct WordShape {
  std::string shape;
  std::string collapsed;
};

/// Maps each code point to a shape class: uppercase -> 'A', lowercase ->
/// 'a', digit -> '0', anything else verbatim. `collapsed` squeezes maximal
/// runs of the same shape character to one instance.
inline WordShape word_shape(std::string_view surface) {
  WordShape out;
  size_t i = 0;
  char32_t last = 0;
  bool have_last = false;
  while (i < surface.size()) {
    char32_t cp = utf8_next(surface, i);
    char32_t mapped;
    if (is_upper_cp(cp))
      mapped = U'A';
    else if (is_lower_cp(cp))
      mapped = U'a';
    else if (is_digit_cp(cp))
      mapped = U'0';
    else
      mapped = cp;
    utf8_append(out.shape, mapped);
    if (!have_last || mapped != last) utf8_append(out.collapsed, mapped);
    last = mapped;
    have_last = true;
  }
  return out;
}

namespace detail {

/// Escapes separator characters so feature names stay unambiguous in
/// serialized models: backslash, '=', '|', '+', tab, newline, CR.
inline std::string escape_value(std::string_view v) {
  std::string out;
  out.reserve(v.size());
  for (char c : v) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '=': out += "\\="; break;
      case '|': out += "\\|"; break;
      case '+': out += "\\+"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string cp_prefix(std::string_view s, size_t k) {
  size_t i = 0, n = 0;
  while (i < s.size() && n < k) {
    utf8_next(s, i);
    ++n;
  }
  return std::string(s.substr(0, i));
}

inline std::string cp_suffix(std::string_view s, size_t k) {
  std::vector<char32_t> cps = utf8_decode(s);
  if (k > cps.size()) k = cps.size();
  std::string out;
  for (size_t i = cps.size() - k; i < cps.size(); ++i) utf8_append(out, cps[i]);
  return out;
}

struct FlagSet {
  bool capitalized = false;
  bool all_caps = false;
  bool has_digit = false;
  bool has_hyphen = false;
};

inline FlagSet surface_flags(std::string_view surface) {
  FlagSet f;
  bool first = true;
  bool any = false;
  f.all_caps = true;
  size_t i = 0;
  while (i < surface.size()) {
    char32_t cp = utf8_next(surface, i);
    any = true;
    if (first) {
      f.capitalized = is_upper_cp(cp);
      first = false;
    }
    if (!is_upper_cp(cp)) f.all_caps = false;
    if (is_digit_cp(cp)) f.has_digit = true;
    if (cp == U'-') f.has_hyphen = true;
  }
  if (!any) f.all_caps = false;
  return f;
}

}  // namespace detail

/// Extracts the sparse feature vector for position `i` of a sentence.
///
/// Positional families (surface, lowercase, affixes, shapes) emit unigrams
/// F[d] for every offset d in [-window, window] and bigrams
/// F[d]|F[d+1] for adjacent in-window offsets; out-of-range positions take
/// the sentinel values <BOS>/<EOS>. Brown-cluster and embedding families
/// emit unigrams only. Affix features are omitted where the surface is
/// shorter than the affix length, and cluster/embedding features where the
/// word is not in the lexicon.
inline SparseFeatureVector extract_token_features(std::span<const Token> sentence, size_t i,
                                                  const FeatureTemplate& tpl,
                                                  const ClusterLexicon* clusters = nullptr,
                                                  const EmbeddingTable* embeddings = nullptr) {
  if (tpl.use_clusters && clusters == nullptr)
    fail(ErrorKind::missing_lexicon, "template enables cluster features but no lexicon given");
  if (tpl.embedding_dim && embeddings == nullptr)
    fail(ErrorKind::missing_lexicon, "template enables embedding features but no table given");
  if (tpl.embedding_dim && embeddings && *tpl.embedding_dim != embeddings->dim)
    fail(ErrorKind::dim_mismatch,
         "template wants dim " + std::to_string(*tpl.embedding_dim) + " but table has dim " +
             std::to_string(embeddings->dim));

  const int n = static_cast<int>(sentence.size());
  const int pos = static_cast<int>(i);
  const int w = tpl.window;

  // Cache surfaces/shapes once per window position.
  auto surface_at = [&](int d) -> std::optional<std::string> {
    int p = pos + d;
    if (p < 0 || p >= n) return std::nullopt;
    return sentence[static_cast<size_t>(p)].surface;
  };
  auto sentinel = [](int d) { return d < 0 ? std::string("<BOS>") : std::string("<EOS>"); };

  SparseFeatureVector out;

  // family value for offset d, or nullopt to omit the feature entirely
  using ValueFn = std::function<std::optional<std::string>(int)>;
  auto emit_family = [&](const std::string& fam, const ValueFn& value_of) {
    std::vector<std::optional<std::string>> vals;
    for (int d = -w; d <= w; ++d) vals.push_back(value_of(d));
    for (int d = -w; d <= w; ++d) {
      const auto& v = vals[static_cast<size_t>(d + w)];
      if (!v) continue;
      out.push_back({fam + "[" + std::to_string(d) + "]=" + detail::escape_value(*v), 1.0});
    }
    for (int d = -w; d + 1 <= w; ++d) {
      const auto& v1 = vals[static_cast<size_t>(d + w)];
      const auto& v2 = vals[static_cast<size_t>(d + 1 + w)];
      if (!v1 || !v2) continue;
      out.push_back({fam + "[" + std::to_string(d) + "]|" + fam + "[" + std::to_string(d + 1) +
                         "]=" + detail::escape_value(*v1) + "|" + detail::escape_value(*v2),
                     1.0});
    }
  };

  if (tpl.use_word) {
    emit_family("w", [&](int d) -> std::optional<std::string> {
      auto s = surface_at(d);
      return s ? *s : sentinel(d);
    });
  }
  if (tpl.use_lower) {
    emit_family("wl", [&](int d) -> std::optional<std::string> {
      auto s = surface_at(d);
      return s ? utf8_to_lower(*s) : sentinel(d);
    });
  }
  for (int k : tpl.affix_lengths) {
    size_t uk = static_cast<size_t>(k);
    emit_family("p" + std::to_string(k), [&](int d) -> std::optional<std::string> {
      auto s = surface_at(d);
      if (!s) return sentinel(d);
      if (utf8_length(*s) < uk) return std::nullopt;
      return detail::cp_prefix(*s, uk);
    });
    emit_family("s" + std::to_string(k), [&](int d) -> std::optional<std::string> {
      auto s = surface_at(d);
      if (!s) return sentinel(d);
      if (utf8_length(*s) < uk) return std::nullopt;
      return detail::cp_suffix(*s, uk);
    });
  }
  if (tpl.use_shape) {
    emit_family("sh", [&](int d) -> std::optional<std::string> {
      auto s = surface_at(d);
      return s ? word_shape(*s).shape : sentinel(d);
    });
    emit_family("shc", [&](int d) -> std::optional<std::string> {
      auto s = surface_at(d);
      return s ? word_shape(*s).collapsed : sentinel(d);
    });
    // Boolean surface flags, unigram only, emitted when true.
    for (int d = -w; d <= w; ++d) {
      auto s = surface_at(d);
      if (!s) continue;
      detail::FlagSet f = detail::surface_flags(*s);
      std::string suffix = "[" + std::to_string(d) + "]";
      if (f.capitalized) out.push_back({"cap" + suffix, 1.0});
      if (f.all_caps) out.push_back({"allcaps" + suffix, 1.0});
      if (f.has_digit) out.push_back({"hasdigit" + suffix, 1.0});
      if (f.has_hyphen) out.push_back({"hashyph" + suffix, 1.0});
    }
  }
  if (tpl.use_clusters) {
    for (int d = -w; d <= w; ++d) {
      auto s = surface_at(d);
      if (!s) continue;
      const std::string* bits = clusters->lookup(*s);
      if (!bits) continue;
      std::string suffix = "[" + std::to_string(d) + "]=";
      if (tpl.use_full_bitstring) out.push_back({"bc" + suffix + *bits, 1.0});
      for (int k : tpl.cluster_prefix_lengths) {
        std::string prefix = bits->substr(0, static_cast<size_t>(k));
        out.push_back({"bc" + std::to_string(k) + suffix + prefix, 1.0});
      }
    }
  }
  if (tpl.embedding_dim) {
    for (int d = -w; d <= w; ++d) {
      auto s = surface_at(d);
      if (!s) continue;
      const std::vector<double>* vec = embeddings->lookup(*s);
      if (!vec) continue;
      std::string suffix = "[" + std::to_string(d) + "]";
      for (int j = 0; j < embeddings->dim; ++j) {
        out.push_back({"emb" + std::to_string(j) + suffix, (*vec)[static_cast<size_t>(j)]});
      }
    }
  }
  return out;
}

inline std::vector<SparseFeatureVector> extract_sentence_features(
    std::span<const Token> sentence, const FeatureTemplate& tpl,
    const ClusterLexicon* clusters = nullptr, const EmbeddingTable* embeddings = nullptr) {
  std::vector<SparseFeatureVector> out;
  out.reserve(sentence.size());
  for (size_t i = 0; i < sentence.size(); ++i)
    out.push_back(extract_token_features(sentence, i, tpl, clusters, embeddings));
  return out;
}

/// Reads a Brown paths file: `bitstring<TAB>word<TAB>count` per line.
/// Lines starting with '#' are comments. Duplicate words are overwritten
/// (last entry wins) with a warning.
inline ClusterLexicon load_clusters(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  ClusterLexicon lex;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = detail::split_on(line, '\t');
    if (fields.size() != 3)
      fail(ErrorKind::malformed_line,
           "line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    const std::string& bits = fields[0];
    if (bits.empty() || bits.find_first_not_of("01") != std::string::npos)
      fail(ErrorKind::malformed_line,
           "line " + std::to_string(line_no) + ": bad bit-string '" + bits + "'");
    unsigned long long count = 0;
    auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), count);
    if (ec != std::errc() || p != fields[2].data() + fields[2].size())
      fail(ErrorKind::malformed_line,
           "line " + std::to_string(line_no) + ": bad count '" + fields[2] + "'");
    if (warnings && lex.paths.count(fields[1]))
      warnings->push_back("duplicate word '" + fields[1] + "' at line " +
                          std::to_string(line_no) + " (last entry wins)");
    lex.paths[fields[1]] = bits;
  }
  return lex;
}

inline ClusterLexicon load_clusters(const std::string& path,
                                    std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open cluster file '" + path + "'");
  return load_clusters(in, warnings);
}

/// Reads a GloVe-style text embedding file: `word v1 ... vD` per line,
/// space separated. Every line must carry exactly `expected_dim`
/// components. Keys are stored lowercased.
inline EmbeddingTable load_embeddings(std::istream& in, int expected_dim,
                                      std::vector<std::string>* warnings = nullptr) {
  if (expected_dim < 1) fail(ErrorKind::dim_mismatch, "expected_dim must be >= 1");
  EmbeddingTable table;
  table.dim = expected_dim;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = detail::split_on(line, ' ');
    std::erase_if(fields, [](const std::string& f) { return f.empty(); });
    if (fields.empty()) continue;
    if (fields.size() != static_cast<size_t>(expected_dim) + 1)
      fail(ErrorKind::dim_mismatch,
           "line " + std::to_string(line_no) + ": expected " + std::to_string(expected_dim) +
               " components, found " + std::to_string(fields.size() - 1));
    std::vector<double> vec(static_cast<size_t>(expected_dim));
    for (int j = 0; j < expected_dim; ++j) {
      const std::string& f = fields[static_cast<size_t>(j) + 1];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[static_cast<size_t>(j)]);
      if (ec != std::errc() || p != f.data() + f.size())
        fail(ErrorKind::malformed_line,
             "line " + std::to_string(line_no) + ": bad number '" + f + "'");
    }
    std::string key = utf8_to_lower(fields[0]);
    if (warnings && table.vectors.count(key))
      warnings->push_back("duplicate word '" + fields[0] + "' at line " +
                          std::to_string(line_no) + " (last entry wins)");
    table.vectors[key] = std::move(vec);
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path, int expected_dim,
                                      std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open embedding file '" + path + "'");
  return load_embeddings(in, expected_dim, warnings);
}

}  // namespace nner
