#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nner/error.hpp"

namespace nner {

/// Unigram and bigram statistics feeding the clustering. Vocab is sorted by
/// count descending, ties lexicographic ascending; words below the min
/// count are folded into `<UNK>` before bigrams are counted. Bigrams never
/// cross sentence boundaries.
struct CorpusCounts {
  std::vector<std::pair<std::string, int64_t>> vocab;
  std::unordered_map<std::string, int> word_id;
  std::unordered_map<uint64_t, int64_t> bigrams;  // key = (a << 32) | b
  int64_t total_tokens = 0;

  static uint64_t key(int a, int b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
           static_cast<uint32_t>(b);
  }
  int64_t bigram(int a, int b) const {
    auto it = bigrams.find(key(a, b));
    return it == bigrams.end() ? 0 : it->second;
  }
};

inline CorpusCounts collect_counts(std::span<const std::vector<std::string>> sentences,
                                   int64_t min_count = 1) {
  std::unordered_map<std::string, int64_t> raw;
  int64_t total = 0;
  for (const auto& sent : sentences)
    for (const std::string& w : sent) {
      ++raw[w];
      ++total;
    }
  if (total == 0) fail(ErrorKind::empty_corpus, "no tokens in clustering corpus");

  auto mapped = [&](const std::string& w) -> std::string {
    return raw.at(w) < min_count ? "<UNK>" : w;
  };
  std::unordered_map<std::string, int64_t> counts;
  for (const auto& [w, c] : raw) counts[raw.at(w) < min_count ? "<UNK>" : w] += c;

  CorpusCounts out;
  out.total_tokens = total;
  out.vocab.assign(counts.begin(), counts.end());
  std::sort(out.vocab.begin(), out.vocab.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (size_t i = 0; i < out.vocab.size(); ++i)
    out.word_id[out.vocab[i].first] = static_cast<int>(i);

  for (const auto& sent : sentences) {
    for (size_t i = 1; i < sent.size(); ++i) {
      int a = out.word_id.at(mapped(sent[i - 1]));
      int b = out.word_id.at(mapped(sent[i]));
      ++out.bigrams[CorpusCounts::key(a, b)];
    }
  }
  return out;
}

struct MergeRecord {
  int cluster_a = 0;  // index of the merged-into cluster at merge time
  int cluster_b = 0;  // index of the absorbed cluster at merge time
  double ami_loss = 0.0;
};

/// Result of hierarchical clustering: each word's root-to-leaf bit path
/// (0 = merged-into side) plus the full merge history.
struct ClusterTree {
  std::unordered_map<std::string, std::string> paths;
  std::vector<MergeRecord> merge_history;
};

namespace detail {

struct BrownState {
  // Word-level adjacency, by vocab id.
  std::vector<std::vector<std::pair<int, int64_t>>> right_adj, left_adj;
  // Active-cluster bigram matrix and marginals, indexed by current position.
  std::vector<std::vector<double>> cnt;
  std::vector<double> left_sum, right_sum;
  double total = 0.0;  // bigram mass among placed words
  std::vector<int> node_of;       // active position -> tree node
  std::vector<int> word_cluster;  // vocab id -> active position (-1 = unplaced)

  size_t active() const { return cnt.size(); }

  double q(double c, double l, double r) const {
    if (c <= 0) return 0.0;
    return (c / total) * std::log(c * total / (l * r));
  }

  // AMI loss of merging active clusters i and j, computed from the terms
  // adjacent to i and j only.
  double merge_loss(size_t i, size_t j) const {
    const size_t a = active();
    double before = 0.0;
    for (size_t x = 0; x < a; ++x) {
      if (x == i || x == j) continue;
      before += q(cnt[i][x], left_sum[i], right_sum[x]);
      before += q(cnt[j][x], left_sum[j], right_sum[x]);
      before += q(cnt[x][i], left_sum[x], right_sum[i]);
      before += q(cnt[x][j], left_sum[x], right_sum[j]);
    }
    before += q(cnt[i][i], left_sum[i], right_sum[i]);
    before += q(cnt[i][j], left_sum[i], right_sum[j]);
    before += q(cnt[j][i], left_sum[j], right_sum[i]);
    before += q(cnt[j][j], left_sum[j], right_sum[j]);

    const double lu = left_sum[i] + left_sum[j];
    const double ru = right_sum[i] + right_sum[j];
    double after = 0.0;
    for (size_t x = 0; x < a; ++x) {
      if (x == i || x == j) continue;
      after += q(cnt[i][x] + cnt[j][x], lu, right_sum[x]);
      after += q(cnt[x][i] + cnt[x][j], left_sum[x], ru);
    }
    after += q(cnt[i][i] + cnt[i][j] + cnt[j][i] + cnt[j][j], lu, ru);
    return before - after;
  }

  void place_word(int w, int tree_node) {
    const size_t k = active();
    for (auto& row : cnt) row.push_back(0.0);
    cnt.emplace_back(k + 1, 0.0);
    left_sum.push_back(0.0);
    right_sum.push_back(0.0);
    node_of.push_back(tree_node);
    word_cluster[static_cast<size_t>(w)] = static_cast<int>(k);
    for (const auto& [o, c] : right_adj[static_cast<size_t>(w)]) {
      int p = word_cluster[static_cast<size_t>(o)];
      if (p < 0) continue;
      cnt[k][static_cast<size_t>(p)] += static_cast<double>(c);
      left_sum[k] += static_cast<double>(c);
      right_sum[static_cast<size_t>(p)] += static_cast<double>(c);
      total += static_cast<double>(c);
    }
    for (const auto& [o, c] : left_adj[static_cast<size_t>(w)]) {
      if (o == w) continue;  // (w, w) already added above
      int p = word_cluster[static_cast<size_t>(o)];
      if (p < 0) continue;
      cnt[static_cast<size_t>(p)][k] += static_cast<double>(c);
      left_sum[static_cast<size_t>(p)] += static_cast<double>(c);
      right_sum[k] += static_cast<double>(c);
      total += static_cast<double>(c);
    }
  }

  // Folds cluster j into cluster i and drops slot j.
  void apply_merge(size_t i, size_t j) {
    const size_t a = active();
    for (size_t x = 0; x < a; ++x) {
      if (x == i || x == j) continue;
      cnt[i][x] += cnt[j][x];
      cnt[x][i] += cnt[x][j];
    }
    cnt[i][i] += cnt[i][j] + cnt[j][i] + cnt[j][j];
    left_sum[i] += left_sum[j];
    right_sum[i] += right_sum[j];
    for (size_t x = 0; x < a; ++x) cnt[x].erase(cnt[x].begin() + static_cast<std::ptrdiff_t>(j));
    cnt.erase(cnt.begin() + static_cast<std::ptrdiff_t>(j));
    left_sum.erase(left_sum.begin() + static_cast<std::ptrdiff_t>(j));
    right_sum.erase(right_sum.begin() + static_cast<std::ptrdiff_t>(j));
    node_of.erase(node_of.begin() + static_cast<std::ptrdiff_t>(j));
    for (int& p : word_cluster) {
      if (p == static_cast<int>(j))
        p = static_cast<int>(i);
      else if (p > static_cast<int>(j))
        --p;
    }
  }
};

}  // namespace detail

/// Windowed agglomerative Brown clustering. The m most frequent words start
/// as singleton clusters; each remaining word is inserted as an (m+1)-th
/// cluster and the pair whose merge loses the least average mutual
/// information is merged, ties broken toward the lexicographically smallest
/// (index_a, index_b). After all insertions the remaining clusters are
/// merged down to one; bit-strings are root-to-leaf paths with 0 on the
/// merged-into side.
inline ClusterTree brown_cluster(const CorpusCounts& counts, int m) {
  if (m < 2) fail(ErrorKind::invalid_m, "need m >= 2, got " + std::to_string(m));
  const int v = static_cast<int>(counts.vocab.size());
  if (v < 2) fail(ErrorKind::empty_corpus, "need at least 2 distinct words");

  detail::BrownState st;
  st.right_adj.resize(static_cast<size_t>(v));
  st.left_adj.resize(static_cast<size_t>(v));
  for (const auto& [key, c] : counts.bigrams) {
    int a = static_cast<int>(key >> 32);
    int b = static_cast<int>(key & 0xFFFFFFFFu);
    st.right_adj[static_cast<size_t>(a)].push_back({b, c});
    st.left_adj[static_cast<size_t>(b)].push_back({a, c});
  }
  // unordered_map iteration order is not deterministic; fix it.
  for (auto& adj : st.right_adj) std::sort(adj.begin(), adj.end());
  for (auto& adj : st.left_adj) std::sort(adj.begin(), adj.end());
  st.word_cluster.assign(static_cast<size_t>(v), -1);

  // Tree nodes: 0..v-1 are word leaves, internal nodes appended.
  struct TreeNode {
    int left = -1, right = -1;
  };
  std::vector<TreeNode> nodes(static_cast<size_t>(v));

  ClusterTree out;
  auto best_merge = [&]() -> std::pair<size_t, size_t> {
    double best = std::numeric_limits<double>::infinity();
    std::pair<size_t, size_t> arg{0, 1};
    const size_t a = st.active();
    for (size_t i = 0; i < a; ++i) {
      for (size_t j = i + 1; j < a; ++j) {
        double loss = st.merge_loss(i, j);
        if (loss < best) {
          best = loss;
          arg = {i, j};
        }
      }
    }
    return arg;
  };
  auto do_merge = [&](size_t i, size_t j) {
    double loss = st.merge_loss(i, j);
    out.merge_history.push_back({static_cast<int>(i), static_cast<int>(j), loss});
    nodes.push_back({st.node_of[i], st.node_of[j]});
    st.node_of[i] = static_cast<int>(nodes.size() - 1);
    st.apply_merge(i, j);
  };

  const int window = std::min(m, v);
  for (int w = 0; w < window; ++w) st.place_word(w, w);
  for (int w = window; w < v; ++w) {
    st.place_word(w, w);
    auto [i, j] = best_merge();
    do_merge(i, j);
  }
  while (st.active() > 1) {
    auto [i, j] = best_merge();
    do_merge(i, j);
  }

  // Walk the tree from the root, collecting bit paths.
  std::vector<std::pair<int, std::string>> stack{{st.node_of[0], ""}};
  while (!stack.empty()) {
    auto [n, path] = std::move(stack.back());
    stack.pop_back();
    const TreeNode& nd = nodes[static_cast<size_t>(n)];
    if (nd.left < 0) {
      out.paths[counts.vocab[static_cast<size_t>(n)].first] = path;
    } else {
      stack.push_back({nd.left, path + "0"});
      stack.push_back({nd.right, path + "1"});
    }
  }
  return out;
}

/// Paths-file writer: `bitstring<TAB>word<TAB>count` lines sorted by
/// bit-string, preceded by '#' comment lines carrying the run settings.
inline void write_paths(std::ostream& out, const ClusterTree& tree, const CorpusCounts& counts,
                        const std::string& header_note = "") {
  if (!header_note.empty()) out << "# " << header_note << "\n";
  std::vector<std::pair<std::string, std::string>> rows;  // (bits, word)
  rows.reserve(tree.paths.size());
  for (const auto& [word, bits] : tree.paths) rows.push_back({bits, word});
  std::sort(rows.begin(), rows.end());
  for (const auto& [bits, word] : rows) {
    auto it = counts.word_id.find(word);
    int64_t c = it == counts.word_id.end() ? 0 : counts.vocab[static_cast<size_t>(it->second)].second;
    out << bits << '\t' << word << '\t' << c << "\n";
  }
}

}  // namespace nner
