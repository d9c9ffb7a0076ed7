#pragma once

// Independent checker for the clustering trajectory: replays the insertion
// schedule and recomputes the average mutual information of every candidate
// merge from scratch (full cluster-bigram table each time), so it shares no
// code with the incremental implementation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nner/brown.hpp"

namespace nner::testing {

struct BrownReplay {
  const CorpusCounts& counts;
  std::vector<std::vector<int>> clusters;  // word ids per active cluster
  std::vector<int> cluster_of;             // word id -> active index, -1 unplaced

  explicit BrownReplay(const CorpusCounts& c)
      : counts(c), cluster_of(c.vocab.size(), -1) {}

  void place(int word) {
    cluster_of[static_cast<size_t>(word)] = static_cast<int>(clusters.size());
    clusters.push_back({word});
  }

  void merge(size_t i, size_t j) {
    for (int w : clusters[j]) cluster_of[static_cast<size_t>(w)] = static_cast<int>(i);
    clusters[i].insert(clusters[i].end(), clusters[j].begin(), clusters[j].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
    for (int& c : cluster_of)
      if (c > static_cast<int>(j)) --c;
  }

  // AMI of an arbitrary cluster assignment, built from word bigrams from
  // scratch. `assign` maps word id -> cluster id (-1 = excluded).
  double ami_of(const std::vector<int>& assign) const {
    std::map<std::pair<int, int>, double> cl_bigram;
    std::map<int, double> left, right;
    double total = 0.0;
    for (const auto& [key, c] : counts.bigrams) {
      int a = assign[static_cast<size_t>(key >> 32)];
      int b = assign[static_cast<size_t>(key & 0xFFFFFFFFu)];
      if (a < 0 || b < 0) continue;
      double cd = static_cast<double>(c);
      cl_bigram[{a, b}] += cd;
      left[a] += cd;
      right[b] += cd;
      total += cd;
    }
    if (total == 0.0) return 0.0;
    double ami = 0.0;
    for (const auto& [pair, c] : cl_bigram) {
      if (c <= 0) continue;
      ami += (c / total) * std::log(c * total / (left[pair.first] * right[pair.second]));
    }
    return ami;
  }

  double current_ami() const { return ami_of(cluster_of); }

  // AMI after hypothetically merging active clusters i and j.
  double merged_ami(size_t i, size_t j) const {
    std::vector<int> assign = cluster_of;
    for (size_t w = 0; w < assign.size(); ++w) {
      if (assign[w] == static_cast<int>(j)) assign[w] = static_cast<int>(i);
    }
    return ami_of(assign);
  }

  double merge_loss(size_t i, size_t j) const { return current_ami() - merged_ami(i, j); }
};

/// Replays `tree.merge_history` against the schedule implied by (vocab, m)
/// and verifies every recorded merge has minimal AMI loss among all pairs
/// available at that step. Returns true on success; `diag` collects the
/// first discrepancy.
inline bool verify_brown_merges(const CorpusCounts& counts, const ClusterTree& tree, int m,
                                double eps, std::string* diag = nullptr) {
  const int v = static_cast<int>(counts.vocab.size());
  BrownReplay replay(counts);
  const int window = std::min(m, v);
  for (int w = 0; w < window; ++w) replay.place(w);

  size_t next_insert = static_cast<size_t>(window);
  for (size_t step = 0; step < tree.merge_history.size(); ++step) {
    if (next_insert < static_cast<size_t>(v)) {
      replay.place(static_cast<int>(next_insert));
      ++next_insert;
    }
    const MergeRecord& rec = tree.merge_history[step];
    size_t i = static_cast<size_t>(rec.cluster_a);
    size_t j = static_cast<size_t>(rec.cluster_b);
    if (i >= replay.clusters.size() || j >= replay.clusters.size() || i >= j) {
      if (diag) {
        std::ostringstream os;
        os << "step " << step << ": bad merge indices (" << i << "," << j << ")";
        *diag = os.str();
      }
      return false;
    }
    double oracle_loss = replay.merge_loss(i, j);
    if (std::fabs(oracle_loss - rec.ami_loss) > eps) {
      if (diag) {
        std::ostringstream os;
        os << "step " << step << ": recorded loss " << rec.ami_loss << " vs oracle "
           << oracle_loss;
        *diag = os.str();
      }
      return false;
    }
    for (size_t a = 0; a < replay.clusters.size(); ++a) {
      for (size_t b = a + 1; b < replay.clusters.size(); ++b) {
        double alt = replay.merge_loss(a, b);
        if (alt < oracle_loss - eps) {
          if (diag) {
            std::ostringstream os;
            os << "step " << step << ": pair (" << a << "," << b << ") loses " << alt
               << " < chosen " << oracle_loss;
            *diag = os.str();
          }
          return false;
        }
      }
    }
    replay.merge(i, j);
  }
  if (replay.clusters.size() != 1 || next_insert != static_cast<size_t>(v)) {
    if (diag) *diag = "merge history does not reduce the vocabulary to one cluster";
    return false;
  }
  return true;
}

inline bool is_prefix_code(const ClusterTree& tree) {
  std::vector<std::string> paths;
  paths.reserve(tree.paths.size());
  for (const auto& [_, bits] : tree.paths) paths.push_back(bits);
  for (size_t a = 0; a < paths.size(); ++a) {
    for (size_t b = 0; b < paths.size(); ++b) {
      if (a == b) continue;
      if (paths[b].size() >= paths[a].size() &&
          paths[b].compare(0, paths[a].size(), paths[a]) == 0)
        return false;
    }
  }
  return true;
}

}  // namespace nner::testing
