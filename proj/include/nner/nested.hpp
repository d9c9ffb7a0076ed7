#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nner/crf.hpp"
#include "nner/error.hpp"
#include "nner/features.hpp"
#include "nner/tags.hpp"
#include "nner/types.hpp"

namespace nner {

/// The three ways to handle two-level nesting: two per-level models, one
/// joint-tag model, or the level-1 model plus the joint model's level-2
/// half.
enum class Strategy { separated, joint, hybrid };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::separated: return "separated";
    case Strategy::joint: return "joint";
    case Strategy::hybrid: return "hybrid";
  }
  return "?";
}

inline Strategy strategy_from(std::string_view s) {
  if (s == "separated") return Strategy::separated;
  if (s == "joint") return Strategy::joint;
  if (s == "hybrid") return Strategy::hybrid;
  fail(ErrorKind::parse_error, "unknown strategy '" + std::string(s) + "'");
}

struct NestedModel {
  Strategy strategy = Strategy::joint;
  std::optional<CrfModel> level1;
  std::optional<CrfModel> level2;
  std::optional<CrfModel> joint;

  const std::string& fingerprint() const {
    if (level1) return level1->template_fingerprint;
    if (joint) return joint->template_fingerprint;
    return level2->template_fingerprint;
  }

  void save(const std::string& dir) const;
  static NestedModel load(const std::string& dir);
};

/// Trains the CRFs a strategy needs. Level-3 entities are discarded (their
/// count is reported through `level3_discarded` when given). All sentences
/// participate in every contained model, including all-O ones.
inline NestedModel train_nested(std::span<const Sentence> corpus, Strategy strategy,
                                const FeatureTemplate& tpl, const TrainConfig& config,
                                const ClusterLexicon* clusters = nullptr,
                                const EmbeddingTable* embeddings = nullptr,
                                size_t* level3_discarded = nullptr) {
  if (corpus.empty()) fail(ErrorKind::no_data, "empty training corpus");
  size_t level3 = 0;
  for (const Sentence& s : corpus)
    for (const EntitySpan& e : s.entities)
      if (e.level >= 3) ++level3;
  if (level3_discarded) *level3_discarded = level3;

  std::vector<LabeledSequence> level1_data, level2_data, joint_data;
  const bool need_level1 = strategy != Strategy::joint;
  const bool need_level2 = strategy == Strategy::separated;
  const bool need_joint = strategy != Strategy::separated;
  for (const Sentence& sent : corpus) {
    std::vector<SparseFeatureVector> feats =
        extract_sentence_features(sent.tokens, tpl, clusters, embeddings);
    TagColumns cols = tag_columns(sent);
    auto to_strings = [](const auto& tags) {
      std::vector<std::string> out;
      out.reserve(tags.size());
      for (const auto& t : tags) out.push_back(to_string(t));
      return out;
    };
    if (need_level1) level1_data.push_back({feats, to_strings(cols.level1)});
    if (need_level2) level2_data.push_back({feats, to_strings(cols.level2)});
    if (need_joint) joint_data.push_back({std::move(feats), to_strings(cols.joint)});
  }

  NestedModel model;
  model.strategy = strategy;
  const std::string fp = tpl.fingerprint();
  if (need_level1) model.level1 = train(level1_data, fp, config);
  if (need_level2) model.level2 = train(level2_data, fp, config);
  if (need_joint) model.joint = train(joint_data, fp, config);
  return model;
}

/// Removes every level-2 span contained in (or equal to) a level-1 span.
/// Level-1 spans pass through untouched.
inline std::pair<std::vector<EntitySpan>, std::vector<EntitySpan>> resolve_conflicts(
    std::vector<EntitySpan> level1, std::span<const EntitySpan> level2) {
  std::vector<EntitySpan> kept2;
  for (const EntitySpan& e2 : level2) {
    bool inside = false;
    for (const EntitySpan& e1 : level1) {
      if (e1.token_start <= e2.token_start && e2.token_end <= e1.token_end) {
        inside = true;
        break;
      }
    }
    if (!inside) kept2.push_back(e2);
  }
  return {std::move(level1), std::move(kept2)};
}

namespace detail {

inline std::vector<EntitySpan> decode_level(const std::vector<BioTag>& tags, int level) {
  std::vector<EntitySpan> spans = bio_decode(tags, /*repair=*/true);
  for (EntitySpan& s : spans) s.level = level;
  return spans;
}

inline std::vector<BioTag> tags_from_strings(const std::vector<std::string>& labels) {
  std::vector<BioTag> out;
  out.reserve(labels.size());
  for (const std::string& s : labels) out.push_back(bio_tag_from(s));
  return out;
}

}  // namespace detail

/// Predicts both levels for one sentence. `extraction_fingerprint` is the
/// fingerprint of the template the features were extracted with; it must
/// match the model's.
inline std::pair<std::vector<EntitySpan>, std::vector<EntitySpan>> predict_nested(
    const NestedModel& model, std::span<const SparseFeatureVector> sent_features,
    const std::string& extraction_fingerprint) {
  if (extraction_fingerprint != model.fingerprint())
    fail(ErrorKind::fingerprint_mismatch,
         "features extracted with '" + extraction_fingerprint + "' but model was trained with '" +
             model.fingerprint() + "'");
  if (sent_features.empty()) return {};

  std::vector<EntitySpan> l1, l2;
  auto joint_halves = [&]() {
    std::vector<std::string> labels = viterbi(*model.joint, sent_features);
    std::vector<JointTag> tags;
    tags.reserve(labels.size());
    for (const std::string& s : labels) tags.push_back(joint_tag_from(s));
    return decode_joint(tags);
  };
  switch (model.strategy) {
    case Strategy::separated: {
      l1 = detail::decode_level(detail::tags_from_strings(viterbi(*model.level1, sent_features)), 1);
      l2 = detail::decode_level(detail::tags_from_strings(viterbi(*model.level2, sent_features)), 2);
      break;
    }
    case Strategy::joint: {
      auto [t1, t2] = joint_halves();
      l1 = detail::decode_level(t1, 1);
      l2 = detail::decode_level(t2, 2);
      break;
    }
    case Strategy::hybrid: {
      l1 = detail::decode_level(detail::tags_from_strings(viterbi(*model.level1, sent_features)), 1);
      l2 = detail::decode_level(joint_halves().second, 2);
      break;
    }
  }
  return resolve_conflicts(std::move(l1), l2);
}

// --- on-disk layout: a directory with a `strategy` file plus one CRF model
// file per contained model.

inline void NestedModel::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io_error, "cannot create model directory '" + dir + "'");
  {
    std::ofstream f(fs::path(dir) / "strategy");
    if (!f) fail(ErrorKind::io_error, "cannot write strategy file in '" + dir + "'");
    f << to_string(strategy) << "\n";
  }
  if (level1) level1->save((fs::path(dir) / "level1.crf").string());
  if (level2) level2->save((fs::path(dir) / "level2.crf").string());
  if (joint) joint->save((fs::path(dir) / "joint.crf").string());
}

inline NestedModel NestedModel::load(const std::string& dir) {
  namespace fs = std::filesystem;
  NestedModel model;
  {
    std::ifstream f(fs::path(dir) / "strategy");
    if (!f) fail(ErrorKind::io_error, "cannot open strategy file in '" + dir + "'");
    std::string line;
    std::getline(f, line);
    model.strategy = strategy_from(line);
  }
  auto load_if = [&](const char* name) -> std::optional<CrfModel> {
    fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) return std::nullopt;
    return CrfModel::load(p.string());
  };
  model.level1 = load_if("level1.crf");
  model.level2 = load_if("level2.crf");
  model.joint = load_if("joint.crf");

  const bool ok = (model.strategy == Strategy::separated && model.level1 && model.level2) ||
                  (model.strategy == Strategy::joint && model.joint) ||
                  (model.strategy == Strategy::hybrid && model.level1 && model.joint);
  if (!ok)
    fail(ErrorKind::parse_error,
         "model directory '" + dir + "' lacks the CRF files its strategy needs");
  std::vector<const CrfModel*> present;
  if (model.level1) present.push_back(&*model.level1);
  if (model.level2) present.push_back(&*model.level2);
  if (model.joint) present.push_back(&*model.joint);
  for (const CrfModel* m : present)
    if (m->template_fingerprint != present[0]->template_fingerprint)
      fail(ErrorKind::fingerprint_mismatch, "model files in '" + dir + "' disagree on template");
  return model;
}

}  // namespace nner
