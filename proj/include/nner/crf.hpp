#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nner/error.hpp"
#include "nner/features.hpp"
#include "nner/optimize.hpp"

namespace nner {

namespace detail {

/// Shortest decimal that round-trips the double.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(ErrorKind::parse_error, "bad number '" + std::string(s) + "'");
  return v;
}

inline double logsumexp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

/// String <-> dense index bijection with stable insertion order.
struct Alphabet {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> index;

  int add(const std::string& name) {
    auto [it, inserted] = index.emplace(name, static_cast<int>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  }
  int find(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
  }
  size_t size() const { return names.size(); }
};

using LabelAlphabet = Alphabet;
using FeatureAlphabet = Alphabet;

/// Linear-chain CRF parameters. The weight vector holds the emission block
/// (feature-major, |features| x |labels|) followed by the transition block
/// (|labels| x |labels|).
struct CrfModel {
  LabelAlphabet labels;
  FeatureAlphabet features;
  std::vector<double> weights;
  std::string template_fingerprint;
  std::vector<std::pair<std::string, std::string>> metadata;

  size_t n_labels() const { return labels.size(); }
  size_t n_weights() const {
    return features.size() * labels.size() + labels.size() * labels.size();
  }
  double emission_weight(int f, int y) const {
    return weights[static_cast<size_t>(f) * labels.size() + static_cast<size_t>(y)];
  }
  double transition_weight(int from, int to) const {
    return weights[features.size() * labels.size() +
                   static_cast<size_t>(from) * labels.size() + static_cast<size_t>(to)];
  }

  void save(std::ostream& out) const;
  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) fail(ErrorKind::io_error, "cannot write model file '" + path + "'");
    save(f);
  }
  static CrfModel load(std::istream& in);
  static CrfModel load(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorKind::io_error, "cannot open model file '" + path + "'");
    return load(f);
  }
};

/// Log-domain factor scores for one sentence: emission is T x L,
/// transition L x L.
struct Potentials {
  size_t T = 0;
  size_t L = 0;
  std::vector<double> emission;
  std::vector<double> transition;

  double em(size_t t, size_t y) const { return emission[t * L + y]; }
  double& em(size_t t, size_t y) { return emission[t * L + y]; }
  double tr(size_t a, size_t b) const { return transition[a * L + b]; }
  double& tr(size_t a, size_t b) { return transition[a * L + b]; }
};

inline Potentials make_potentials(size_t T, size_t L) {
  Potentials p;
  p.T = T;
  p.L = L;
  p.emission.assign(T * L, 0.0);
  p.transition.assign(L * L, 0.0);
  return p;
}

/// emission[t][y] = sum_f value(f) * w(f, y); features unknown to the model
/// are skipped. transition[a][b] = w(a, b).
inline Potentials compute_potentials(std::span<const SparseFeatureVector> sent_features,
                                     const CrfModel& model) {
  const size_t L = model.n_labels();
  Potentials pot = make_potentials(sent_features.size(), L);
  for (size_t t = 0; t < sent_features.size(); ++t) {
    for (const FeatureValue& fv : sent_features[t]) {
      int f = model.features.find(fv.name);
      if (f < 0) continue;
      const double* wrow = model.weights.data() + static_cast<size_t>(f) * L;
      for (size_t y = 0; y < L; ++y) pot.em(t, y) += fv.value * wrow[y];
    }
  }
  const double* trans = model.weights.data() + model.features.size() * L;
  for (size_t i = 0; i < L * L; ++i) pot.transition[i] = trans[i];
  return pot;
}

/// score of one label path: sum of emissions plus transitions, accumulated
/// left to right (same order as the forward and Viterbi recursions).
inline double score_path(const Potentials& pot, std::span<const int> path) {
  if (pot.T == 0) return 0.0;
  double s = pot.em(0, static_cast<size_t>(path[0]));
  for (size_t t = 1; t < pot.T; ++t) {
    s += pot.tr(static_cast<size_t>(path[t - 1]), static_cast<size_t>(path[t]));
    s += pot.em(t, static_cast<size_t>(path[t]));
  }
  return s;
}

namespace detail {

inline std::vector<double> forward_table(const Potentials& pot) {
  const size_t T = pot.T, L = pot.L;
  std::vector<double> alpha(T * L);
  std::vector<double> tmp(L);
  for (size_t y = 0; y < L; ++y) alpha[y] = pot.em(0, y);
  for (size_t t = 1; t < T; ++t) {
    for (size_t y = 0; y < L; ++y) {
      for (size_t yp = 0; yp < L; ++yp) tmp[yp] = alpha[(t - 1) * L + yp] + pot.tr(yp, y);
      alpha[t * L + y] = logsumexp(tmp) + pot.em(t, y);
    }
  }
  return alpha;
}

inline std::vector<double> backward_table(const Potentials& pot) {
  const size_t T = pot.T, L = pot.L;
  std::vector<double> beta(T * L, 0.0);
  std::vector<double> tmp(L);
  for (size_t t = T - 1; t-- > 0;) {
    for (size_t y = 0; y < L; ++y) {
      for (size_t yn = 0; yn < L; ++yn)
        tmp[yn] = pot.tr(y, yn) + pot.em(t + 1, yn) + beta[(t + 1) * L + yn];
      beta[t * L + y] = logsumexp(tmp);
    }
  }
  return beta;
}

}  // namespace detail

/// log Z via the forward recursion, numerically stabilized.
inline double log_partition(const Potentials& pot) {
  if (pot.T == 0) return 0.0;
  std::vector<double> alpha = detail::forward_table(pot);
  return detail::logsumexp(
      std::span<const double>(alpha.data() + (pot.T - 1) * pot.L, pot.L));
}

/// Posterior node marginals P(y_t = y | x) and edge marginals
/// P(y_t = a, y_{t+1} = b | x).
struct Marginals {
  size_t T = 0;
  size_t L = 0;
  double log_z = 0.0;
  std::vector<double> node;  // T x L
  std::vector<double> edge;  // (T-1) x L x L

  double node_at(size_t t, size_t y) const { return node[t * L + y]; }
  double edge_at(size_t t, size_t a, size_t b) const { return edge[(t * L + a) * L + b]; }
};

inline Marginals marginals(const Potentials& pot) {
  const size_t T = pot.T, L = pot.L;
  Marginals m;
  m.T = T;
  m.L = L;
  if (T == 0) return m;
  std::vector<double> alpha = detail::forward_table(pot);
  std::vector<double> beta = detail::backward_table(pot);
  m.log_z =
      detail::logsumexp(std::span<const double>(alpha.data() + (T - 1) * L, L));
  m.node.assign(T * L, 0.0);
  for (size_t t = 0; t < T; ++t)
    for (size_t y = 0; y < L; ++y)
      m.node[t * L + y] = std::exp(alpha[t * L + y] + beta[t * L + y] - m.log_z);
  if (T > 1) {
    m.edge.assign((T - 1) * L * L, 0.0);
    for (size_t t = 0; t + 1 < T; ++t)
      for (size_t a = 0; a < L; ++a)
        for (size_t b = 0; b < L; ++b)
          m.edge[(t * L + a) * L + b] =
              std::exp(alpha[t * L + a] + pot.tr(a, b) + pot.em(t + 1, b) +
                       beta[(t + 1) * L + b] - m.log_z);
  }
  return m;
}

/// MAP label path. Ties break toward the lower label index at each
/// backpointer decision.
inline std::vector<int> viterbi_indices(const Potentials& pot) {
  const size_t T = pot.T, L = pot.L;
  if (T == 0) return {};
  std::vector<double> delta(T * L);
  std::vector<int> back(T * L, 0);
  for (size_t y = 0; y < L; ++y) delta[y] = pot.em(0, y);
  for (size_t t = 1; t < T; ++t) {
    for (size_t y = 0; y < L; ++y) {
      double best = -std::numeric_limits<double>::infinity();
      int best_prev = 0;
      for (size_t yp = 0; yp < L; ++yp) {
        double cand = delta[(t - 1) * L + yp] + pot.tr(yp, y);
        if (cand > best) {
          best = cand;
          best_prev = static_cast<int>(yp);
        }
      }
      delta[t * L + y] = best + pot.em(t, y);
      back[t * L + y] = best_prev;
    }
  }
  size_t best_final = 0;
  double best = delta[(T - 1) * L];
  for (size_t y = 1; y < L; ++y) {
    if (delta[(T - 1) * L + y] > best) {
      best = delta[(T - 1) * L + y];
      best_final = y;
    }
  }
  std::vector<int> path(T);
  path[T - 1] = static_cast<int>(best_final);
  for (size_t t = T - 1; t > 0; --t) path[t - 1] = back[t * L + static_cast<size_t>(path[t])];
  return path;
}

inline std::vector<std::string> viterbi(const CrfModel& model,
                                        std::span<const SparseFeatureVector> sent_features) {
  std::vector<int> path = viterbi_indices(compute_potentials(sent_features, model));
  std::vector<std::string> out;
  out.reserve(path.size());
  for (int y : path) out.push_back(model.labels.names[static_cast<size_t>(y)]);
  return out;
}

/// One training sentence: per-token features and gold label strings.
struct LabeledSequence {
  std::vector<SparseFeatureVector> features;
  std::vector<std::string> labels;
};

struct TrainConfig {
  enum class Optimizer { lbfgs, gradient_descent };
  double l2_sigma = 1.0;  // penalty = sum w^2 / (2 sigma^2); +inf disables
  int max_iterations = 200;
  double convergence_tol = 1e-6;
  Optimizer optimizer = Optimizer::lbfgs;
  double learning_rate = 0.1;  // gradient_descent only
  int lbfgs_history = 10;
};

/// Regularized conditional log-likelihood over a frozen, indexed dataset.
/// Maximization convention. Built once, then evaluated at arbitrary weight
/// vectors (which is what both the trainer and the finite-difference tests
/// need).
class CrfObjective {
 public:
  CrfObjective(std::span<const LabeledSequence> data, const LabelAlphabet& labels,
               const FeatureAlphabet& features, double l2_sigma)
      : L_(labels.size()), F_(features.size()), sigma_(l2_sigma) {
    for (const LabeledSequence& seq : data) {
      if (seq.features.size() != seq.labels.size())
        fail(ErrorKind::length_mismatch, "features vs labels in training sentence");
      IndexedSeq idx;
      idx.gold.reserve(seq.labels.size());
      for (const std::string& lab : seq.labels) {
        int y = labels.find(lab);
        if (y < 0) fail(ErrorKind::unknown_gold_label, "'" + lab + "'");
        idx.gold.push_back(y);
      }
      idx.feats.resize(seq.features.size());
      for (size_t t = 0; t < seq.features.size(); ++t) {
        for (const FeatureValue& fv : seq.features[t]) {
          int f = features.find(fv.name);
          if (f >= 0) idx.feats[t].push_back({f, fv.value});
        }
      }
      data_.push_back(std::move(idx));
    }
  }

  size_t n_weights() const { return F_ * L_ + L_ * L_; }

  /// objective = sum_sent [score(gold) - log Z] - sum w^2 / (2 sigma^2);
  /// gradient = empirical counts - expected counts - w / sigma^2.
  double value_and_gradient(std::span<const double> w, std::vector<double>& grad) const {
    grad.assign(n_weights(), 0.0);
    const size_t L = L_;
    const size_t trans_base = F_ * L;
    double obj = 0.0;
    for (const IndexedSeq& seq : data_) {
      const size_t T = seq.gold.size();
      if (T == 0) continue;
      Potentials pot = make_potentials(T, L);
      for (size_t t = 0; t < T; ++t)
        for (const auto& [f, v] : seq.feats[t]) {
          const double* wrow = w.data() + static_cast<size_t>(f) * L;
          for (size_t y = 0; y < L; ++y) pot.em(t, y) += v * wrow[y];
        }
      for (size_t i = 0; i < L * L; ++i) pot.transition[i] = w[trans_base + i];

      Marginals m = marginals(pot);
      obj += score_path(pot, seq.gold) - m.log_z;

      for (size_t t = 0; t < T; ++t) {
        const size_t gy = static_cast<size_t>(seq.gold[t]);
        for (const auto& [f, v] : seq.feats[t]) {
          double* grow = grad.data() + static_cast<size_t>(f) * L;
          grow[gy] += v;
          const double* node = m.node.data() + t * L;
          for (size_t y = 0; y < L; ++y) grow[y] -= v * node[y];
        }
      }
      for (size_t t = 0; t + 1 < T; ++t) {
        grad[trans_base + static_cast<size_t>(seq.gold[t]) * L +
             static_cast<size_t>(seq.gold[t + 1])] += 1.0;
        const double* edge = m.edge.data() + t * L * L;
        for (size_t i = 0; i < L * L; ++i) grad[trans_base + i] -= edge[i];
      }
    }
    if (std::isfinite(sigma_)) {
      const double inv_s2 = 1.0 / (sigma_ * sigma_);
      for (size_t i = 0; i < n_weights(); ++i) {
        obj -= w[i] * w[i] * inv_s2 * 0.5;
        grad[i] -= w[i] * inv_s2;
      }
    }
    return obj;
  }

 private:
  struct IndexedSeq {
    std::vector<std::vector<std::pair<int, double>>> feats;
    std::vector<int> gold;
  };
  std::vector<IndexedSeq> data_;
  size_t L_;
  size_t F_;
  double sigma_;
};

/// Maximum-likelihood training. Alphabets are built from the data in first
/// appearance order; the run is deterministic, so identical inputs give
/// bit-identical weights.
inline CrfModel train(std::span<const LabeledSequence> data,
                      const std::string& template_fingerprint, const TrainConfig& config) {
  if (data.empty()) fail(ErrorKind::no_data, "no training sentences");
  CrfModel model;
  model.template_fingerprint = template_fingerprint;
  for (const LabeledSequence& seq : data) {
    for (const std::string& lab : seq.labels) model.labels.add(lab);
    for (const SparseFeatureVector& fv : seq.features)
      for (const FeatureValue& f : fv) model.features.add(f.name);
  }
  if (model.labels.size() == 0) fail(ErrorKind::no_data, "no labels in training data");

  CrfObjective objective(data, model.labels, model.features, config.l2_sigma);
  ObjectiveFn fn = [&objective](std::span<const double> w, std::vector<double>& grad) {
    return objective.value_and_gradient(w, grad);
  };
  OptimOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.convergence_tol = config.convergence_tol;
  opts.history = config.lbfgs_history;
  opts.learning_rate = config.learning_rate;

  std::vector<double> w0(objective.n_weights(), 0.0);
  OptimResult result = config.optimizer == TrainConfig::Optimizer::lbfgs
                           ? maximize_lbfgs(fn, std::move(w0), opts)
                           : maximize_gradient_descent(fn, std::move(w0), opts);
  model.weights = std::move(result.weights);

  model.metadata.push_back(
      {"optimizer", config.optimizer == TrainConfig::Optimizer::lbfgs ? "lbfgs" : "gradient_descent"});
  model.metadata.push_back({"l2_sigma", detail::format_double(config.l2_sigma)});
  model.metadata.push_back({"max_iterations", std::to_string(config.max_iterations)});
  model.metadata.push_back({"convergence_tol", detail::format_double(config.convergence_tol)});
  if (config.optimizer == TrainConfig::Optimizer::gradient_descent)
    model.metadata.push_back({"learning_rate", detail::format_double(config.learning_rate)});
  model.metadata.push_back({"iterations", std::to_string(result.iterations)});
  model.metadata.push_back({"converged", result.converged ? "1" : "0"});
  model.metadata.push_back({"final_objective", detail::format_double(result.objective)});
  model.metadata.push_back({"training_sentences", std::to_string(data.size())});
  return model;
}

// --- model file format -------------------------------------------------
//
// UTF-8 text, two sections:
//   [meta]     key=value lines: format, fingerprint, labels (tab-joined,
//              in order) plus training metadata
//   [weights]  featurename<TAB>label<TAB>weight        (emission)
//              TRANS<TAB>from<TAB>to<TAB>weight        (transition)
// Zero weights are omitted; weights print as shortest round-trip decimals.

inline void CrfModel::save(std::ostream& out) const {
  out << "[meta]\n";
  out << "format=nner-crf-1\n";
  out << "fingerprint=" << template_fingerprint << "\n";
  out << "labels=";
  for (size_t y = 0; y < labels.size(); ++y) {
    if (y) out << '\t';
    out << labels.names[y];
  }
  out << "\n";
  for (const auto& [k, v] : metadata) out << k << "=" << v << "\n";
  out << "[weights]\n";
  const size_t L = labels.size();
  for (size_t f = 0; f < features.size(); ++f) {
    for (size_t y = 0; y < L; ++y) {
      double w = weights[f * L + y];
      if (w == 0.0) continue;
      out << features.names[f] << '\t' << labels.names[y] << '\t'
          << detail::format_double(w) << "\n";
    }
  }
  const size_t base = features.size() * L;
  for (size_t a = 0; a < L; ++a) {
    for (size_t b = 0; b < L; ++b) {
      double w = weights[base + a * L + b];
      if (w == 0.0) continue;
      out << "TRANS\t" << labels.names[a] << '\t' << labels.names[b] << '\t'
          << detail::format_double(w) << "\n";
    }
  }
}

inline CrfModel CrfModel::load(std::istream& in) {
  CrfModel model;
  std::string line;
  if (!std::getline(in, line) || line != "[meta]")
    fail(ErrorKind::parse_error, "model file must start with [meta]");
  bool have_format = false;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    if (line == "[weights]") break;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::parse_error, "bad meta line '" + line + "'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "format") {
      if (value != "nner-crf-1")
        fail(ErrorKind::parse_error, "unsupported model format '" + value + "'");
      have_format = true;
    } else if (key == "fingerprint") {
      model.template_fingerprint = value;
    } else if (key == "labels") {
      labels = detail::split_on(value, '\t');
    } else {
      model.metadata.push_back({key, value});
    }
  }
  if (!have_format) fail(ErrorKind::parse_error, "missing format line");
  if (labels.empty()) fail(ErrorKind::parse_error, "missing labels line");
  for (const std::string& lab : labels) model.labels.add(lab);
  const size_t L = model.labels.size();

  struct Emission {
    int f, y;
    double w;
  };
  std::vector<Emission> emissions;
  std::vector<double> transitions(L * L, 0.0);
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = detail::split_on(line, '\t');
    if (fields.size() == 4 && fields[0] == "TRANS") {
      int a = model.labels.find(fields[1]);
      int b = model.labels.find(fields[2]);
      if (a < 0 || b < 0)
        fail(ErrorKind::parse_error, "unknown label in transition line " + std::to_string(line_no));
      transitions[static_cast<size_t>(a) * L + static_cast<size_t>(b)] =
          detail::parse_double(fields[3]);
    } else if (fields.size() == 3) {
      int y = model.labels.find(fields[1]);
      if (y < 0)
        fail(ErrorKind::parse_error, "unknown label in weight line " + std::to_string(line_no));
      int f = model.features.add(fields[0]);
      emissions.push_back({f, y, detail::parse_double(fields[2])});
    } else {
      fail(ErrorKind::parse_error, "bad weight line " + std::to_string(line_no));
    }
  }
  model.weights.assign(model.features.size() * L + L * L, 0.0);
  for (const Emission& e : emissions)
    model.weights[static_cast<size_t>(e.f) * L + static_cast<size_t>(e.y)] = e.w;
  std::copy(transitions.begin(), transitions.end(),
            model.weights.begin() + static_cast<std::ptrdiff_t>(model.features.size() * L));
  for (double w : model.weights)
    if (!std::isfinite(w)) fail(ErrorKind::parse_error, "non-finite weight in model file");
  return model;
}

}  // namespace nner
