#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>

#include "nner/crf.hpp"
#include "support/bruteforce.hpp"
#include "support/rng.hpp"

using namespace nner;
using nner::testing::Rng;

namespace {

CrfModel tiny_model(const std::vector<std::string>& labels,
                    const std::vector<std::string>& features) {
  CrfModel m;
  for (const auto& l : labels) m.labels.add(l);
  for (const auto& f : features) m.features.add(f);
  m.weights.assign(m.n_weights(), 0.0);
  m.template_fingerprint = "v1;test";
  return m;
}

// Random sparse dataset over a fixed tiny alphabet.
std::vector<LabeledSequence> random_dataset(Rng& rng, size_t n_sents, size_t T, size_t n_labels,
                                            size_t n_features) {
  std::vector<LabeledSequence> data;
  for (size_t s = 0; s < n_sents; ++s) {
    LabeledSequence seq;
    for (size_t t = 0; t < T; ++t) {
      SparseFeatureVector v;
      size_t k = 1 + rng.index(3);
      for (size_t j = 0; j < k; ++j)
        v.push_back({"f" + std::to_string(rng.index(n_features)), rng.uniform(-1.0, 1.0)});
      // de-duplicate names (random picks may collide)
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
      v.erase(std::unique(v.begin(), v.end(),
                          [](const auto& a, const auto& b) { return a.name == b.name; }),
              v.end());
      seq.features.push_back(std::move(v));
      seq.labels.push_back("L" + std::to_string(rng.index(n_labels)));
    }
    data.push_back(std::move(seq));
  }
  return data;
}

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("compute_potentials worked examples") {
  CrfModel m = tiny_model({"L0", "L1"}, {"a"});
  std::vector<SparseFeatureVector> feats = {{{"a", 1.0}}};

  Potentials pot = compute_potentials(feats, m);
  CHECK(pot.em(0, 0) == 0.0);
  CHECK(pot.em(0, 1) == 0.0);
  CHECK(pot.tr(0, 1) == 0.0);

  m.weights[0] = 2.0;  // w(a, L0)
  pot = compute_potentials(feats, m);
  CHECK(pot.em(0, 0) == 2.0);
  CHECK(pot.em(0, 1) == 0.0);

  m.weights[0] = 1.5;
  feats[0][0].value = 2.0;
  pot = compute_potentials(feats, m);
  CHECK(pot.em(0, 0) == 3.0);

  // unknown features are skipped
  feats[0].push_back({"unseen", 5.0});
  pot = compute_potentials(feats, m);
  CHECK(pot.em(0, 0) == 3.0);
}

TEST_CASE("log_partition analytic zero-weight value") {
  for (size_t T : {1u, 2u, 5u, 9u}) {
    for (size_t L : {1u, 2u, 4u, 7u}) {
      Potentials pot = make_potentials(T, L);
      double expect = static_cast<double>(T) * std::log(static_cast<double>(L));
      CHECK(std::fabs(log_partition(pot) - expect) < 1e-12);
    }
  }
}

TEST_CASE("log_partition brute-force agreement") {
  Rng rng(101);
  Potentials pot = nner::testing::random_potentials(rng, 2, 2);
  CHECK(std::fabs(log_partition(pot) - nner::testing::brute_log_partition(pot)) < 1e-10);

  for (int trial = 0; trial < 100; ++trial) {
    size_t T = 1 + rng.index(6);
    size_t L = 1 + rng.index(5);
    pot = nner::testing::random_potentials(rng, T, L);
    REQUIRE(std::fabs(log_partition(pot) - nner::testing::brute_log_partition(pot)) < 1e-10);
  }

  // T = 1: log-sum-exp of the single emission row
  pot = nner::testing::random_potentials(rng, 1, 4);
  double expect = nner::testing::brute_log_partition(pot);
  CHECK(std::fabs(log_partition(pot) - expect) < 1e-12);
}

TEST_CASE("marginals: uniform at zero potentials, brute force elsewhere") {
  Potentials zero = make_potentials(3, 4);
  Marginals m = marginals(zero);
  for (size_t t = 0; t < 3; ++t)
    for (size_t y = 0; y < 4; ++y) CHECK(std::fabs(m.node_at(t, y) - 0.25) < 1e-12);

  Rng rng(55);
  for (int trial = 0; trial < 60; ++trial) {
    size_t T = 1 + rng.index(5);
    size_t L = 1 + rng.index(4);
    Potentials pot = nner::testing::random_potentials(rng, T, L);
    Marginals got = marginals(pot);
    nner::testing::BruteMarginals want = nner::testing::brute_marginals(pot);
    for (size_t i = 0; i < want.node.size(); ++i)
      REQUIRE(std::fabs(got.node[i] - want.node[i]) < 1e-10);
    for (size_t i = 0; i < want.edge.size(); ++i)
      REQUIRE(std::fabs(got.edge[i] - want.edge[i]) < 1e-10);

    // node rows sum to one; edges marginalize onto nodes
    for (size_t t = 0; t < T; ++t) {
      double row = 0.0;
      for (size_t y = 0; y < L; ++y) row += got.node_at(t, y);
      REQUIRE(std::fabs(row - 1.0) < 1e-9);
    }
    for (size_t t = 0; t + 1 < T; ++t) {
      for (size_t a = 0; a < L; ++a) {
        double sum = 0.0;
        for (size_t b = 0; b < L; ++b) sum += got.edge_at(t, a, b);
        REQUIRE(std::fabs(sum - got.node_at(t, a)) < 1e-9);
      }
    }
  }
}

TEST_CASE("marginals at T=1 are a softmax of the emission row") {
  Rng rng(9);
  Potentials pot = nner::testing::random_potentials(rng, 1, 5);
  Marginals m = marginals(pot);
  double z = 0.0;
  for (size_t y = 0; y < 5; ++y) z += std::exp(pot.em(0, y));
  for (size_t y = 0; y < 5; ++y)
    CHECK(std::fabs(m.node_at(0, y) - std::exp(pot.em(0, y)) / z) < 1e-12);
}

TEST_CASE("gradient at zero weights is empirical minus uniform expectation") {
  // One sentence, one token, one binary feature, two labels.
  std::vector<LabeledSequence> data = {{{{{"f", 1.0}}}, {"L0"}}};
  LabelAlphabet labels;
  labels.add("L0");
  labels.add("L1");
  FeatureAlphabet features;
  features.add("f");
  CrfObjective obj(data, labels, features, std::numeric_limits<double>::infinity());
  std::vector<double> w(obj.n_weights(), 0.0), grad;
  obj.value_and_gradient(w, grad);
  CHECK(std::fabs(grad[0] - 0.5) < 1e-12);   // (f, L0): 1 - 0.5
  CHECK(std::fabs(grad[1] + 0.5) < 1e-12);   // (f, L1): 0 - 0.5
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(2718);
  for (int trial = 0; trial < 50; ++trial) {
    auto data = random_dataset(rng, 2, 3, 3, 5);
    LabelAlphabet labels;
    FeatureAlphabet features;
    for (const auto& seq : data) {
      for (const auto& l : seq.labels) labels.add(l);
      for (const auto& fv : seq.features)
        for (const auto& f : fv) features.add(f.name);
    }
    for (size_t y = 0; y < 3; ++y) labels.add("L" + std::to_string(y));

    double sigma = trial % 2 == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    CrfObjective obj(data, labels, features, sigma);
    std::vector<double> w(obj.n_weights());
    for (double& x : w) x = rng.uniform(-1.0, 1.0);

    std::vector<double> grad;
    obj.value_and_gradient(w, grad);

    const double h = 1e-5;
    std::vector<double> dummy;
    for (size_t k = 0; k < w.size(); ++k) {
      std::vector<double> wp = w, wm = w;
      wp[k] += h;
      wm[k] -= h;
      double fd = (obj.value_and_gradient(wp, dummy) - obj.value_and_gradient(wm, dummy)) /
                  (2.0 * h);
      REQUIRE(rel_err(fd, grad[k]) < 1e-6);
    }
  }
}

TEST_CASE("objective on an empty dataset is pure regularization") {
  LabelAlphabet labels;
  labels.add("L0");
  labels.add("L1");
  FeatureAlphabet features;
  features.add("f");
  CrfObjective obj({}, labels, features, 2.0);
  std::vector<double> w(obj.n_weights(), 0.5), grad;
  double val = obj.value_and_gradient(w, grad);
  double expect = -static_cast<double>(w.size()) * 0.25 / (2.0 * 4.0);
  CHECK(std::fabs(val - expect) < 1e-12);
  for (double g : grad) CHECK(std::fabs(g + 0.5 / 4.0) < 1e-12);
}

TEST_CASE("unknown gold label is rejected") {
  std::vector<LabeledSequence> data = {{{{{"f", 1.0}}}, {"L9"}}};
  LabelAlphabet labels;
  labels.add("L0");
  FeatureAlphabet features;
  features.add("f");
  try {
    CrfObjective obj(data, labels, features, 1.0);
    FAIL("expected UnknownGoldLabel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unknown_gold_label);
  }
}

namespace {

// Deterministic separable toy task: a token is B-PER iff the previous
// surface is "ông".
std::vector<LabeledSequence> toy_corpus(Rng& rng, size_t n) {
  const std::vector<std::string> fillers = {"đi", "về", "nhà", "hôm", "nay", "chợ"};
  const std::vector<std::string> names = {"An", "Bình", "Cường", "Dũng"};
  std::vector<LabeledSequence> data;
  for (size_t s = 0; s < n; ++s) {
    std::vector<std::string> surfaces;
    std::vector<std::string> labels;
    int len = rng.range(3, 7);
    for (int t = 0; t < len; ++t) {
      bool prev_ong = !surfaces.empty() && surfaces.back() == "ông";
      if (prev_ong) {
        surfaces.push_back(names[rng.index(names.size())]);
        labels.push_back("B-PER");
      } else if (rng.chance(0.3)) {
        surfaces.push_back("ông");
        labels.push_back("O");
      } else {
        surfaces.push_back(fillers[rng.index(fillers.size())]);
        labels.push_back("O");
      }
    }
    LabeledSequence seq;
    for (int t = 0; t < len; ++t) {
      SparseFeatureVector v;
      v.push_back({"w[0]=" + surfaces[static_cast<size_t>(t)], 1.0});
      v.push_back({"w[-1]=" + (t > 0 ? surfaces[static_cast<size_t>(t - 1)] : "<BOS>"), 1.0});
      seq.features.push_back(std::move(v));
    }
    seq.labels = labels;
    data.push_back(std::move(seq));
  }
  return data;
}

}  // namespace

TEST_CASE("training solves a separable toy task") {
  Rng rng(31337);
  auto train_data = toy_corpus(rng, 200);
  auto held_out = toy_corpus(rng, 50);

  TrainConfig cfg;
  cfg.max_iterations = 100;
  CrfModel model = train(train_data, "v1;toy", cfg);

  size_t correct = 0, total = 0;
  for (const auto& seq : held_out) {
    auto pred = viterbi(model, seq.features);
    for (size_t t = 0; t < pred.size(); ++t) {
      total += 1;
      if (pred[t] == seq.labels[t]) ++correct;
    }
  }
  CHECK(correct == total);

  // metadata echoes the run
  bool has_iter = false;
  for (const auto& [k, v] : model.metadata)
    if (k == "iterations") has_iter = true;
  CHECK(has_iter);
}

TEST_CASE("max_iterations=0 yields the zero model; training is deterministic") {
  Rng rng(77);
  auto data = random_dataset(rng, 4, 3, 2, 6);
  TrainConfig cfg;
  cfg.max_iterations = 0;
  CrfModel m0 = train(data, "v1;t", cfg);
  for (double w : m0.weights) CHECK(w == 0.0);

  cfg.max_iterations = 40;
  CrfModel a = train(data, "v1;t", cfg);
  CrfModel b = train(data, "v1;t", cfg);
  REQUIRE(a.weights.size() == b.weights.size());
  for (size_t i = 0; i < a.weights.size(); ++i) REQUIRE(a.weights[i] == b.weights[i]);
}

TEST_CASE("train rejects empty input") {
  try {
    train({}, "v1;t", {});
    FAIL("expected NoData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_data);
  }
}

TEST_CASE("viterbi ties break toward lower label indices") {
  Potentials zero = make_potentials(4, 3);
  std::vector<int> path = viterbi_indices(zero);
  for (int y : path) CHECK(y == 0);
}

TEST_CASE("viterbi equals exhaustive argmax") {
  Rng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    size_t T = 1 + rng.index(6);
    size_t L = 1 + rng.index(5);
    Potentials pot = nner::testing::random_potentials(rng, T, L);
    REQUIRE(viterbi_indices(pot) == nner::testing::brute_viterbi(pot));
  }
}

TEST_CASE("viterbi with dominant emissions and zero transitions") {
  Potentials pot = make_potentials(3, 3);
  pot.em(0, 2) = 10.0;
  pot.em(1, 0) = 10.0;
  pot.em(2, 1) = 10.0;
  CHECK(viterbi_indices(pot) == std::vector<int>{2, 0, 1});
}

TEST_CASE("path probabilities normalize and viterbi bounds hold") {
  Rng rng(808);
  for (int trial = 0; trial < 30; ++trial) {
    size_t T = 1 + rng.index(4);
    size_t L = 1 + rng.index(4);
    Potentials pot = nner::testing::random_potentials(rng, T, L);
    double log_z = log_partition(pot);

    double sum = 0.0;
    std::vector<int> path(T, 0);
    do {
      sum += std::exp(nner::testing::brute_path_score(pot, path) - log_z);
    } while (nner::testing::next_path(path, L));
    REQUIRE(std::fabs(sum - 1.0) < 1e-9);

    std::vector<int> best = viterbi_indices(pot);
    double best_score = score_path(pot, best);
    REQUIRE(best_score <= log_z + 1e-9);
    for (int k = 0; k < 20; ++k) {
      std::vector<int> sample(T);
      for (size_t t = 0; t < T; ++t) sample[t] = static_cast<int>(rng.index(L));
      REQUIRE(score_path(pot, sample) <= best_score + 1e-12);
    }
  }
}

TEST_CASE("gradient ascent increases the objective monotonically") {
  Rng rng(123);
  auto data = random_dataset(rng, 3, 3, 2, 4);
  LabelAlphabet labels;
  FeatureAlphabet features;
  for (const auto& seq : data) {
    for (const auto& l : seq.labels) labels.add(l);
    for (const auto& fv : seq.features)
      for (const auto& f : fv) features.add(f.name);
  }
  labels.add("L0");
  labels.add("L1");
  CrfObjective obj(data, labels, features, 1.0);
  ObjectiveFn fn = [&](std::span<const double> w, std::vector<double>& g) {
    return obj.value_and_gradient(w, g);
  };
  OptimOptions opts;
  opts.max_iterations = 50;
  opts.learning_rate = 0.01;
  opts.convergence_tol = 0.0;
  OptimResult r = maximize_gradient_descent(fn, std::vector<double>(obj.n_weights(), 0.0), opts);
  REQUIRE(r.trace.size() > 10);
  for (size_t i = 1; i < r.trace.size(); ++i) REQUIRE(r.trace[i] >= r.trace[i - 1] - 1e-12);
}

TEST_CASE("a diverging step surfaces as NonFiniteObjective") {
  // Concave objective -w^2; a fixed step > 1 makes gradient ascent diverge.
  ObjectiveFn fn = [](std::span<const double> w, std::vector<double>& g) {
    g.assign(1, -2.0 * w[0] * std::fabs(w[0]) * 1e4);
    return -w[0] * w[0] * std::fabs(w[0]) * 1e4;
  };
  OptimOptions opts;
  opts.max_iterations = 2000;
  opts.learning_rate = 10.0;
  opts.convergence_tol = 0.0;
  try {
    maximize_gradient_descent(fn, {1.0}, opts);
    FAIL("expected NonFiniteObjective");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::non_finite_objective);
  }
}

TEST_CASE("trained objective dominates the zero vector (concavity)") {
  Rng rng(321);
  auto data = random_dataset(rng, 5, 4, 3, 6);
  TrainConfig cfg;
  cfg.max_iterations = 60;
  CrfModel model = train(data, "v1;t", cfg);

  CrfObjective obj(data, model.labels, model.features, cfg.l2_sigma);
  std::vector<double> grad;
  double at_trained = obj.value_and_gradient(model.weights, grad);
  double at_zero = obj.value_and_gradient(std::vector<double>(model.weights.size(), 0.0), grad);
  CHECK(at_trained >= at_zero);
}

TEST_CASE("model serialization round trips predictions") {
  Rng rng(31337);
  auto data = toy_corpus(rng, 60);
  TrainConfig cfg;
  cfg.max_iterations = 50;
  CrfModel model = train(data, "v1;toy", cfg);

  std::stringstream buf;
  model.save(buf);
  CrfModel loaded = CrfModel::load(buf);
  CHECK(loaded.template_fingerprint == model.template_fingerprint);
  CHECK(loaded.labels.names == model.labels.names);

  auto probe = toy_corpus(rng, 20);
  for (const auto& seq : probe) {
    REQUIRE(viterbi(loaded, seq.features) == viterbi(model, seq.features));
  }
}

TEST_CASE("model loader rejects malformed files") {
  std::stringstream empty;
  CHECK_THROWS_AS(CrfModel::load(empty), Error);

  std::stringstream bad("[meta]\nformat=wrong-format\nlabels=O\n[weights]\n");
  CHECK_THROWS_AS(CrfModel::load(bad), Error);

  std::stringstream no_labels("[meta]\nformat=nner-crf-1\n[weights]\n");
  CHECK_THROWS_AS(CrfModel::load(no_labels), Error);

  std::stringstream bad_label("[meta]\nformat=nner-crf-1\nlabels=O\n[weights]\nf\tNOPE\t1.0\n");
  CHECK_THROWS_AS(CrfModel::load(bad_label), Error);

  std::stringstream bad_weight("[meta]\nformat=nner-crf-1\nlabels=O\n[weights]\nf\tO\txyz\n");
  CHECK_THROWS_AS(CrfModel::load(bad_weight), Error);
}
