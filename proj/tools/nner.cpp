// nner: train, apply and evaluate nested named-entity recognizers built on
// linear-chain CRFs with a joint-tag scheme for two-level nesting.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nner/nner.hpp"

namespace fs = std::filesystem;
using namespace nner;

namespace {

struct FeatureFlags {
  int window = 2;
  bool no_word = false;
  bool no_lower = false;
  bool no_shape = false;
  std::string affix_lengths = "1,2,3,4";
  std::string cluster_prefixes = "2,4,6,8,10,12,16,20";
  bool no_full_bitstring = false;
  bool use_clusters = false;
  std::string clusters_path;
  std::string embeddings_path;
  int embedding_dim = 25;
  bool use_embeddings = false;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--window", window, "Context half-width (2 = window of 5)");
    cmd->add_flag("--no-word", no_word, "Disable word identity features");
    cmd->add_flag("--no-lower", no_lower, "Disable lowercase word features");
    cmd->add_flag("--no-shape", no_shape, "Disable word shape features");
    cmd->add_option("--affix-lengths", affix_lengths,
                    "Comma list of prefix/suffix lengths (empty disables)");
    cmd->add_option("--clusters", clusters_path, "Brown paths file (enables cluster features)");
    cmd->add_flag("--use-clusters", use_clusters,
                  "Enable cluster features (requires --clusters)");
    cmd->add_option("--cluster-prefixes", cluster_prefixes,
                    "Comma list of bit-string prefix lengths");
    cmd->add_flag("--no-full-bitstring", no_full_bitstring,
                  "Drop the whole-bit-string cluster feature");
    cmd->add_option("--embeddings", embeddings_path,
                    "Word vector text file (enables embedding features)");
    cmd->add_flag("--use-embeddings", use_embeddings,
                  "Enable embedding features (requires --embeddings)");
    cmd->add_option("--embedding-dim", embedding_dim, "Word vector dimension");
  }

  FeatureTemplate to_template() const {
    FeatureTemplate tpl;
    tpl.window = window;
    tpl.use_word = !no_word;
    tpl.use_lower = !no_lower;
    tpl.use_shape = !no_shape;
    tpl.affix_lengths = detail::parse_int_list(affix_lengths);
    tpl.cluster_prefix_lengths = detail::parse_int_list(cluster_prefixes);
    tpl.use_full_bitstring = !no_full_bitstring;
    tpl.use_clusters = use_clusters || !clusters_path.empty();
    if (use_embeddings || !embeddings_path.empty()) tpl.embedding_dim = embedding_dim;
    tpl.validate();
    return tpl;
  }
};

struct TrainFlags {
  double sigma = 1.0;
  int max_iter = 200;
  double tol = 1e-6;
  std::string optimizer = "lbfgs";
  double learning_rate = 0.1;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--sigma", sigma, "L2 sigma (penalty = sum w^2 / (2 sigma^2))");
    cmd->add_option("--max-iter", max_iter, "Maximum optimizer iterations");
    cmd->add_option("--tol", tol, "Relative objective-change stopping tolerance");
    cmd->add_option("--optimizer", optimizer, "lbfgs or gd")
        ->check(CLI::IsMember({"lbfgs", "gd"}));
    cmd->add_option("--learning-rate", learning_rate, "Step size for gd");
  }

  TrainConfig to_config() const {
    TrainConfig cfg;
    cfg.l2_sigma = sigma;
    cfg.max_iterations = max_iter;
    cfg.convergence_tol = tol;
    cfg.optimizer = optimizer == "gd" ? TrainConfig::Optimizer::gradient_descent
                                      : TrainConfig::Optimizer::lbfgs;
    cfg.learning_rate = learning_rate;
    return cfg;
  }
};

struct Lexicons {
  std::optional<ClusterLexicon> clusters;
  std::optional<EmbeddingTable> embeddings;

  const ClusterLexicon* clusters_ptr() const { return clusters ? &*clusters : nullptr; }
  const EmbeddingTable* embeddings_ptr() const { return embeddings ? &*embeddings : nullptr; }
};

Lexicons load_lexicons(const FeatureTemplate& tpl, const std::string& clusters_path,
                       const std::string& embeddings_path) {
  Lexicons lex;
  std::vector<std::string> warnings;
  if (tpl.use_clusters && !clusters_path.empty())
    lex.clusters = load_clusters(clusters_path, &warnings);
  if (tpl.embedding_dim && !embeddings_path.empty())
    lex.embeddings = load_embeddings(embeddings_path, *tpl.embedding_dim, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return lex;
}

std::vector<Sentence> all_sentences(const std::vector<Document>& docs) {
  std::vector<Sentence> out;
  for (const Document& d : docs)
    for (const Sentence& s : d.sentences) out.push_back(s);
  return out;
}

void write_drop_report(const std::string& path, const std::vector<DropRecord>& drops,
                       size_t level3_count) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io_error, "cannot write report file '" + path + "'");
  size_t boundary = 0, crossing = 0;
  for (const DropRecord& d : drops) {
    if (d.reason == DropReason::boundary_conflict) ++boundary;
    if (d.reason == DropReason::crosses_sentence) ++crossing;
  }
  out << "# entities dropped during conversion\n";
  for (const DropRecord& d : drops) {
    out << "doc=" << d.doc_id << "\tsentence=" << d.sentence_index
        << "\treason=" << to_string(d.reason) << "\ttype=" << to_string(d.span.type)
        << "\trange=[" << d.span.begin << "," << d.span.end << ")\n";
  }
  out << "# totals\tboundary_conflict=" << boundary << "\tcrosses_sentence=" << crossing
      << "\tlevel3_excluded=" << level3_count << "\n";
}

size_t append_level3_drops(const std::vector<Document>& docs, std::vector<DropRecord>& drops) {
  size_t count = 0;
  for (const Document& doc : docs) {
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      for (const EntitySpan& e : doc.sentences[s].entities) {
        if (e.level < 3) continue;
        ++count;
        drops.push_back({doc.id, s,
                         CharSpan{e.type, e.token_start, e.token_end, e.level},
                         DropReason::level3_excluded});
      }
    }
  }
  return count;
}

// Re-throws with the offending file named in the message.
template <typename Fn>
auto with_file_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + std::string(e.what()).substr(
                              std::string(error_kind_name(e.kind())).size() + 2));
  }
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& sent_seg,
                const std::string& segmenter, const std::string& report_path) {
  PipelineOptions opts;
  opts.sent_seg = sent_seg == "on";
  opts.segmenter = segmenter;
  std::vector<DropRecord> drops;
  LoadedCorpus corpus =
      with_file_context(in, [&] { return load_enamex_corpus(in, opts, &drops); });
  size_t level3 = append_level3_drops(corpus.docs, drops);

  std::ofstream f(out);
  if (!f) fail(ErrorKind::io_error, "cannot write '" + out + "'");
  write_conll(f, corpus.docs, ConllColumns::two_level);
  write_drop_report(report_path.empty() ? out + ".report" : report_path, drops, level3);

  size_t sentences = 0, entities = 0;
  for (const Document& d : corpus.docs) {
    sentences += d.sentences.size();
    for (const Sentence& s : d.sentences) entities += s.entities.size();
  }
  std::cout << "converted " << corpus.docs.size() << " document(s), " << sentences
            << " sentence(s), " << entities << " entit(ies); dropped "
            << (drops.size() - level3) << ", level-3 excluded " << level3 << "\n";
  return 0;
}

void write_resolved_config(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(fs::path(dir) / "config");
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

int cmd_train(const std::string& train_path, const std::string& model_out,
              const std::string& strategy_name, const FeatureFlags& ff, const TrainFlags& tf) {
  std::ifstream in(train_path);
  if (!in) fail(ErrorKind::io_error, "cannot open '" + train_path + "'");
  ConllCorpus corpus =
      with_file_context(train_path, [&] { return read_conll(in, path_stem(train_path)); });
  std::vector<Sentence> sentences = all_sentences(corpus.docs);

  FeatureTemplate tpl = ff.to_template();
  Lexicons lex = load_lexicons(tpl, ff.clusters_path, ff.embeddings_path);
  TrainConfig cfg = tf.to_config();
  Strategy strategy = strategy_from(strategy_name);

  size_t level3 = 0;
  NestedModel model = train_nested(sentences, strategy, tpl, cfg, lex.clusters_ptr(),
                                   lex.embeddings_ptr(), &level3);
  if (level3 > 0)
    std::cerr << "warning: " << level3 << " level-3 entit(ies) excluded from training\n";
  model.save(model_out);
  write_resolved_config(model_out, {{"strategy", strategy_name},
                                    {"template", tpl.fingerprint()},
                                    {"clusters", ff.clusters_path.empty() ? "-" : ff.clusters_path},
                                    {"embeddings", ff.embeddings_path.empty() ? "-" : ff.embeddings_path},
                                    {"sigma", std::to_string(tf.sigma)},
                                    {"max_iterations", std::to_string(tf.max_iter)},
                                    {"tol", std::to_string(tf.tol)},
                                    {"optimizer", tf.optimizer},
                                    {"training_file", train_path}});

  auto meta = [](const CrfModel& m, const char* key) -> std::string {
    for (const auto& [k, v] : m.metadata)
      if (k == key) return v;
    return "?";
  };
  auto describe = [&](const char* name, const std::optional<CrfModel>& m) {
    if (!m) return;
    std::cout << name << ": " << m->labels.size() << " labels, " << m->features.size()
              << " features, iterations=" << meta(*m, "iterations")
              << ", objective=" << meta(*m, "final_objective") << "\n";
  };
  describe("level1", model.level1);
  describe("level2", model.level2);
  describe("joint", model.joint);
  std::cout << "model written to " << model_out << "\n";
  return 0;
}

LoadedCorpus load_predict_input(const std::string& path, const std::string& input_format,
                                const std::string& sent_seg, const std::string& segmenter) {
  std::string content = read_file(path);
  std::string format = input_format;
  if (format == "auto") {
    bool looks_conll = content.find("#doc") != std::string::npos ||
                       content.find('\t') != std::string::npos;
    format = looks_conll ? "conll" : "text";
  }
  LoadedCorpus out;
  if (format == "conll") {
    std::istringstream in(content);
    ConllCorpus conll = read_conll(in, path_stem(path));
    out.docs = std::move(conll.docs);
    out.explicit_ids = conll.explicit_ids;
  } else {
    PipelineOptions opts;
    opts.sent_seg = sent_seg == "on";
    opts.segmenter = segmenter;
    EnamexCorpus raw = split_enamex_documents(content, path_stem(path));
    out.explicit_ids = raw.explicit_ids;
    for (const RawDocument& rd : raw.docs)
      out.docs.push_back(document_from_enamex(rd, opts, nullptr));
  }
  return out;
}

// Independently decoded levels can cross each other; nested markup cannot
// express that, so crossing level-2 spans are dropped before rendering.
size_t write_enamex_output(std::ostream& out, const std::vector<Document>& docs, bool wrap) {
  size_t dropped = 0;
  for (const Document& doc : docs) {
    if (wrap) out << "<doc id=\"" << doc.id << "\">\n";
    for (const Sentence& sent : doc.sentences) {
      std::vector<EntitySpan> level1, kept;
      for (const EntitySpan& e : sent.entities)
        if (e.level == 1) level1.push_back(e);
      for (const EntitySpan& e : sent.entities) {
        bool crossing = false;
        if (e.level == 2) {
          for (const EntitySpan& e1 : level1) {
            bool disjoint = e.token_end <= e1.token_start || e1.token_end <= e.token_start;
            bool outer = e.token_start <= e1.token_start && e1.token_end <= e.token_end &&
                         (e.token_start < e1.token_start || e1.token_end < e.token_end);
            bool inner = e1.token_start <= e.token_start && e.token_end <= e1.token_end &&
                         (e1.token_start < e.token_start || e.token_end < e1.token_end);
            if (!disjoint && !outer && !inner) crossing = true;
          }
        }
        if (crossing)
          ++dropped;
        else
          kept.push_back(e);
      }
      std::vector<CharSpan> spans;
      for (const EntitySpan& e : kept) {
        spans.push_back({e.type, sent.tokens[e.token_start].char_start,
                         sent.tokens[e.token_end - 1].char_end, e.level});
      }
      out << render_enamex(sent.raw_text, spans) << "\n";
    }
    if (wrap) out << "</doc>\n";
  }
  return dropped;
}

int cmd_predict(const std::string& model_dir, const std::string& input, const std::string& output,
                const std::string& out_format, const std::string& input_format,
                const std::string& sent_seg, const std::string& segmenter,
                const std::string& clusters_path, const std::string& embeddings_path) {
  NestedModel model = NestedModel::load(model_dir);
  FeatureTemplate tpl = FeatureTemplate::from_fingerprint(model.fingerprint());
  if (tpl.use_clusters && clusters_path.empty())
    fail(ErrorKind::missing_lexicon, "model uses cluster features; pass --clusters");
  if (tpl.embedding_dim && embeddings_path.empty())
    fail(ErrorKind::missing_lexicon, "model uses embedding features; pass --embeddings");
  Lexicons lex = load_lexicons(tpl, clusters_path, embeddings_path);

  LoadedCorpus corpus = load_predict_input(input, input_format, sent_seg, segmenter);
  for (Document& doc : corpus.docs) {
    for (Sentence& sent : doc.sentences) {
      std::vector<SparseFeatureVector> feats = extract_sentence_features(
          sent.tokens, tpl, lex.clusters_ptr(), lex.embeddings_ptr());
      auto [l1, l2] = predict_nested(model, feats, tpl.fingerprint());
      sent.entities = std::move(l1);
      sent.entities.insert(sent.entities.end(), l2.begin(), l2.end());
    }
  }

  std::ofstream out(output);
  if (!out) fail(ErrorKind::io_error, "cannot write '" + output + "'");
  if (out_format == "enamex") {
    size_t dropped =
        write_enamex_output(out, corpus.docs, corpus.explicit_ids || corpus.docs.size() > 1);
    if (dropped > 0)
      std::cerr << "warning: dropped " << dropped
                << " level-2 span(s) crossing level-1 spans (not expressible as nested markup)\n";
  } else {
    write_conll(out, corpus.docs, ConllColumns::two_level);
  }
  size_t sentences = 0;
  for (const Document& d : corpus.docs) sentences += d.sentences.size();
  std::cout << "predicted " << sentences << " sentence(s) -> " << output << "\n";
  return 0;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path, const std::string& mode,
             bool syllable, const std::string& out_path) {
  LoadedCorpus gold = load_documents_any(gold_path);
  LoadedCorpus pred = load_documents_any(pred_path);
  if (gold.explicit_ids && pred.explicit_ids && gold.docs.size() == pred.docs.size()) {
    for (size_t i = 0; i < gold.docs.size(); ++i)
      if (gold.docs[i].id != pred.docs[i].id)
        fail(ErrorKind::alignment_error, "document ids differ at position " + std::to_string(i) +
                                             ": '" + gold.docs[i].id + "' vs '" +
                                             pred.docs[i].id + "'");
  }
  EvalReport report = evaluate_corpus(gold.docs, pred.docs, eval_mode_from(mode), syllable);
  std::string text = format_report(report);
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) fail(ErrorKind::io_error, "cannot write '" + out_path + "'");
    out << text;
  }
  return 0;
}

int cmd_cluster(const std::string& corpus_path, const std::string& out_path, int m,
                int64_t min_count, bool lowercase) {
  std::ifstream in(corpus_path);
  if (!in) fail(ErrorKind::io_error, "cannot open '" + corpus_path + "'");
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    if (lowercase) line = utf8_to_lower(line);
    std::vector<Token> toks = detail::whitespace_tokens(line);
    if (toks.empty()) continue;
    std::vector<std::string> words;
    words.reserve(toks.size());
    for (Token& t : toks) words.push_back(std::move(t.surface));
    sentences.push_back(std::move(words));
  }
  CorpusCounts counts = collect_counts(sentences, min_count);
  ClusterTree tree = brown_cluster(counts, m);
  std::ofstream out(out_path);
  if (!out) fail(ErrorKind::io_error, "cannot write '" + out_path + "'");
  std::ostringstream header;
  header << "brown m=" << m << " min_count=" << min_count
         << " lowercase=" << (lowercase ? "on" : "off");
  write_paths(out, tree, counts, header.str());
  std::cout << "clustered " << counts.vocab.size() << " word(s), " << tree.merge_history.size()
            << " merge(s) -> " << out_path << "\n";
  return 0;
}

int cmd_runs_matrix(const std::string& train_path, const std::string& test_path,
                    const std::string& out_dir, const FeatureFlags& ff, const TrainFlags& tf,
                    const std::string& segmenter, bool syllable) {
  fs::create_directories(out_dir);
  struct Cell {
    const char* strategy;
    bool seg;
  };
  // Mirrors the six-run grid: hybrid/joint/separated x sentence segmentation.
  const Cell cells[] = {{"hybrid", true},  {"hybrid", false},    {"joint", true},
                        {"joint", false},  {"separated", true},  {"separated", false}};
  int run = 0;
  for (const Cell& cell : cells) {
    ++run;
    std::string seg = cell.seg ? "on" : "off";
    std::string base = (fs::path(out_dir) / ("run" + std::to_string(run))).string();
    std::string train_conll = base + "-train.conll";
    std::string test_conll = base + "-test.conll";
    std::string model_dir = base + "-model";
    std::string pred_conll = base + "-pred.conll";
    std::string report = base + "-" + cell.strategy + "-seg" + seg + ".report.txt";

    cmd_convert(train_path, train_conll, seg, segmenter, train_conll + ".report");
    cmd_convert(test_path, test_conll, seg, segmenter, test_conll + ".report");
    cmd_train(train_conll, model_dir, cell.strategy, ff, tf);
    cmd_predict(model_dir, test_conll, pred_conll, "conll", "conll", seg, segmenter,
                ff.clusters_path, ff.embeddings_path);
    cmd_eval(test_conll, pred_conll, "all_levels", syllable, report);
    std::cout << "run-" << run << " " << cell.strategy << " seg=" << seg << " -> " << report
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nested named-entity recognition toolkit"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand("convert", "ENAMEX file -> two-level CoNLL columns");
  std::string c_in, c_out, c_seg = "on", c_segmenter = "presegmented", c_report;
  convert->add_option("input", c_in, "ENAMEX input file")->required();
  convert->add_option("output", c_out, "CoNLL output file")->required();
  convert->add_option("--sent-seg", c_seg, "Sentence segmentation on|off")
      ->check(CLI::IsMember({"on", "off"}));
  convert->add_option("--segmenter", c_segmenter, "whitespace or presegmented");
  convert->add_option("--report", c_report, "Sidecar drop-report path (default: output + .report)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a nested NER model from CoNLL data");
  std::string t_in, t_out, t_strategy = "joint";
  FeatureFlags t_ff;
  TrainFlags t_tf;
  train_cmd->add_option("input", t_in, "Two-level CoNLL training file")->required();
  train_cmd->add_option("--model-out", t_out, "Output model directory")->required();
  train_cmd->add_option("--strategy", t_strategy, "separated|joint|hybrid")
      ->check(CLI::IsMember({"separated", "joint", "hybrid"}));
  t_ff.add_options(train_cmd);
  t_tf.add_options(train_cmd);
  train_cmd->set_config("--config", "", "Key=value config file (flags win)");

  // predict
  auto* predict = app.add_subcommand("predict", "Tag new text or CoNLL tokens");
  std::string p_model, p_in, p_out, p_format = "conll", p_informat = "auto";
  std::string p_seg = "on", p_segmenter = "presegmented", p_clusters, p_embeddings;
  predict->add_option("model", p_model, "Model directory")->required();
  predict->add_option("input", p_in, "Input file (text, ENAMEX or CoNLL)")->required();
  predict->add_option("output", p_out, "Output file")->required();
  predict->add_option("--format", p_format, "Output format conll|enamex")
      ->check(CLI::IsMember({"conll", "enamex"}));
  predict->add_option("--input-format", p_informat, "auto|text|conll")
      ->check(CLI::IsMember({"auto", "text", "conll"}));
  predict->add_option("--sent-seg", p_seg, "Sentence segmentation for text input on|off")
      ->check(CLI::IsMember({"on", "off"}));
  predict->add_option("--segmenter", p_segmenter, "whitespace or presegmented");
  predict->add_option("--clusters", p_clusters, "Brown paths file, if the model needs it");
  predict->add_option("--embeddings", p_embeddings, "Embedding file, if the model needs it");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold");
  std::string e_gold, e_pred, e_mode = "all_levels", e_out;
  bool e_syllable = false;
  eval_cmd->add_option("gold", e_gold, "Gold file (ENAMEX or CoNLL)")->required();
  eval_cmd->add_option("pred", e_pred, "Prediction file (ENAMEX or CoNLL)")->required();
  eval_cmd->add_option("--mode", e_mode, "level1|level2|all_levels")
      ->check(CLI::IsMember({"level1", "level2", "all_levels", "all"}));
  eval_cmd->add_flag("--syllable", e_syllable, "Re-project spans onto syllables before scoring");
  eval_cmd->add_option("--out", e_out, "Also write the report to this path");

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "Brown-cluster a tokenized text corpus");
  std::string k_in, k_out;
  int k_m = 64;
  int64_t k_min = 1;
  bool k_lower = false;
  cluster_cmd->add_option("input", k_in, "Corpus file, one tokenized sentence per line")->required();
  cluster_cmd->add_option("output", k_out, "Paths file to write")->required();
  cluster_cmd->add_option("-m,--clusters", k_m, "Cluster window size");
  cluster_cmd->add_option("--min-count", k_min, "Fold rarer words into <UNK>");
  cluster_cmd->add_flag("--lowercase", k_lower, "Lowercase the corpus first");

  // runs-matrix
  auto* runs = app.add_subcommand(
      "runs-matrix", "Run {separated,joint,hybrid} x {sent-seg on,off} end to end");
  std::string r_train, r_test, r_out, r_segmenter = "presegmented";
  bool r_syllable = false;
  FeatureFlags r_ff;
  TrainFlags r_tf;
  runs->add_option("train", r_train, "ENAMEX training file")->required();
  runs->add_option("test", r_test, "ENAMEX test file")->required();
  runs->add_option("--out", r_out, "Output directory")->required();
  runs->add_option("--segmenter", r_segmenter, "whitespace or presegmented");
  runs->add_flag("--syllable", r_syllable, "Syllable-level evaluation");
  r_ff.add_options(runs);
  r_tf.add_options(runs);

  try {
    app.parse(argc, argv);
    if (convert->parsed())
      return cmd_convert(c_in, c_out, c_seg, c_segmenter, c_report);
    if (train_cmd->parsed()) return cmd_train(t_in, t_out, t_strategy, t_ff, t_tf);
    if (predict->parsed())
      return cmd_predict(p_model, p_in, p_out, p_format, p_informat, p_seg, p_segmenter,
                         p_clusters, p_embeddings);
    if (eval_cmd->parsed()) return cmd_eval(e_gold, e_pred, e_mode, e_syllable, e_out);
    if (cluster_cmd->parsed()) return cmd_cluster(k_in, k_out, k_m, k_min, k_lower);
    if (runs->parsed())
      return cmd_runs_matrix(r_train, r_test, r_out, r_ff, r_tf, r_segmenter, r_syllable);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::non_finite_objective ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
