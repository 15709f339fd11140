// tools/rwd.cpp

// Copyright 2026  The rwd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver for the rare-word demonstration toolkit.
//
// Every option is a key of one flat configuration shared by all
// subcommands. Keys may come from `--config FILE` (lines of `key = value`)
// and are overridden by `--key value` on the command line. Unknown keys are
// usage errors (exit 2); data errors exit 1. Failures print exactly one line,
// `error: <category>: <message>`, to stderr.
//
// Outputs are staged under temporary names and only renamed into place once
// the whole subcommand has succeeded.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rwd/corpus.hpp"
#include "rwd/embedding.hpp"
#include "rwd/error.hpp"
#include "rwd/metrics.hpp"
#include "rwd/prepender.hpp"
#include "rwd/retriever.hpp"
#include "rwd/splitter.hpp"
#include "rwd/synth.hpp"

namespace fs = std::filesystem;
using namespace rwd;

namespace {

// Raised for problems with how the tool was invoked rather than with data.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 1;

  SynthConfig synth;

  // Paths. Their meaning per subcommand is listed in the help text.
  std::string out_dir;
  std::string out;
  std::string manifest;
  std::string pool;
  std::string catalog;
  std::string pairs;
  std::string query_store;
  std::string candidate_store;
  std::string model;
  std::string results;
  std::string hyps;
  std::string asr_hyps;
  std::string align;
  std::string lemmas;
  std::string gold;

  std::size_t tst_size = 2500;
  std::string mode = "train";

  std::string pooling = "mean";
  bool train_pooler = false;
  std::size_t proj_dim = 0;
  std::size_t depth = 1;
  bool include_random_pairs = false;
  TrainConfig train;
  std::string optimizer = "adam";

  std::size_t k = 10;
  bool exclude_same_speaker = false;
  std::vector<std::size_t> k_values{1, 5, 10};

  std::string inspect_path;
};

const std::string &need(const std::string &value, const char *key) {
  if (value.empty()) throw UsageError(std::string("missing required key '") + key + "'");
  return value;
}

void need_file(const std::string &path) {
  if (!fs::is_regular_file(path)) throw IoError("cannot open '" + path + "'");
}

// All-or-nothing output promotion.
class Staging {
 public:
  void add(fs::path path, std::string bytes) {
    files_.emplace_back(std::move(path), std::move(bytes));
  }

  void commit() {
    std::vector<fs::path> temps;
    try {
      for (const auto &[path, bytes] : files_) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        fs::path tmp = path;
        tmp += ".partial";
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        temps.push_back(tmp);
        if (!os) throw IoError("cannot write '" + tmp.string() + "'");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.close();
        if (!os) throw IoError("cannot write '" + tmp.string() + "'");
      }
      for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(temps[i], files_[i].first);
    } catch (const fs::filesystem_error &e) {
      discard(temps);
      throw IoError(e.what());
    } catch (...) {
      discard(temps);
      throw;
    }
  }

 private:
  static void discard(const std::vector<fs::path> &temps) {
    std::error_code ec;
    for (const auto &t : temps) fs::remove(t, ec);
  }

  std::vector<std::pair<fs::path, std::string>> files_;
};

const std::string &store_key(const Utterance &u) {
  return u.embedding_ref.empty() ? u.id : u.embedding_ref;
}

// Store restricted to a corpus, with records renamed to utterance ids.
EmbeddingStore select_records(const EmbeddingStore &store, const Corpus &corpus) {
  EmbeddingStore out(store.dim());
  for (const auto &u : corpus) {
    const FrameMatrix &m = store.at(store_key(u));
    out.add(FrameMatrix(u.id, m.modality(), m.frames(), m.dim(), m.data()));
  }
  return out;
}

// Hypothesis files: TSV with header `id<TAB>hypothesis`.
std::map<std::string, std::string> read_hypotheses(const std::string &path) {
  const std::string text = read_file(path);
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != "id\thypothesis") throw ParseError("expected header 'id\\thypothesis'", 1);
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
    std::string id = unescape_field(fields[0]);
    if (!out.emplace(id, unescape_field(fields[1])).second)
      throw ParseError("duplicate id '" + id + "'", line_no);
  }
  return out;
}

std::vector<std::string> hyps_in_order(const std::map<std::string, std::string> &hyps,
                                       const Corpus &eval_set, const char *what) {
  std::vector<std::string> out;
  out.reserve(eval_set.size());
  for (const auto &u : eval_set) {
    auto it = hyps.find(u.id);
    if (it == hyps.end())
      throw ValidationError(std::string(what) + " missing for utterance '" + u.id + "'");
    out.push_back(it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------

int run_synth(const Options &o) {
  const fs::path dir = need(o.out_dir, "out_dir");
  SynthConfig cfg = o.synth;
  cfg.seed = o.seed;
  cfg.validate();

  Corpus corpus = gen_corpus(cfg);
  corpus.set_name("corpus");
  EmbeddingStore speech = gen_embeddings(corpus, cfg, Modality::kSpeech);
  EmbeddingStore text = gen_embeddings(corpus, cfg, Modality::kText);

  Staging s;
  s.add(dir / "corpus.tsv", format_manifest(corpus));
  s.add(dir / "speech.rdke", serialize_store(speech));
  s.add(dir / "text.rdke", serialize_store(text));
  s.add(dir / "align.jsonl", format_alignments(gen_alignments(corpus)));
  s.commit();
  std::cout << "synth: " << corpus.size() << " utterances, dim " << cfg.dim << " -> "
            << dir.string() << "\n";
  return 0;
}

int run_split(const Options &o) {
  need_file(need(o.manifest, "manifest"));
  const fs::path dir = need(o.out_dir, "out_dir");
  Corpus corpus = parse_manifest(o.manifest);
  PartitionOptions opts;
  opts.tst_size = o.tst_size;
  SplitBundle b = partition(corpus, o.seed, opts);

  auto violations = verify_splits(b, &corpus);
  if (!violations.empty()) {
    const auto &v = violations.front();
    throw ValidationError(std::to_string(violations.size()) + " split violations, first: " +
                          to_string(v.kind) + ": " + v.message);
  }

  Staging s;
  s.add(dir / "pool.tsv", format_manifest(b.pool));
  s.add(dir / "dev.tsv", format_manifest(b.dev));
  s.add(dir / "tst.tsv", format_manifest(b.tst));
  s.add(dir / "train_reduced.tsv", format_manifest(b.train_reduced));
  s.add(dir / "catalog.tsv", format_catalog(b.catalog));
  s.commit();
  std::cout << "split: pool " << b.pool.size() << ", dev " << b.dev.size() << ", tst "
            << b.tst.size() << ", train_reduced " << b.train_reduced.size() << ", rare words "
            << b.catalog.size() << "\n";
  return 0;
}

int run_prepend(const Options &o) {
  need_file(need(o.manifest, "manifest"));
  const std::string &out = need(o.out, "out");
  std::vector<PrependedPair> pairs;
  if (o.mode == "train") {
    Corpus train = parse_manifest(o.manifest);
    pairs = build_prepended_train_set(train, count_frequencies(train), o.seed);
  } else if (o.mode == "gold") {
    need_file(need(o.pool, "pool"));
    need_file(need(o.catalog, "catalog"));
    Corpus tst = parse_manifest(o.manifest);
    Corpus pool = parse_manifest(o.pool);
    GoldTestSet gold = build_gold_test_set(tst, pool, read_catalog(o.catalog));
    for (const auto &v : gold.violations)
      std::cerr << "warning: " << v.tst_utt << ": " << v.message << "\n";
    pairs = std::move(gold.pairs);
  } else {
    throw UsageError("mode must be 'train' or 'gold', got '" + o.mode + "'");
  }

  Staging s;
  s.add(out, format_pairs(pairs));
  s.commit();
  std::size_t linked = 0;
  for (const auto &p : pairs) linked += p.link_word.empty() ? 0 : 1;
  std::cout << "prepend: " << pairs.size() << " pairs (" << linked << " linked by a word)\n";
  return 0;
}

int run_train(const Options &o) {
  need_file(need(o.pairs, "pairs"));
  need_file(need(o.query_store, "query_store"));
  const std::string &cand_path = o.candidate_store.empty() ? o.query_store : o.candidate_store;
  need_file(cand_path);
  const std::string &out = need(o.out, "out");

  const auto records = read_pairs(o.pairs);
  EmbeddingStore qs = read_store(o.query_store);
  EmbeddingStore cs = cand_path == o.query_store ? qs : read_store(cand_path);
  if (qs.empty() || cs.empty()) throw ValidationError("embedding store is empty");
  if (qs.dim() != cs.dim())
    throw ValidationError("query and candidate stores differ in dim");

  std::vector<std::pair<std::string, std::string>> ids;
  for (const auto &r : records)
    if (o.include_random_pairs || !r.link_word.empty()) ids.emplace_back(r.main_id, r.example_id);
  const auto train_pairs = resolve_pairs(ids, qs, cs);

  ModelConfig mc;
  mc.input_dim = qs.dim();
  mc.proj_dim = o.proj_dim;
  mc.depth = o.depth;
  mc.query_modality = *qs.modality();
  mc.candidate_modality = *cs.modality();
  mc.query_pooling = mc.candidate_pooling = pooling_from_string(o.pooling);
  mc.train_pooler = o.train_pooler;
  mc.seed = o.seed;

  TrainConfig tc = o.train;
  tc.seed = o.seed;
  tc.optimizer = optimizer_from_string(o.optimizer);

  TrainResult r = train(init_model(mc), train_pairs, tc);

  Staging s;
  s.add(out, serialize_model(r.model));
  s.commit();
  std::cout << "train-retriever: " << train_pairs.size() << " pairs\n";
  for (std::size_t e = 0; e < r.loss_curve.size(); ++e)
    std::cout << "epoch " << e << " loss " << format_double(r.loss_curve[e]) << "\n";
  return 0;
}

int run_retrieve(const Options &o) {
  need_file(need(o.model, "model"));
  need_file(need(o.manifest, "manifest"));
  need_file(need(o.pool, "pool"));
  need_file(need(o.query_store, "query_store"));
  const std::string &cand_path = o.candidate_store.empty() ? o.query_store : o.candidate_store;
  need_file(cand_path);
  const std::string &out = need(o.out, "out");

  RetrieverModel model = read_model(o.model);
  Corpus queries = parse_manifest(o.manifest);
  Corpus pool = parse_manifest(o.pool);
  EmbeddingStore qs = read_store(o.query_store);
  EmbeddingStore cs = cand_path == o.query_store ? qs : read_store(cand_path);

  SpeakerMap speakers;
  for (const auto &u : pool) speakers[u.id] = u.speaker_id;
  const EncodedPool encoded = encode_pool(model, select_records(cs, pool));

  std::vector<RetrievalResult> results;
  results.reserve(queries.size());
  for (const auto &u : queries) {
    const FrameMatrix &m = qs.at(store_key(u));
    const auto vec = encode(model, m, Side::kQuery);
    std::optional<std::string> exclude;
    if (o.exclude_same_speaker) exclude = u.speaker_id;
    results.push_back(retrieve_topk(u.id, vec, encoded, o.k, exclude, speakers));
  }

  Staging s;
  s.add(out, format_results(results));
  s.commit();
  std::cout << "retrieve: " << results.size() << " queries over " << pool.size()
            << " candidates, k " << o.k << (o.exclude_same_speaker ? ", unseen speakers" : "")
            << "\n";
  return 0;
}

int run_evaluate(const Options &o) {
  need_file(need(o.manifest, "manifest"));
  need_file(need(o.catalog, "catalog"));
  const std::string &out = need(o.out, "out");
  for (const std::string *p : {&o.pool, &o.results, &o.hyps, &o.asr_hyps, &o.align, &o.lemmas,
                               &o.gold})
    if (!p->empty()) need_file(*p);
  if ((!o.results.empty() || !o.gold.empty()) && o.pool.empty())
    throw UsageError("key 'pool' is required with 'results' or 'gold'");

  Corpus eval_set = parse_manifest(o.manifest);
  RareWordCatalog catalog = read_catalog(o.catalog);
  std::optional<Corpus> pool;
  if (!o.pool.empty()) pool = parse_manifest(o.pool);
  AlignmentSidecar align;
  if (!o.align.empty()) align = read_alignments(o.align);
  std::optional<LemmaSidecar> lemmas;
  if (!o.lemmas.empty()) lemmas = read_lemmas(o.lemmas);
  const LemmaSidecar *lemma_ptr = lemmas ? &*lemmas : nullptr;

  EvalReport report;
  std::vector<std::string> warnings;
  const auto by_utt = words_by_devtst_utt(catalog);
  for (const auto &u : eval_set) report.n_rare_words += by_utt.count(u.id);

  if (!o.results.empty()) {
    const auto results = read_results(o.results);
    report.n_queries = results.size();
    report.retrieval_topk_pct = retrieval_topk_accuracy(results, catalog, *pool, o.k_values);
    SpeakerMap speakers;
    for (const auto &u : eval_set) speakers[u.id] = u.speaker_id;
    for (const auto &u : *pool) speakers[u.id] = u.speaker_id;
    report.same_speaker_pct = same_speaker_proportion(results, speakers);
  }

  if (!o.hyps.empty()) {
    const auto hyps = read_hypotheses(o.hyps);
    std::vector<std::string> refs;
    for (const auto &u : eval_set) refs.push_back(u.translation_raw);
    const auto ordered = hyps_in_order(hyps, eval_set, "hypothesis");
    report.bleu = bleu(ordered, refs);
    RareWordScore score = rare_word_accuracy(hyps, eval_set, catalog, align, lemma_ptr);
    report.rare_overall_pct = score.overall_pct;
    report.rare_zero_shot_pct = score.zero_shot_pct;
    report.rare_one_shot_pct = score.one_shot_pct;
    warnings.insert(warnings.end(), score.warnings.begin(), score.warnings.end());
  }

  if (!o.asr_hyps.empty()) {
    const auto asr = read_hypotheses(o.asr_hyps);
    std::vector<std::string> refs;
    for (const auto &u : eval_set) refs.push_back(u.transcript_raw);
    report.wer = wer(hyps_in_order(asr, eval_set, "ASR hypothesis"), refs);
  }

  if (!o.gold.empty()) {
    std::vector<PrependedPair> gold;
    for (const auto &r : read_pairs(o.gold)) {
      if (!eval_set.contains(r.main_id)) continue;
      gold.push_back({pool->at(r.example_id), eval_set.at(r.main_id), r.link_word, r.gold});
    }
    RareWordScore score = oracle_ceiling(eval_set, catalog, gold, align, lemma_ptr);
    report.ceiling_pct = score.overall_pct;
    warnings.insert(warnings.end(), score.warnings.begin(), score.warnings.end());
  }

  report.n_warnings = warnings.size();
  constexpr std::size_t kShown = 5;
  for (std::size_t i = 0; i < warnings.size() && i < kShown; ++i)
    std::cerr << "warning: " << warnings[i] << "\n";
  if (warnings.size() > kShown)
    std::cerr << "warning: " << warnings.size() - kShown << " more warnings\n";

  const std::string json = format_report(report);
  Staging s;
  s.add(out, json);
  s.commit();
  std::cout << json;
  return 0;
}

int run_inspect(const Options &o) {
  const std::string &path = need(o.inspect_path, "path");
  const std::string bytes = read_file(path);
  const std::string_view magic = std::string_view(bytes).substr(0, 4);
  if (magic == std::string_view(kStoreMagic, 4)) {
    EmbeddingStore store = deserialize_store(bytes);
    std::size_t frames = 0;
    for (const auto &m : store) frames += m.frames();
    std::cout << "format: RDKE store\n"
              << "version: " << kStoreVersion << "\n"
              << "dim: " << store.dim() << "\n"
              << "modality: " << (store.modality() ? to_string(*store.modality()) : "none")
              << "\n"
              << "records: " << store.size() << "\n"
              << "frames: " << frames << "\n";
  } else if (magic == std::string_view(kModelMagic, 4)) {
    RetrieverModel m = deserialize_model(bytes);
    std::cout << "format: RDKM model\n"
              << "version: " << kModelVersion << "\n"
              << "input_dim: " << m.input_dim() << "\n"
              << "output_dim: " << m.output_dim() << "\n"
              << "depth: " << m.query.layers.size() << "\n";
    for (Side side : {Side::kQuery, Side::kCandidate}) {
      const EncoderSide &s = m.side(side);
      std::cout << (side == Side::kQuery ? "query" : "candidate") << ": "
                << to_string(s.modality) << ", " << to_string(s.pooling)
                << (s.train_pooler ? " (trained)" : "") << "\n";
    }
    std::cout << "parameters: " << trainable_count(m) << "\n";
  } else {
    throw FormatError("unrecognized file type (expected RDKE or RDKM magic)", 0);
  }
  return 0;
}

void add_options(CLI::App &app, Options &o) {
  app.add_option("--seed", o.seed, "Seed for every randomized step")->capture_default_str();

  auto *g = "Synthetic corpus";
  SynthConfig &c = o.synth;
  app.add_option("--n_utterances", c.n_utterances)->group(g)->capture_default_str();
  app.add_option("--vocab_size", c.vocab_size)->group(g)->capture_default_str();
  app.add_option("--n_rare_words", c.n_rare_words)->group(g)->capture_default_str();
  app.add_option("--rare_frequency_mix", c.rare_frequency_mix)->group(g)->capture_default_str();
  app.add_option("--content_min_freq", c.content_min_freq)->group(g)->capture_default_str();
  app.add_option("--content_max_freq", c.content_max_freq)->group(g)->capture_default_str();
  app.add_option("--background_min_len", c.background_min_len)->group(g)->capture_default_str();
  app.add_option("--background_max_len", c.background_max_len)->group(g)->capture_default_str();
  app.add_option("--n_speakers", c.n_speakers)->group(g)->capture_default_str();
  app.add_option("--same_speaker_share", c.same_speaker_share)->group(g)->capture_default_str();
  app.add_option("--translation_variant_rate", c.translation_variant_rate)
      ->group(g)
      ->capture_default_str();
  app.add_option("--dim", c.dim)->group(g)->capture_default_str();
  app.add_option("--frames_per_token", c.frames_per_token)->group(g)->capture_default_str();
  app.add_option("--noise_sigma", c.noise_sigma)->group(g)->capture_default_str();
  app.add_option("--speaker_offset_sigma", c.speaker_offset_sigma)
      ->group(g)
      ->capture_default_str();

  g = "Paths";
  app.add_option("--out_dir", o.out_dir, "Output directory (synth, split)")->group(g);
  app.add_option("--out", o.out, "Output file (prepend, train-retriever, retrieve, evaluate)")
      ->group(g);
  app.add_option("--manifest", o.manifest,
                 "Input manifest: corpus (split), train or tst set (prepend), queries "
                 "(retrieve), evaluation set (evaluate)")
      ->group(g);
  app.add_option("--pool", o.pool, "Rare-word pool manifest")->group(g);
  app.add_option("--catalog", o.catalog, "Rare-word catalog TSV")->group(g);
  app.add_option("--pairs", o.pairs, "Training pairs TSV")->group(g);
  app.add_option("--query_store", o.query_store, "Query-side embedding store")->group(g);
  app.add_option("--candidate_store", o.candidate_store,
                 "Candidate-side embedding store (defaults to query_store)")
      ->group(g);
  app.add_option("--model", o.model, "Retriever checkpoint")->group(g);
  app.add_option("--results", o.results, "Retrieval results TSV")->group(g);
  app.add_option("--hyps", o.hyps, "Translation hypotheses TSV (id, hypothesis)")->group(g);
  app.add_option("--asr_hyps", o.asr_hyps, "ASR hypotheses TSV (id, hypothesis)")->group(g);
  app.add_option("--align", o.align, "Alignment sidecar JSONL")->group(g);
  app.add_option("--lemmas", o.lemmas, "Lemma sidecar TSV")->group(g);
  app.add_option("--gold", o.gold, "Gold example pairs TSV")->group(g);

  g = "Splitting and pairing";
  app.add_option("--tst_size", o.tst_size)->group(g)->capture_default_str();
  app.add_option("--mode", o.mode, "prepend mode: train or gold")
      ->group(g)
      ->capture_default_str();

  g = "Retriever";
  app.add_option("--pooling", o.pooling, "mean or attention")->group(g)->capture_default_str();
  app.add_flag("--train_pooler", o.train_pooler, "Train the attention query too")->group(g);
  app.add_option("--proj_dim", o.proj_dim, "Projection size, 0 keeps the input dim")
      ->group(g)
      ->capture_default_str();
  app.add_option("--depth", o.depth)->group(g)->capture_default_str();
  app.add_flag("--include_random_pairs", o.include_random_pairs,
               "Also train on pairs without a shared word")
      ->group(g);
  app.add_option("--batch_size", o.train.batch_size)->group(g)->capture_default_str();
  app.add_option("--learning_rate", o.train.learning_rate)->group(g)->capture_default_str();
  app.add_option("--epochs", o.train.epochs)->group(g)->capture_default_str();
  app.add_option("--optimizer", o.optimizer, "adam or sgd")->group(g)->capture_default_str();
  app.add_option("--beta1", o.train.beta1)->group(g)->capture_default_str();
  app.add_option("--beta2", o.train.beta2)->group(g)->capture_default_str();
  app.add_option("--epsilon", o.train.epsilon)->group(g)->capture_default_str();
  app.add_option("--k", o.k, "Candidates returned per query")->group(g)->capture_default_str();
  app.add_flag("--exclude_same_speaker", o.exclude_same_speaker,
               "Ignore candidates spoken by the query's speaker")
      ->group(g);
  app.add_option("--k_values", o.k_values, "Top-k cut-offs for evaluation")
      ->group(g)
      ->delimiter(',')
      ->capture_default_str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Example retrieval and demonstration toolkit for rare-word speech translation"};
  app.set_config("--config", "", "Flat `key = value` configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  add_options(app, o);

  std::map<std::string, int (*)(const Options &)> handlers = {
      {"synth", run_synth},
      {"split", run_split},
      {"prepend", run_prepend},
      {"train-retriever", run_train},
      {"retrieve", run_retrieve},
      {"evaluate", run_evaluate},
      {"inspect", run_inspect},
  };
  const std::map<std::string, std::string> help = {
      {"synth", "Generate a synthetic corpus, two embedding stores and alignments"},
      {"split", "Re-split a corpus into pool, dev, tst and train_reduced"},
      {"prepend", "Pair utterances with demonstration examples"},
      {"train-retriever", "Train the dual-encoder retriever"},
      {"retrieve", "Exact top-k example retrieval from the pool"},
      {"evaluate", "Compute metrics into a JSON report"},
      {"inspect", "Describe an embedding store or model checkpoint"},
  };
  for (const auto &[name, text] : help) {
    auto *sub = app.add_subcommand(name, text);
    if (name == "inspect") sub->add_option("path", o.inspect_path, "RDKE or RDKM file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return handlers.at(name)(o);
  } catch (const UsageError &e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}
