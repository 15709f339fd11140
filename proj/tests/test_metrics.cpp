// tests/test_metrics.cpp

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

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "rwd/error.hpp"
#include "rwd/metrics.hpp"
#include "rwd/retriever.hpp"
#include "rwd/splitter.hpp"
#include "rwd/synth.hpp"
#include "test_util.hpp"

using namespace rwd;
using rwd::testing::TempDir;

namespace {

std::vector<std::string> words(std::initializer_list<const char *> ws) {
  return {ws.begin(), ws.end()};
}

// Plain recursive Levenshtein with memoization, independent of the DP rows.
std::size_t lev_oracle(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min({best, go(i + 1, j) + 1, go(i, j + 1) + 1});
    return memo[key] = best;
  };
  return go(0, 0);
}

}  // namespace

TEST_CASE("bleu_tokenize splits punctuation but not numbers") {
  CHECK(bleu_tokenize("Hello, world! 3.14 1,000 a.b") ==
        words({"Hello", ",", "world", "!", "3.14", "1,000", "a", ".", "b"}));
  CHECK(bleu_tokenize("  ") .empty());
  CHECK(bleu_tokenize("end.") == words({"end", "."}));
}

TEST_CASE("BLEU identities") {
  const std::vector<std::string> x = {"Das ist ein Test.", "Noch ein Satz, bitte!",
                                      "kurz und gut"};
  CHECK(bleu(x, x) == 100.0);
  const std::vector<std::string> h = {"zzz yyy"};
  const std::vector<std::string> r = {"a b c d e"};
  CHECK(bleu(h, r) < 1.0);
  CHECK(bleu(std::vector<std::string>{""}, r) == 0.0);
  CHECK_THROWS_AS(bleu(h, x), ValidationError);
  CHECK_THROWS_AS(bleu(std::vector<std::string>{}, std::vector<std::string>{}), ValidationError);
}

TEST_CASE("BLEU matches the hand-computed fixture") {
  const auto s = bleu_stats(fixtures::kBleuHyps, fixtures::kBleuRefs);
  CHECK(s.matches == std::array<std::size_t, 4>{10, 6, 4, 3});
  CHECK(s.totals == std::array<std::size_t, 4>{11, 8, 5, 3});
  CHECK(s.hyp_len == 11);
  CHECK(s.ref_len == 13);
  CHECK(std::abs(bleu(fixtures::kBleuHyps, fixtures::kBleuRefs) - fixtures::kBleuExpected) <=
        1e-4);
}

TEST_CASE("BLEU smooths zero-match orders exponentially") {
  // One hypothesis "a b c x" against "a b c d": matches 3/4 2/3 1/2 0/1.
  // The 4-gram precision becomes 1 / (2 * 1).
  const std::vector<std::string> h = {"a b c x"}, r = {"a b c d"};
  const double want = 100.0 * std::exp((std::log(0.75) + std::log(2.0 / 3) + std::log(0.5) +
                                        std::log(0.5)) / 4);
  CHECK(bleu(h, r) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("BLEU is invariant to consistent reordering") {
  std::vector<std::string> h = fixtures::kBleuHyps, r = fixtures::kBleuRefs;
  const double base = bleu(h, r);
  std::rotate(h.begin(), h.begin() + 1, h.end());
  std::rotate(r.begin(), r.begin() + 1, r.end());
  CHECK(bleu(h, r) == base);
}

TEST_CASE("WER examples") {
  const std::vector<std::string> x = {"a b c", "Hello, World"};
  CHECK(wer(x, x) == 0.0);
  CHECK(wer(std::vector<std::string>{"a x c"}, std::vector<std::string>{"a b c"}) ==
        doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(wer(std::vector<std::string>{""}, std::vector<std::string>{"one two three four five"}) ==
        1.0);
  // Normalized tokens: case and edge punctuation do not count as errors.
  CHECK(wer(std::vector<std::string>{"hello world"}, std::vector<std::string>{"Hello, World!"}) ==
        0.0);
  CHECK_THROWS_AS(wer(std::vector<std::string>{"a"}, std::vector<std::string>{"..."}),
                  ValidationError);
  CHECK_THROWS_AS(wer(x, std::vector<std::string>{"a"}), ValidationError);
}

TEST_CASE("edit_distance equals a recursive oracle") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> len(0, 7), w(0, 3);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> a, b;
    for (int n = len(rng); n > 0; --n) a.push_back(std::string(1, static_cast<char>('a' + w(rng))));
    for (int n = len(rng); n > 0; --n) b.push_back(std::string(1, static_cast<char>('a' + w(rng))));
    CHECK(edit_distance(a, b) == lev_oracle(a, b));
  }
}

TEST_CASE("rare-word accuracy on the hand fixture") {
  const auto f = fixtures::rare_word_fixture();
  const auto s = rare_word_accuracy(f.hyps, f.eval_set, f.catalog, f.align, &f.lemmas);
  CHECK(s.overall_pct == 50.0);
  CHECK(s.zero_shot_pct == 100.0);
  CHECK(s.one_shot_pct == 0.0);
  CHECK(s.n_words == 2);
  CHECK(s.warnings.empty());
}

TEST_CASE("rare-word accuracy edge cases") {
  const auto f = fixtures::rare_word_fixture();
  SUBCASE("references as hypotheses score 100") {
    std::map<std::string, std::string> refs;
    for (const auto &u : f.eval_set) refs[u.id] = u.translation_raw;
    CHECK(rare_word_accuracy(refs, f.eval_set, f.catalog, f.align, &f.lemmas).overall_pct ==
          100.0);
  }
  SUBCASE("empty hypotheses score 0") {
    std::map<std::string, std::string> empty = {{"t1", ""}, {"t2", ""}};
    CHECK(rare_word_accuracy(empty, f.eval_set, f.catalog, f.align, &f.lemmas).overall_pct ==
          0.0);
  }
  SUBCASE("without lemmas the surface forms must match") {
    const auto s = rare_word_accuracy(f.hyps, f.eval_set, f.catalog, f.align, nullptr);
    CHECK(s.overall_pct == 0.0);
    CHECK(s.warnings.empty());
  }
  SUBCASE("missing lemma falls back to identity with a warning") {
    LemmaSidecar partial = f.lemmas;
    partial.erase("fahrrad");
    const auto s = rare_word_accuracy(f.hyps, f.eval_set, f.catalog, f.align, &partial);
    CHECK(s.overall_pct == 50.0);
    CHECK(s.warnings.size() == 1);
  }
  SUBCASE("missing alignment matches the source surface with a warning") {
    AlignmentSidecar partial = f.align;
    partial.erase("t2");
    auto hyps = f.hyps;
    hyps["t2"] = "the bicycle";
    const auto s = rare_word_accuracy(hyps, f.eval_set, f.catalog, partial, &f.lemmas);
    CHECK(s.overall_pct == 100.0);
    CHECK(s.warnings.size() >= 1);
  }
  SUBCASE("a word without aligned target is left out") {
    AlignmentSidecar partial = f.align;
    partial["t2"] = {{0, {0}}};
    const auto s = rare_word_accuracy(f.hyps, f.eval_set, f.catalog, partial, &f.lemmas);
    CHECK(s.unaligned == 1);
    CHECK(s.n_words == 1);
    CHECK(s.overall_pct == 100.0);
  }
  SUBCASE("alignment past the reference is an error") {
    AlignmentSidecar bad = f.align;
    bad["t1"] = {{1, {9}}};
    CHECK_THROWS_AS(rare_word_accuracy(f.hyps, f.eval_set, f.catalog, bad, &f.lemmas),
                    ValidationError);
  }
}

TEST_CASE("overall accuracy is the count-weighted mean of the shot classes") {
  SynthConfig cfg;
  cfg.n_utterances = 2000;
  cfg.n_rare_words = 150;
  const Corpus c = gen_corpus(cfg);
  const SplitBundle b = partition(c, 3, {.tst_size = 200});
  const auto align = gen_alignments(c);
  std::mt19937_64 rng(1);
  std::map<std::string, std::string> hyps;
  for (const auto &u : b.tst)
    hyps[u.id] = std::bernoulli_distribution(0.5)(rng) ? u.translation_raw : "nichts";
  const auto s = rare_word_accuracy(hyps, b.tst, b.catalog, align, nullptr);
  REQUIRE(s.n_zero > 0);
  REQUIRE(s.n_one > 0);
  const double weighted = (s.zero_shot_pct * s.n_zero + s.one_shot_pct * s.n_one) /
                          static_cast<double>(s.n_zero + s.n_one);
  CHECK(s.overall_pct == doctest::Approx(weighted).epsilon(1e-12));
  CHECK(s.n_words == b.tst.size());
}

TEST_CASE("oracle ceiling counts") {
  SUBCASE("845 of 2500") {
    const auto f = fixtures::ceiling_fixture(2500, 845);
    const auto s = oracle_ceiling(f.eval_set, f.catalog, f.gold, f.align, nullptr);
    CHECK(s.matched == 845);
    CHECK(std::abs(s.overall_pct - 33.8) <= 0.05);
  }
  SUBCASE("4 of 10") {
    const auto f = fixtures::ceiling_fixture(10, 4);
    CHECK(oracle_ceiling(f.eval_set, f.catalog, f.gold, f.align, nullptr).overall_pct == 40.0);
  }
  SUBCASE("all matching") {
    const auto f = fixtures::ceiling_fixture(10, 10);
    CHECK(oracle_ceiling(f.eval_set, f.catalog, f.gold, f.align, nullptr).overall_pct == 100.0);
  }
}

TEST_CASE("copying gold examples scores exactly the ceiling") {
  SynthConfig cfg;
  cfg.n_utterances = 2000;
  cfg.n_rare_words = 150;
  cfg.translation_variant_rate = 0.4;
  const Corpus c = gen_corpus(cfg);
  const SplitBundle b = partition(c, 3, {.tst_size = 200});
  const auto align = gen_alignments(c);
  const auto gold = build_gold_test_set(b.tst, b.pool, b.catalog).pairs;
  std::map<std::string, std::string> copied;
  for (const auto &p : gold) copied[p.main.id] = p.example.translation_raw;
  const double acc = rare_word_accuracy(copied, b.tst, b.catalog, align, nullptr).overall_pct;
  const double ceil = oracle_ceiling(b.tst, b.catalog, gold, align, nullptr).overall_pct;
  CHECK(acc <= ceil);
  CHECK(acc == ceil);
  CHECK(ceil < 100.0);
}

TEST_CASE("retrieval top-k accuracy") {
  RareWordCatalog catalog;
  catalog["w"] = {ShotClass::kZero, "p7", "q", std::nullopt};
  std::vector<Utterance> pool;
  for (int i = 1; i <= 10; ++i)
    pool.push_back(rwd::testing::utt("p" + std::to_string(i), i == 7 ? "the w" : "other"));
  const Corpus candidates("pool", pool);
  RetrievalResult r{"q", {}};
  for (int i = 1; i <= 10; ++i) r.hits.push_back({"p" + std::to_string(i), 10.0 - i});
  const std::vector<std::size_t> ks{1, 5, 10};
  auto acc = retrieval_topk_accuracy(std::vector<RetrievalResult>{r}, catalog, candidates, ks);
  CHECK(acc[1] == 0.0);
  CHECK(acc[5] == 0.0);
  CHECK(acc[10] == 100.0);

  std::swap(r.hits[0], r.hits[6]);
  acc = retrieval_topk_accuracy(std::vector<RetrievalResult>{r}, catalog, candidates, ks);
  CHECK(acc[1] == 100.0);
  CHECK(acc[10] == 100.0);

  const std::vector<std::size_t> deep{11};
  CHECK_THROWS_AS(
      retrieval_topk_accuracy(std::vector<RetrievalResult>{r}, catalog, candidates, deep),
      ValidationError);
  RetrievalResult stray{"nobody", r.hits};
  CHECK_THROWS_AS(
      retrieval_topk_accuracy(std::vector<RetrievalResult>{stray}, catalog, candidates, ks),
      ValidationError);
}

TEST_CASE("top-k accuracy on a 200-query run equals a containment oracle") {
  SynthConfig cfg;
  cfg.n_utterances = 3000;
  cfg.n_rare_words = 200;
  const Corpus c = gen_corpus(cfg);
  const SplitBundle b = partition(c, 1, {.tst_size = 200});
  const auto speech = gen_embeddings(c, cfg, Modality::kSpeech);
  ModelConfig mc;
  mc.input_dim = cfg.dim;
  const auto model = init_model(mc);
  EmbeddingStore pool_store(cfg.dim);
  for (const auto &u : b.pool) pool_store.add(speech.at(u.id));
  const auto encoded = encode_pool(model, pool_store);
  std::vector<RetrievalResult> results;
  for (const auto &u : b.tst)
    results.push_back(retrieve_topk(u.id, encode(model, speech.at(u.id), Side::kQuery), encoded,
                                    10, std::nullopt, {}));
  REQUIRE(results.size() == 200);

  const std::vector<std::size_t> ks{1, 2, 3, 5, 10};
  const auto acc = retrieval_topk_accuracy(results, b.catalog, b.pool, ks);
  const auto by_utt = words_by_devtst_utt(b.catalog);
  double prev = 0.0;
  for (std::size_t k : ks) {
    std::size_t hit = 0;
    for (const auto &r : results) {
      const std::string &w = by_utt.at(r.query_id);
      bool any = false;
      for (std::size_t i = 0; i < k; ++i) {
        for (const auto &t : split_whitespace(b.pool.at(r.hits[i].candidate_id).transcript_raw))
          any = any || normalize_word(t) == w;
      }
      hit += any;
    }
    CHECK(acc.at(k) == doctest::Approx(100.0 * hit / 200.0).epsilon(1e-12));
    CHECK(acc.at(k) >= prev);
    prev = acc.at(k);
  }
}

TEST_CASE("sidecar parsing") {
  const std::string jsonl =
      "{\"id\": \"u1\", \"align\": [[0, [0, 1]], [2, []]]}\n\n{\"id\":\"u2\",\"align\":[]}\n";
  const auto a = parse_alignments_text(jsonl);
  CHECK(a.at("u1") == std::vector<AlignLink>{{0, {0, 1}}, {2, {}}});
  CHECK(a.at("u2").empty());
  CHECK(parse_alignments_text(format_alignments(a)) == a);
  CHECK_THROWS_AS(parse_alignments_text("{\"id\": \"u1\"}\n"), ParseError);
  CHECK_THROWS_AS(parse_alignments_text("not json\n"), ParseError);
  CHECK_THROWS_AS(parse_alignments_text("{\"id\":\"u\",\"align\":[]}\n{\"id\":\"u\",\"align\":[]}"),
                  ParseError);

  const auto l = parse_lemmas_text("Häuser\thaus\r\nging\tgehen\n\n");
  CHECK(l.at("häuser") == "haus");
  CHECK(l.at("ging") == "gehen");
  CHECK_THROWS_AS(parse_lemmas_text("a\tb\tc\n"), ParseError);
  CHECK_THROWS_AS(parse_lemmas_text("a\t...\n"), ParseError);

  TempDir dir("sidecar");
  write_file_atomic(dir / "a.jsonl", jsonl);
  write_file_atomic(dir / "l.tsv", "x\ty\n");
  CHECK(read_alignments(dir / "a.jsonl") == a);
  CHECK(read_lemmas(dir / "l.tsv").at("x") == "y");
}

TEST_CASE("report JSON has stable keys and nulls") {
  EvalReport r;
  r.bleu = 12.5;
  r.retrieval_topk_pct = {{1, 50.0}, {10, 75.0}};
  r.n_queries = 4;
  const std::string json = format_report(r);
  CHECK(json.back() == '\n');
  CHECK(json.find("\"bleu\": 12.5") != std::string::npos);
  CHECK(json.find("\"wer\": null") != std::string::npos);
  CHECK(json.find("\"10\": 75.0") != std::string::npos);
  CHECK(json.find("\"bleu\"") < json.find("\"ceiling_pct\""));
  CHECK(json.find("\"ceiling_pct\"") < json.find("\"wer\""));
  CHECK(format_report(r) == json);
}
