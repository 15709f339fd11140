// rwd/metrics.hpp

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

#ifndef RWD_METRICS_HPP_
#define RWD_METRICS_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwd/corpus.hpp"
#include "rwd/splitter.hpp"

namespace rwd {

struct PrependedPair;
struct RetrievalResult;

// ---------------------------------------------------------------------------
// BLEU / WER

/// Whitespace split, then every ASCII punctuation character becomes its own
/// token ('.' and ',' between digits stay attached).
std::vector<std::string> bleu_tokenize(std::string_view text);

struct BleuStats {
  std::array<std::size_t, 4> matches{};  // clipped n-gram matches, n = 1..4
  std::array<std::size_t, 4> totals{};   // hypothesis n-gram counts
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

BleuStats bleu_stats(std::span<const std::string> hypotheses,
                     std::span<const std::string> references);

/// Corpus BLEU in [0, 100] from sufficient statistics. Zero-match orders use
/// exponential smoothing (1 / (2^k * total)); an order with no hypothesis
/// n-grams at all yields 0.
double bleu_from_stats(const BleuStats &s);

/// Throws ValidationError on length mismatch or empty input.
double bleu(std::span<const std::string> hypotheses, std::span<const std::string> references);

/// Word-level Levenshtein distance.
std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b);

/// Total edits over total reference words, on normalized tokens. Throws
/// ValidationError on length mismatch or when the references hold no word.
double wer(std::span<const std::string> hypotheses, std::span<const std::string> references);

// ---------------------------------------------------------------------------
// Rare-word accuracy

struct AlignLink {
  std::size_t src = 0;
  std::vector<std::size_t> tgt;

  friend bool operator==(const AlignLink &, const AlignLink &) = default;
};

/// Per utterance id: links from source word positions to reference target
/// word positions. Positions index the whitespace-split raw texts.
using AlignmentSidecar = std::map<std::string, std::vector<AlignLink>>;

/// Target-language surface (normalized) -> lemma.
using LemmaSidecar = std::map<std::string, std::string>;

AlignmentSidecar parse_alignments_text(std::string_view jsonl);
AlignmentSidecar read_alignments(const std::filesystem::path &path);
std::string format_alignments(const AlignmentSidecar &align);

LemmaSidecar parse_lemmas_text(std::string_view tsv);
LemmaSidecar read_lemmas(const std::filesystem::path &path);

struct RareWordScore {
  double overall_pct = 0.0;
  double zero_shot_pct = 0.0;
  double one_shot_pct = 0.0;
  std::size_t n_words = 0;  // evaluated unique words
  std::size_t n_zero = 0;
  std::size_t n_one = 0;
  std::size_t matched = 0;
  std::size_t matched_zero = 0;
  std::size_t matched_one = 0;
  std::size_t unaligned = 0;  // words with no aligned target, left out
  std::vector<std::string> warnings;
};

/// Scores every catalog word whose dev/tst utterance is in `eval_set`. A word
/// counts as translated iff some reference token aligned to one of its source
/// positions has a lemma among the hypothesis lemmas. A missing alignment
/// entry falls back to matching the word's own surface; a missing lemma to
/// the identity. Both fallbacks are reported in `warnings`. `lemmas` may be
/// null, which means identity lemmas without warnings.
RareWordScore rare_word_accuracy(const std::map<std::string, std::string> &hypotheses,
                                 const Corpus &eval_set, const RareWordCatalog &catalog,
                                 const AlignmentSidecar &align, const LemmaSidecar *lemmas);

/// Same judgement with each test utterance's gold example translation as the
/// hypothesis: the ceiling reachable by copying gold examples.
RareWordScore oracle_ceiling(const Corpus &eval_set, const RareWordCatalog &catalog,
                             std::span<const PrependedPair> gold_pairs,
                             const AlignmentSidecar &align, const LemmaSidecar *lemmas);

// ---------------------------------------------------------------------------
// Retrieval

/// A query is correct at k iff one of its first k candidates' transcripts
/// contains the query's rare word. Returns percentage per k. Throws
/// ValidationError when a query has no catalog word or k exceeds a result's
/// depth.
std::map<std::size_t, double> retrieval_topk_accuracy(std::span<const RetrievalResult> results,
                                                      const RareWordCatalog &catalog,
                                                      const Corpus &candidates,
                                                      std::span<const std::size_t> k_values);

// ---------------------------------------------------------------------------
// Report

struct EvalReport {
  std::optional<double> bleu;
  std::optional<double> wer;
  std::optional<double> rare_overall_pct;
  std::optional<double> rare_zero_shot_pct;
  std::optional<double> rare_one_shot_pct;
  std::map<std::size_t, double> retrieval_topk_pct;
  std::optional<double> ceiling_pct;
  std::optional<double> same_speaker_pct;
  std::size_t n_queries = 0;
  std::size_t n_rare_words = 0;
  std::size_t n_warnings = 0;
};

/// Stable key order, nulls for metrics that were not computed.
std::string format_report(const EvalReport &r);

}  // namespace rwd

#endif  // RWD_METRICS_HPP_
