// rwd/prepender.hpp

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

#ifndef RWD_PREPENDER_HPP_
#define RWD_PREPENDER_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rwd/corpus.hpp"
#include "rwd/splitter.hpp"

namespace rwd {

inline constexpr std::string_view kSeparator = "<SEP>";

/// An example utterance prepended to a main utterance.
struct PrependedPair {
  Utterance example;
  Utterance main;
  std::string link_word;  // empty for the random fallback
  bool gold = false;
};

/// Tokens of `utt` known to `freqs`, deduplicated and ordered by ascending
/// frequency then lexicographically. The head is the sentence-level rare word.
/// Throws ValidationError if no token is in the table.
std::vector<std::string> sentence_rare_word(const Utterance &utt, const FrequencyTable &freqs);

/// Pairs every training utterance with another one sharing its rarest
/// shareable word, falling back to the next-rarest word and finally to a
/// random partner with an empty link_word. RNG streams are per utterance id.
/// Throws ValidationError for fewer than two utterances.
std::vector<PrependedPair> build_prepended_train_set(const Corpus &train,
                                                     const FrequencyTable &freqs,
                                                     std::uint64_t seed);

struct GoldViolation {
  std::string tst_utt;
  std::string message;
};

struct GoldTestSet {
  std::vector<PrependedPair> pairs;
  std::vector<GoldViolation> violations;
};

/// Gold examples: for each test utterance, the smallest-id pool utterance
/// containing its catalog rare word.
GoldTestSet build_gold_test_set(const Corpus &tst, const Corpus &pool,
                                const RareWordCatalog &catalog);

struct ConcatTarget {
  std::string text;
  std::size_t boundary = 0;  // whitespace-token index of the first main token
};

/// Joins "example <SEP> main". Throws ValidationError if either side already
/// contains the separator.
ConcatTarget concat_target(std::string_view example_translation,
                           std::string_view main_translation);

/// pairs.tsv: main_id, example_id, link_word, gold (with header).
struct PairRecord {
  std::string main_id;
  std::string example_id;
  std::string link_word;
  bool gold = false;

  friend bool operator==(const PairRecord &, const PairRecord &) = default;
};

std::string format_pairs(const std::vector<PrependedPair> &pairs);
std::vector<PairRecord> parse_pairs_text(std::string_view text);
std::vector<PairRecord> read_pairs(const std::filesystem::path &path);

}  // namespace rwd

#endif  // RWD_PREPENDER_HPP_
