// rwd/splitter.hpp

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

#ifndef RWD_SPLITTER_HPP_
#define RWD_SPLITTER_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rwd/corpus.hpp"

namespace rwd {

/// Corpus-level occurrence counts over normalized transcript tokens.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  explicit FrequencyTable(std::map<std::string, std::size_t> counts);

  /// 0 for unknown words.
  std::size_t count(const std::string &word) const;
  bool contains(const std::string &word) const { return counts_.count(word) != 0; }
  std::size_t size() const { return counts_.size(); }
  std::size_t total() const { return total_; }
  const std::map<std::string, std::size_t> &counts() const { return counts_; }

  friend bool operator==(const FrequencyTable &, const FrequencyTable &) = default;

 private:
  std::map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Counts every token occurrence; an utterance repeating a word contributes
/// once per repetition. Throws ValidationError on an empty corpus.
FrequencyTable count_frequencies(const Corpus &corpus);

enum class ShotClass { kZero, kOne };

const char *to_string(ShotClass s);
ShotClass shot_class_from_string(std::string_view s);

struct CatalogEntry {
  ShotClass shot_class = ShotClass::kZero;
  std::string pool_utt;
  std::string devtst_utt;
  std::optional<std::string> train_utt;  // present iff one-shot

  friend bool operator==(const CatalogEntry &, const CatalogEntry &) = default;
};

/// Rare words kept by the partition, keyed by normalized word.
using RareWordCatalog = std::map<std::string, CatalogEntry>;

/// Inverse lookup: devtst utterance id -> the rare word it was assigned for.
std::map<std::string, std::string> words_by_devtst_utt(const RareWordCatalog &catalog);

struct SplitBundle {
  Corpus pool;
  Corpus dev;
  Corpus tst;
  Corpus train_reduced;
  RareWordCatalog catalog;
};

struct PartitionOptions {
  std::size_t tst_size = 2500;
  std::size_t min_rare_frequency = 2;
  std::size_t max_rare_frequency = 3;
};

/// Re-splits a corpus around its rare words. Words are visited in ascending
/// lexicographic order and claim their utterances in ascending id order;
/// a word whose utterances are not all distinct and still unassigned is
/// dropped. The joint dev/tst set is then split by split_dev_tst with
/// tst_size clamped to its size.
SplitBundle partition(const Corpus &corpus, std::uint64_t seed,
                      const PartitionOptions &opts = {});

/// Seeded shuffle; the first tst_size shuffled utterances form tst. Both
/// outputs keep the input's relative order.
std::pair<Corpus, Corpus> split_dev_tst(const Corpus &joint, std::size_t tst_size,
                                        std::uint64_t seed);

struct SplitViolation {
  enum class Kind {
    kOverlap,          // utterance id in more than one split
    kMissing,          // id of the original corpus in no split
    kUnknown,          // id in a split but not in the original corpus
    kDanglingRef,      // catalog refers to an id absent from its split
    kZeroShotInTrain,  // zero-shot word occurs in train_reduced
    kOneShotCount,     // one-shot word not in exactly one train utterance
    kNotInPool,        // catalog word in no pool utterance
    kDevTstCount,      // catalog word not in exactly one dev/tst utterance
    kShotMismatch,     // shot class disagrees with train_utt presence
  };
  Kind kind;
  std::string word;    // empty for structural violations
  std::string utt_id;  // empty when not tied to a single utterance
  std::string message;
};

const char *to_string(SplitViolation::Kind k);

/// Checks the partition invariants. An empty result means the bundle is sound.
/// With `original`, also checks exhaustiveness against it.
std::vector<SplitViolation> verify_splits(const SplitBundle &bundle,
                                          const Corpus *original = nullptr);

/// catalog.tsv: word, shot_class, pool_id, devtst_id, train_id (with header).
std::string format_catalog(const RareWordCatalog &catalog);
RareWordCatalog parse_catalog_text(std::string_view text);
void write_catalog(const RareWordCatalog &catalog, const std::filesystem::path &path);
RareWordCatalog read_catalog(const std::filesystem::path &path);

}  // namespace rwd

#endif  // RWD_SPLITTER_HPP_
