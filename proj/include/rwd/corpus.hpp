// rwd/corpus.hpp

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

#ifndef RWD_CORPUS_HPP_
#define RWD_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rwd {

/// Lowercases, applies Unicode NFC and strips leading/trailing punctuation.
/// Internal apostrophes and hyphens survive. Returns "" for punctuation-only
/// input. Idempotent.
std::string normalize_word(std::string_view raw);

/// Whitespace split followed by normalize_word, empty results dropped.
std::vector<std::string> tokenize_transcript(std::string_view text);

/// Plain whitespace split, no normalization.
std::vector<std::string> split_whitespace(std::string_view text);

/// One recording with its transcript and translation.
struct Utterance {
  std::string id;
  std::string speaker_id;
  double duration_s = 0.0;
  std::string transcript_raw;
  std::vector<std::string> transcript_tokens;
  std::string translation_raw;
  std::string embedding_ref;  // empty when absent

  /// Builds an utterance, deriving transcript_tokens from transcript_raw.
  static Utterance make(std::string id, std::string speaker_id, double duration_s,
                        std::string transcript_raw, std::string translation_raw,
                        std::string embedding_ref = {});

  bool contains_token(std::string_view word) const;

  friend bool operator==(const Utterance &, const Utterance &) = default;
};

/// Ordered collection of utterances with unique ids.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string name) : name_(std::move(name)) {}
  /// Throws ValidationError on a duplicate or empty id.
  Corpus(std::string name, std::vector<Utterance> utterances);

  void add(Utterance utt);

  const std::string &name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  std::size_t size() const { return utts_.size(); }
  bool empty() const { return utts_.empty(); }
  const Utterance &operator[](std::size_t i) const { return utts_[i]; }
  const std::vector<Utterance> &utterances() const { return utts_; }
  auto begin() const { return utts_.begin(); }
  auto end() const { return utts_.end(); }

  bool contains(std::string_view id) const;
  /// Throws ValidationError if the id is unknown.
  const Utterance &at(std::string_view id) const;
  const Utterance *find(std::string_view id) const;

  /// Names compare too; used by round-trip checks that set them identically.
  friend bool operator==(const Corpus &a, const Corpus &b) {
    return a.name_ == b.name_ && a.utts_ == b.utts_;
  }

 private:
  std::string name_;
  std::vector<Utterance> utts_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Backslash escaping for TSV fields: tab, newline and backslash.
std::string escape_field(std::string_view raw);
/// Inverse of escape_field. Throws ParseError on a dangling or unknown escape.
std::string unescape_field(std::string_view field);

/// Splits one TSV line on tabs.
std::vector<std::string_view> split_tabs(std::string_view line);

/// Header of the manifest TSV format.
inline constexpr std::string_view kManifestHeader =
    "id\tspeaker\tduration_s\ttranscript\ttranslation\tembedding_ref";

/// Reads a manifest. The corpus name is the file stem.
Corpus parse_manifest(const std::filesystem::path &path);
Corpus parse_manifest_text(std::string_view text, std::string name = {});

void write_manifest(const Corpus &corpus, const std::filesystem::path &path);
std::string format_manifest(const Corpus &corpus);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// Reads a whole file; throws IoError on failure.
std::string read_file(const std::filesystem::path &path);
/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path &path, std::string_view bytes);

}  // namespace rwd

#endif  // RWD_CORPUS_HPP_
