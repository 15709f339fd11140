// rwd/synth.hpp

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

#ifndef RWD_SYNTH_HPP_
#define RWD_SYNTH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rwd/corpus.hpp"
#include "rwd/embedding.hpp"
#include "rwd/metrics.hpp"

namespace rwd {

// Synthetic corpus model. Every utterance holds a run of frequent background
// words plus exactly one key word. Key words are either planted rare words
// (frequency exactly 2 or 3) or background content words whose frequency is
// drawn from [content_min_freq, content_max_freq]. All key-word frequencies
// are planned exactly, so a recount reproduces the plan.
struct SynthConfig {
  std::size_t n_utterances = 7000;
  std::size_t vocab_size = 16;  // frequent background words
  std::size_t n_rare_words = 200;
  double rare_frequency_mix = 0.5;  // share of planted words with frequency 2
  std::size_t content_min_freq = 2;
  std::size_t content_max_freq = 5;
  std::size_t background_min_len = 6;
  std::size_t background_max_len = 10;
  std::size_t n_speakers = 16;
  double same_speaker_share = 0.2;  // key words whose occurrences share a speaker
  double translation_variant_rate = 0.2;
  std::size_t dim = 64;
  std::size_t frames_per_token = 2;
  double noise_sigma = 0.2;
  double speaker_offset_sigma = 0.1;
  std::uint64_t seed = 1;

  /// Throws ValidationError for zero counts, negative sigmas, bad ranges.
  void validate() const;
};

struct KeyWordPlan {
  std::string word;
  std::size_t frequency = 0;
  bool planted = false;
};

/// The exact key-word frequency plan gen_corpus realizes.
std::vector<KeyWordPlan> plan_key_words(const SynthConfig &cfg);

/// Source and target surface forms of the synthetic lexicon.
std::string frequent_word(std::size_t index);
std::string content_word(std::size_t index);
std::string planted_word(std::size_t index);
std::string translate_word(const std::string &word, bool variant);

/// Throws ValidationError when the plan needs more utterances than configured.
Corpus gen_corpus(const SynthConfig &cfg);

/// Deterministic per-token base vector with N(0, 1) entries.
std::vector<double> token_base_vector(const SynthConfig &cfg, const std::string &token);
/// Additive offset shared by all utterances of a speaker.
std::vector<double> speaker_offset(const SynthConfig &cfg, const std::string &speaker);

/// Speech: frames_per_token noisy frames per token plus the speaker offset.
/// Text: one noise-free frame per token.
EmbeddingStore gen_embeddings(const Corpus &corpus, const SynthConfig &cfg, Modality modality);

/// Word-by-word identity alignment between transcript and translation, which
/// the synthetic lexicon guarantees.
AlignmentSidecar gen_alignments(const Corpus &corpus);

}  // namespace rwd

#endif  // RWD_SYNTH_HPP_
