// src/synth.cpp

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

#include "rwd/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "rwd/error.hpp"
#include "rwd/rng.hpp"

namespace rwd {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = 14 * 5;

// Fixed-width base-70 spelling; the width keeps the three word classes disjoint.
std::vector<std::string> syllables(std::size_t index, std::size_t width) {
  std::vector<std::string> out(width);
  for (std::size_t i = width; i-- > 0;) {
    const std::size_t s = index % kSyllables;
    index /= kSyllables;
    out[i] = {kConsonants[s / 5], kVowels[s % 5]};
  }
  if (index) throw ValidationError("synthetic vocabulary exhausted");
  return out;
}

std::string join(const std::vector<std::string> &parts) {
  std::string s;
  for (const auto &p : parts) s += p;
  return s;
}

std::string sentence(const std::vector<std::string> &words) {
  std::string s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) s += ' ';
    s += words[i];
  }
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    s += '.';
  }
  return s;
}

std::string padded(const char *prefix, std::size_t n, std::size_t width) {
  std::string digits = std::to_string(n);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

void SynthConfig::validate() const {
  auto positive = [](std::size_t v, const char *name) {
    if (v == 0) throw ValidationError(std::string(name) + " must be at least 1");
  };
  positive(n_utterances, "n_utterances");
  positive(vocab_size, "vocab_size");
  positive(n_speakers, "n_speakers");
  positive(dim, "dim");
  positive(frames_per_token, "frames_per_token");
  positive(content_min_freq, "content_min_freq");
  if (content_max_freq < content_min_freq)
    throw ValidationError("content_max_freq below content_min_freq");
  if (background_max_len < background_min_len)
    throw ValidationError("background_max_len below background_min_len");
  if (!(noise_sigma >= 0.0) || !(speaker_offset_sigma >= 0.0))
    throw ValidationError("sigmas must be non-negative");
  for (double p : {rare_frequency_mix, same_speaker_share, translation_variant_rate})
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("shares must lie in [0, 1]");
}

std::string frequent_word(std::size_t index) { return join(syllables(index, 2)); }
std::string content_word(std::size_t index) { return join(syllables(index, 3)); }
std::string planted_word(std::size_t index) { return join(syllables(index, 4)); }

std::string translate_word(const std::string &word, bool variant) {
  std::string out;
  for (std::size_t i = word.size(); i >= 2; i -= 2) out += word.substr(i - 2, 2);
  out += variant ? "ung" : "en";
  return out;
}

std::vector<KeyWordPlan> plan_key_words(const SynthConfig &cfg) {
  cfg.validate();
  std::vector<KeyWordPlan> plan;
  const auto n_two = static_cast<std::size_t>(
      std::llround(cfg.rare_frequency_mix * static_cast<double>(cfg.n_rare_words)));
  std::size_t slots = 0;
  for (std::size_t i = 0; i < cfg.n_rare_words; ++i) {
    plan.push_back({planted_word(i), i < n_two ? 2u : 3u, true});
    slots += plan.back().frequency;
  }
  if (slots > cfg.n_utterances)
    throw ValidationError("infeasible synth config: " + std::to_string(slots) +
                          " rare-word slots exceed " + std::to_string(cfg.n_utterances) +
                          " utterances");
  Rng rng(derive_seed(cfg.seed, "plan"));
  std::size_t left = cfg.n_utterances - slots;
  const std::size_t span = cfg.content_max_freq - cfg.content_min_freq + 1;
  for (std::size_t i = 0; left > 0; ++i) {
    std::size_t f = cfg.content_min_freq + uniform_index(rng, span);
    f = std::min(f, left);
    plan.push_back({content_word(i), f, false});
    left -= f;
  }
  return plan;
}

Corpus gen_corpus(const SynthConfig &cfg) {
  const auto plan = plan_key_words(cfg);
  Rng rng(derive_seed(cfg.seed, "corpus"));

  std::vector<std::size_t> slot_word;
  slot_word.reserve(cfg.n_utterances);
  for (std::size_t w = 0; w < plan.size(); ++w)
    slot_word.insert(slot_word.end(), plan[w].frequency, w);
  shuffle(slot_word.begin(), slot_word.end(), rng);

  // Key words sharing a speaker across all their occurrences.
  std::vector<std::optional<std::size_t>> word_speaker(plan.size());
  for (auto &s : word_speaker)
    if (uniform_real(rng) < cfg.same_speaker_share) s = uniform_index(rng, cfg.n_speakers);

  std::vector<double> zipf(cfg.vocab_size);
  for (std::size_t r = 0; r < cfg.vocab_size; ++r) zipf[r] = 1.0 / static_cast<double>(r + 1);
  std::discrete_distribution<std::size_t> frequent(zipf.begin(), zipf.end());
  std::vector<std::string> frequent_words, frequent_targets;
  for (std::size_t r = 0; r < cfg.vocab_size; ++r) {
    frequent_words.push_back(frequent_word(r));
    frequent_targets.push_back(translate_word(frequent_words.back(), false));
  }

  const std::size_t id_width = std::max<std::size_t>(6, std::to_string(cfg.n_utterances).size());
  Corpus corpus("synth");
  for (std::size_t i = 0; i < cfg.n_utterances; ++i) {
    const std::size_t w = slot_word[i];
    const std::size_t speaker =
        word_speaker[w] ? *word_speaker[w] : uniform_index(rng, cfg.n_speakers);
    const std::size_t len =
        cfg.background_min_len +
        uniform_index(rng, cfg.background_max_len - cfg.background_min_len + 1);
    std::vector<std::string> src, tgt;
    for (std::size_t t = 0; t < len; ++t) {
      const std::size_t r = frequent(rng);
      src.push_back(frequent_words[r]);
      tgt.push_back(frequent_targets[r]);
    }
    const std::size_t at = uniform_index(rng, len + 1);
    const bool variant = uniform_real(rng) < cfg.translation_variant_rate;
    src.insert(src.begin() + static_cast<std::ptrdiff_t>(at), plan[w].word);
    tgt.insert(tgt.begin() + static_cast<std::ptrdiff_t>(at), translate_word(plan[w].word, variant));

    const std::string id = padded("utt", i, id_width);
    const double duration =
        static_cast<double>(src.size() * cfg.frames_per_token) * 0.04;
    corpus.add(Utterance::make(id, padded("spk", speaker, 3), duration, sentence(src),
                               sentence(tgt), id));
  }
  return corpus;
}

std::vector<double> token_base_vector(const SynthConfig &cfg, const std::string &token) {
  Rng rng(derive_seed(cfg.seed, "token:" + token));
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(cfg.dim);
  for (double &x : v) x = g(rng);
  return v;
}

std::vector<double> speaker_offset(const SynthConfig &cfg, const std::string &speaker) {
  Rng rng(derive_seed(cfg.seed, "speaker:" + speaker));
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(cfg.dim);
  for (double &x : v) x = cfg.speaker_offset_sigma * g(rng);
  return v;
}

EmbeddingStore gen_embeddings(const Corpus &corpus, const SynthConfig &cfg, Modality modality) {
  cfg.validate();
  EmbeddingStore store(cfg.dim);
  std::map<std::string, std::vector<double>> base_cache;
  auto base = [&](const std::string &tok) -> const std::vector<double> & {
    auto it = base_cache.find(tok);
    if (it == base_cache.end()) it = base_cache.emplace(tok, token_base_vector(cfg, tok)).first;
    return it->second;
  };
  std::map<std::string, std::vector<double>> offsets;

  for (const auto &u : corpus) {
    const auto &tokens = u.transcript_tokens;
    if (tokens.empty()) continue;
    const std::string key = u.embedding_ref.empty() ? u.id : u.embedding_ref;
    if (modality == Modality::kText) {
      std::vector<float> data;
      data.reserve(tokens.size() * cfg.dim);
      for (const auto &t : tokens)
        for (double x : base(t)) data.push_back(static_cast<float>(x));
      store.add(FrameMatrix(key, modality, tokens.size(), cfg.dim, std::move(data)));
      continue;
    }
    auto off_it = offsets.find(u.speaker_id);
    if (off_it == offsets.end())
      off_it = offsets.emplace(u.speaker_id, speaker_offset(cfg, u.speaker_id)).first;
    const auto &off = off_it->second;
    Rng rng(derive_seed(cfg.seed, "noise:" + u.id));
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t frames = tokens.size() * cfg.frames_per_token;
    std::vector<float> data;
    data.reserve(frames * cfg.dim);
    for (const auto &t : tokens) {
      const auto &b = base(t);
      for (std::size_t f = 0; f < cfg.frames_per_token; ++f)
        for (std::size_t i = 0; i < cfg.dim; ++i)
          data.push_back(static_cast<float>(b[i] + off[i] + cfg.noise_sigma * g(rng)));
    }
    store.add(FrameMatrix(key, modality, frames, cfg.dim, std::move(data)));
  }
  return store;
}

AlignmentSidecar gen_alignments(const Corpus &corpus) {
  AlignmentSidecar out;
  for (const auto &u : corpus) {
    const std::size_t n = std::min(split_whitespace(u.transcript_raw).size(),
                                   split_whitespace(u.translation_raw).size());
    auto &links = out[u.id];
    for (std::size_t i = 0; i < n; ++i) links.push_back({i, {i}});
  }
  return out;
}

}  // namespace rwd
