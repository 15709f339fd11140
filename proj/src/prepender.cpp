// src/prepender.cpp

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

#include "rwd/prepender.hpp"

#include <algorithm>
#include <unordered_map>

#include "rwd/error.hpp"
#include "rwd/rng.hpp"

namespace rwd {

std::vector<std::string> sentence_rare_word(const Utterance &utt, const FrequencyTable &freqs) {
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const auto &t : utt.transcript_tokens) {
    std::size_t c = freqs.count(t);
    if (c) ranked.emplace_back(c, t);
  }
  if (ranked.empty())
    throw ValidationError("utterance '" + utt.id + "' has no token in the frequency table");
  std::sort(ranked.begin(), ranked.end());
  ranked.erase(std::unique(ranked.begin(), ranked.end()), ranked.end());
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (auto &r : ranked) out.push_back(std::move(r.second));
  return out;
}

std::vector<PrependedPair> build_prepended_train_set(const Corpus &train,
                                                     const FrequencyTable &freqs,
                                                     std::uint64_t seed) {
  if (train.size() < 2)
    throw ValidationError("need at least two training utterances to build pairs");

  std::unordered_map<std::string, std::vector<std::size_t>> postings;
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (const auto &t : train[i].transcript_tokens) {
      auto &p = postings[t];
      if (p.empty() || p.back() != i) p.push_back(i);
    }
  }

  std::vector<PrependedPair> out;
  out.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Utterance &main = train[i];
    Rng rng(derive_seed(seed, main.id));
    std::size_t partner = i;
    std::string link;

    std::vector<std::string> candidates;
    try {
      candidates = sentence_rare_word(main, freqs);
    } catch (const ValidationError &) {
      // No known token; only the random fallback applies.
    }
    for (const auto &w : candidates) {
      auto it = postings.find(w);
      if (it == postings.end() || it->second.size() < 2) continue;
      const auto &p = it->second;
      std::size_t pick = uniform_index(rng, p.size() - 1);
      // Skip over self, which appears exactly once in the posting list.
      auto self = std::lower_bound(p.begin(), p.end(), i);
      if (pick >= static_cast<std::size_t>(self - p.begin())) ++pick;
      partner = p[pick];
      link = w;
      break;
    }
    if (link.empty()) {
      partner = uniform_index(rng, train.size() - 1);
      if (partner >= i) ++partner;
    }
    out.push_back({train[partner], main, std::move(link), false});
  }
  return out;
}

GoldTestSet build_gold_test_set(const Corpus &tst, const Corpus &pool,
                                const RareWordCatalog &catalog) {
  const auto by_devtst = words_by_devtst_utt(catalog);
  std::unordered_map<std::string, std::size_t> best_pool;  // word -> pool index
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (const auto &t : pool[i].transcript_tokens) {
      if (!catalog.count(t)) continue;
      auto [it, inserted] = best_pool.emplace(t, i);
      if (!inserted && pool[i].id < pool[it->second].id) it->second = i;
    }
  }

  GoldTestSet out;
  for (const auto &u : tst) {
    std::string word;
    if (auto it = by_devtst.find(u.id); it != by_devtst.end()) {
      word = it->second;
    } else {
      for (const auto &t : u.transcript_tokens)
        if (catalog.count(t) && (word.empty() || t < word)) word = t;
    }
    if (word.empty()) {
      out.violations.push_back({u.id, "no catalog rare word in test utterance"});
      continue;
    }
    auto it = best_pool.find(word);
    if (it == best_pool.end()) {
      out.violations.push_back({u.id, "no pool utterance contains '" + word + "'"});
      continue;
    }
    out.pairs.push_back({pool[it->second], u, word, true});
  }
  return out;
}

ConcatTarget concat_target(std::string_view example_translation,
                           std::string_view main_translation) {
  if (example_translation.find(kSeparator) != std::string_view::npos ||
      main_translation.find(kSeparator) != std::string_view::npos)
    throw ValidationError("translation already contains the separator token");
  ConcatTarget out;
  const auto example_tokens = split_whitespace(example_translation);
  out.boundary = example_tokens.size() + 1;
  if (!example_tokens.empty()) {
    out.text.append(example_translation);
    out.text += ' ';
  }
  out.text.append(kSeparator);
  if (!split_whitespace(main_translation).empty()) {
    out.text += ' ';
    out.text.append(main_translation);
  }
  return out;
}

std::string format_pairs(const std::vector<PrependedPair> &pairs) {
  std::string out = "main_id\texample_id\tlink_word\tgold\n";
  for (const auto &p : pairs) {
    out += escape_field(p.main.id) + '\t' + escape_field(p.example.id) + '\t' +
           escape_field(p.link_word) + '\t' + (p.gold ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<PairRecord> parse_pairs_text(std::string_view text) {
  std::vector<PairRecord> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (++line_no == 1) {
      if (line != "main_id\texample_id\tlink_word\tgold")
        throw ParseError("bad pairs header", line_no);
      continue;
    }
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 4)
      throw ParseError("expected 4 columns, found " + std::to_string(cols.size()), line_no);
    if (cols[3] != "0" && cols[3] != "1") throw ParseError("gold must be 0 or 1", line_no);
    try {
      out.push_back({unescape_field(cols[0]), unescape_field(cols[1]), unescape_field(cols[2]),
                     cols[3] == "1"});
    } catch (const ParseError &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

std::vector<PairRecord> read_pairs(const std::filesystem::path &path) {
  return parse_pairs_text(read_file(path));
}

}  // namespace rwd
