// src/splitter.cpp

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

#include "rwd/splitter.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "rwd/error.hpp"
#include "rwd/rng.hpp"

namespace rwd {

FrequencyTable::FrequencyTable(std::map<std::string, std::size_t> counts)
    : counts_(std::move(counts)) {
  for (const auto &[w, c] : counts_) {
    if (c == 0) throw ValidationError("zero count for word '" + w + "'");
    total_ += c;
  }
}

std::size_t FrequencyTable::count(const std::string &word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

FrequencyTable count_frequencies(const Corpus &corpus) {
  if (corpus.empty()) throw ValidationError("cannot count frequencies of an empty corpus");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto &u : corpus)
    for (const auto &t : u.transcript_tokens) ++counts[t];
  return FrequencyTable(std::map<std::string, std::size_t>(counts.begin(), counts.end()));
}

const char *to_string(ShotClass s) { return s == ShotClass::kZero ? "zero" : "one"; }

ShotClass shot_class_from_string(std::string_view s) {
  if (s == "zero") return ShotClass::kZero;
  if (s == "one") return ShotClass::kOne;
  throw ParseError("unknown shot class '" + std::string(s) + "'");
}

std::map<std::string, std::string> words_by_devtst_utt(const RareWordCatalog &catalog) {
  std::map<std::string, std::string> out;
  for (const auto &[word, e] : catalog) out.emplace(e.devtst_utt, word);
  return out;
}

std::pair<Corpus, Corpus> split_dev_tst(const Corpus &joint, std::size_t tst_size,
                                        std::uint64_t seed) {
  if (tst_size > joint.size())
    throw ValidationError("tst_size " + std::to_string(tst_size) + " exceeds joint size " +
                          std::to_string(joint.size()));
  std::vector<std::size_t> order(joint.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "split_dev_tst"));
  shuffle(order.begin(), order.end(), rng);

  std::vector<bool> to_tst(joint.size(), false);
  for (std::size_t i = 0; i < tst_size; ++i) to_tst[order[i]] = true;

  Corpus dev("dev"), tst("tst");
  for (std::size_t i = 0; i < joint.size(); ++i) (to_tst[i] ? tst : dev).add(joint[i]);
  return {std::move(dev), std::move(tst)};
}

SplitBundle partition(const Corpus &corpus, std::uint64_t seed, const PartitionOptions &opts) {
  const FrequencyTable freqs = count_frequencies(corpus);

  // Distinct utterances per rare-frequency word, in ascending id order.
  std::map<std::string, std::vector<std::size_t>> postings;
  for (const auto &[w, c] : freqs.counts())
    if (c >= opts.min_rare_frequency && c <= opts.max_rare_frequency) postings[w];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const auto &t : corpus[i].transcript_tokens) {
      auto it = postings.find(t);
      if (it != postings.end() && (it->second.empty() || it->second.back() != i))
        it->second.push_back(i);
    }
  }

  enum Slot : char { kFree, kPool, kDevTst, kTrain };
  std::vector<Slot> slot(corpus.size(), kFree);
  RareWordCatalog catalog;

  for (auto &[word, utts] : postings) {
    const std::size_t freq = freqs.count(word);
    // Every occurrence must sit in its own unassigned utterance, otherwise
    // the word would leak into another split.
    if (utts.size() != freq) continue;
    if (std::any_of(utts.begin(), utts.end(), [&](std::size_t i) { return slot[i] != kFree; }))
      continue;
    std::sort(utts.begin(), utts.end(),
              [&](std::size_t a, std::size_t b) { return corpus[a].id < corpus[b].id; });
    CatalogEntry e;
    e.pool_utt = corpus[utts[0]].id;
    e.devtst_utt = corpus[utts[1]].id;
    slot[utts[0]] = kPool;
    slot[utts[1]] = kDevTst;
    if (freq == 2) {
      e.shot_class = ShotClass::kZero;
    } else if (freq == 3) {
      e.shot_class = ShotClass::kOne;
      e.train_utt = corpus[utts[2]].id;
      slot[utts[2]] = kTrain;
    } else {
      throw ValidationError("rare frequency range must lie within [2, 3]");
    }
    catalog.emplace(word, std::move(e));
  }

  SplitBundle b;
  b.pool.set_name("pool");
  b.train_reduced.set_name("train_reduced");
  Corpus joint("devtst");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    switch (slot[i]) {
      case kPool: b.pool.add(corpus[i]); break;
      case kDevTst: joint.add(corpus[i]); break;
      case kTrain:
      case kFree: b.train_reduced.add(corpus[i]); break;
    }
  }
  auto [dev, tst] = split_dev_tst(joint, std::min(opts.tst_size, joint.size()), seed);
  b.dev = std::move(dev);
  b.tst = std::move(tst);
  b.catalog = std::move(catalog);
  return b;
}

const char *to_string(SplitViolation::Kind k) {
  using K = SplitViolation::Kind;
  switch (k) {
    case K::kOverlap: return "overlap";
    case K::kMissing: return "missing";
    case K::kUnknown: return "unknown";
    case K::kDanglingRef: return "dangling_ref";
    case K::kZeroShotInTrain: return "zero_shot_in_train";
    case K::kOneShotCount: return "one_shot_count";
    case K::kNotInPool: return "not_in_pool";
    case K::kDevTstCount: return "devtst_count";
    case K::kShotMismatch: return "shot_mismatch";
  }
  return "?";
}

std::vector<SplitViolation> verify_splits(const SplitBundle &bundle, const Corpus *original) {
  using K = SplitViolation::Kind;
  std::vector<SplitViolation> out;
  auto report = [&](K kind, std::string word, std::string utt, std::string msg) {
    out.push_back({kind, std::move(word), std::move(utt), std::move(msg)});
  };

  const std::pair<const char *, const Corpus *> splits[] = {{"pool", &bundle.pool},
                                                            {"dev", &bundle.dev},
                                                            {"tst", &bundle.tst},
                                                            {"train_reduced", &bundle.train_reduced}};
  std::unordered_map<std::string, const char *> home;
  for (const auto &[name, c] : splits) {
    for (const auto &u : *c) {
      auto [it, inserted] = home.emplace(u.id, name);
      if (!inserted)
        report(K::kOverlap, {}, u.id,
               "utterance in both " + std::string(it->second) + " and " + name);
    }
  }
  if (original) {
    for (const auto &u : *original)
      if (!home.count(u.id)) report(K::kMissing, {}, u.id, "utterance in no split");
    for (const auto &[name, c] : splits)
      for (const auto &u : *c)
        if (!original->contains(u.id))
          report(K::kUnknown, {}, u.id, std::string("utterance in ") + name + " not in corpus");
  }

  // Per-word utterance lists for catalog words in each split.
  auto postings_in = [&](const Corpus &c) {
    std::unordered_map<std::string, std::vector<std::string>> p;
    for (const auto &u : c) {
      std::unordered_set<std::string_view> seen;
      for (const auto &t : u.transcript_tokens)
        if (bundle.catalog.count(t) && seen.insert(t).second) p[t].push_back(u.id);
    }
    return p;
  };
  const auto in_pool = postings_in(bundle.pool);
  const auto in_dev = postings_in(bundle.dev);
  const auto in_tst = postings_in(bundle.tst);
  const auto in_train = postings_in(bundle.train_reduced);
  auto count_of = [](const auto &p, const std::string &w) -> std::size_t {
    auto it = p.find(w);
    return it == p.end() ? 0 : it->second.size();
  };

  for (const auto &[word, e] : bundle.catalog) {
    if (!bundle.pool.contains(e.pool_utt))
      report(K::kDanglingRef, word, e.pool_utt, "pool_utt not in pool");
    if (!bundle.dev.contains(e.devtst_utt) && !bundle.tst.contains(e.devtst_utt))
      report(K::kDanglingRef, word, e.devtst_utt, "devtst_utt not in dev or tst");
    if ((e.shot_class == ShotClass::kZero) != !e.train_utt.has_value())
      report(K::kShotMismatch, word, e.train_utt.value_or(""),
             "shot class disagrees with train_utt");
    if (e.train_utt && !bundle.train_reduced.contains(*e.train_utt))
      report(K::kDanglingRef, word, *e.train_utt, "train_utt not in train_reduced");

    const std::size_t n_train = count_of(in_train, word);
    if (e.shot_class == ShotClass::kZero && n_train != 0) {
      for (const auto &id : in_train.at(word))
        report(K::kZeroShotInTrain, word, id, "zero-shot word seen in train_reduced");
    }
    if (e.shot_class == ShotClass::kOne && n_train != 1) {
      std::string ids;
      if (n_train) for (const auto &id : in_train.at(word)) ids += (ids.empty() ? "" : ",") + id;
      report(K::kOneShotCount, word, ids,
             "one-shot word in " + std::to_string(n_train) + " train utterances");
    }
    if (count_of(in_pool, word) == 0) report(K::kNotInPool, word, {}, "word in no pool utterance");
    const std::size_t n_devtst = count_of(in_dev, word) + count_of(in_tst, word);
    if (n_devtst != 1) {
      std::string ids;
      for (const auto *p : {&in_dev, &in_tst}) {
        auto it = p->find(word);
        if (it != p->end())
          for (const auto &id : it->second) ids += (ids.empty() ? "" : ",") + id;
      }
      report(K::kDevTstCount, word, ids,
             "word in " + std::to_string(n_devtst) + " dev/tst utterances");
    }
  }
  return out;
}

std::string format_catalog(const RareWordCatalog &catalog) {
  std::string out = "word\tshot_class\tpool_id\tdevtst_id\ttrain_id\n";
  for (const auto &[word, e] : catalog) {
    out += escape_field(word) + '\t' + to_string(e.shot_class) + '\t' + escape_field(e.pool_utt) +
           '\t' + escape_field(e.devtst_utt) + '\t' + escape_field(e.train_utt.value_or("")) +
           '\n';
  }
  return out;
}

RareWordCatalog parse_catalog_text(std::string_view text) {
  RareWordCatalog catalog;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (++line_no == 1) {
      if (line != "word\tshot_class\tpool_id\tdevtst_id\ttrain_id")
        throw ParseError("bad catalog header", line_no);
      continue;
    }
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 5)
      throw ParseError("expected 5 columns, found " + std::to_string(cols.size()), line_no);
    try {
      CatalogEntry e;
      e.shot_class = shot_class_from_string(cols[1]);
      e.pool_utt = unescape_field(cols[2]);
      e.devtst_utt = unescape_field(cols[3]);
      if (!cols[4].empty()) e.train_utt = unescape_field(cols[4]);
      if (!catalog.emplace(unescape_field(cols[0]), std::move(e)).second)
        throw ParseError("duplicate catalog word");
    } catch (const ParseError &err) {
      throw ParseError(err.what(), line_no);
    }
  }
  return catalog;
}

void write_catalog(const RareWordCatalog &catalog, const std::filesystem::path &path) {
  write_file_atomic(path, format_catalog(catalog));
}

RareWordCatalog read_catalog(const std::filesystem::path &path) {
  return parse_catalog_text(read_file(path));
}

}  // namespace rwd
