// src/metrics.cpp

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

#include "rwd/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "rwd/error.hpp"
#include "rwd/prepender.hpp"
#include "rwd/retriever.hpp"

namespace rwd {

using json = nlohmann::json;

std::vector<std::string> bleu_tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto &piece : split_whitespace(text)) {
    std::string cur;
    for (std::size_t i = 0; i < piece.size(); ++i) {
      const unsigned char c = static_cast<unsigned char>(piece[i]);
      const bool digit_sep = (c == '.' || c == ',') && i > 0 && i + 1 < piece.size() &&
                             std::isdigit(static_cast<unsigned char>(piece[i - 1])) &&
                             std::isdigit(static_cast<unsigned char>(piece[i + 1]));
      if (c < 0x80 && std::ispunct(c) && !digit_sep) {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
        out.emplace_back(1, static_cast<char>(c));
      } else {
        cur += static_cast<char>(c);
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
  }
  return out;
}

BleuStats bleu_stats(std::span<const std::string> hypotheses,
                     std::span<const std::string> references) {
  if (hypotheses.size() != references.size())
    throw ValidationError("BLEU needs as many hypotheses as references");
  if (hypotheses.empty()) throw ValidationError("BLEU of an empty corpus");
  BleuStats s;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto hyp = bleu_tokenize(hypotheses[i]);
    const auto ref = bleu_tokenize(references[i]);
    s.hyp_len += hyp.size();
    s.ref_len += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, std::size_t> ref_counts, hyp_counts;
      for (std::size_t j = 0; j + n <= ref.size(); ++j)
        ++ref_counts[{ref.begin() + j, ref.begin() + j + n}];
      for (std::size_t j = 0; j + n <= hyp.size(); ++j)
        ++hyp_counts[{hyp.begin() + j, hyp.begin() + j + n}];
      for (const auto &[gram, c] : hyp_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) s.matches[n - 1] += std::min(c, it->second);
        s.totals[n - 1] += c;
      }
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats &s) {
  if (s.hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  double smooth = 1.0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (s.totals[n] == 0) return 0.0;
    double p;
    if (s.matches[n] == 0) {
      smooth *= 2.0;
      p = 1.0 / (smooth * static_cast<double>(s.totals[n]));
    } else {
      p = static_cast<double>(s.matches[n]) / static_cast<double>(s.totals[n]);
    }
    log_sum += std::log(p);
  }
  const double bp = s.hyp_len < s.ref_len
                        ? std::exp(1.0 - static_cast<double>(s.ref_len) /
                                             static_cast<double>(s.hyp_len))
                        : 1.0;
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

double bleu(std::span<const std::string> hypotheses, std::span<const std::string> references) {
  return bleu_from_stats(bleu_stats(hypotheses, references));
}

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double wer(std::span<const std::string> hypotheses, std::span<const std::string> references) {
  if (hypotheses.size() != references.size())
    throw ValidationError("WER needs as many hypotheses as references");
  std::size_t edits = 0, words = 0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto h = tokenize_transcript(hypotheses[i]);
    const auto r = tokenize_transcript(references[i]);
    edits += edit_distance(h, r);
    words += r.size();
  }
  if (words == 0) throw ValidationError("WER with no reference words");
  return static_cast<double>(edits) / static_cast<double>(words);
}

AlignmentSidecar parse_alignments_text(std::string_view jsonl) {
  AlignmentSidecar out;
  std::size_t pos = 0, line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    std::string_view line =
        jsonl.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? jsonl.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      std::vector<AlignLink> links;
      for (const auto &link : j.at("align")) {
        if (!link.is_array() || link.size() != 2) throw ParseError("link must be [src, [tgt...]]");
        links.push_back({link[0].get<std::size_t>(), link[1].get<std::vector<std::size_t>>()});
      }
      if (!out.emplace(j.at("id").get<std::string>(), std::move(links)).second)
        throw ParseError("duplicate alignment id");
    } catch (const json::exception &e) {
      throw ParseError(std::string("alignment: ") + e.what(), line_no);
    } catch (const ParseError &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

AlignmentSidecar read_alignments(const std::filesystem::path &path) {
  return parse_alignments_text(read_file(path));
}

std::string format_alignments(const AlignmentSidecar &align) {
  std::string out;
  for (const auto &[id, links] : align) {
    json j;
    j["id"] = id;
    j["align"] = json::array();
    for (const auto &l : links) j["align"].push_back(json::array({l.src, l.tgt}));
    out += j.dump();
    out += '\n';
  }
  return out;
}

LemmaSidecar parse_lemmas_text(std::string_view tsv) {
  LemmaSidecar out;
  std::size_t pos = 0, line_no = 0;
  while (pos < tsv.size()) {
    std::size_t nl = tsv.find('\n', pos);
    std::string_view line =
        tsv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? tsv.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 2) throw ParseError("expected surface<TAB>lemma", line_no);
    std::string surface = normalize_word(cols[0]);
    std::string lemma = normalize_word(cols[1]);
    if (surface.empty() || lemma.empty()) throw ParseError("empty surface or lemma", line_no);
    out[std::move(surface)] = std::move(lemma);
  }
  return out;
}

LemmaSidecar read_lemmas(const std::filesystem::path &path) {
  return parse_lemmas_text(read_file(path));
}

namespace {

class Lemmatizer {
 public:
  Lemmatizer(const LemmaSidecar *lemmas, std::vector<std::string> &warnings)
      : lemmas_(lemmas), warnings_(warnings) {}

  std::string operator()(const std::string &surface) {
    if (!lemmas_) return surface;
    auto it = lemmas_->find(surface);
    if (it != lemmas_->end()) return it->second;
    if (missing_.insert(surface).second)
      warnings_.push_back("no lemma for '" + surface + "', using surface form");
    return surface;
  }

 private:
  const LemmaSidecar *lemmas_;
  std::vector<std::string> &warnings_;
  std::set<std::string> missing_;
};

RareWordScore judge(const std::map<std::string, std::string> &hypotheses, const Corpus &eval_set,
                    const RareWordCatalog &catalog, const AlignmentSidecar &align,
                    const LemmaSidecar *lemmas) {
  RareWordScore s;
  Lemmatizer lemma(lemmas, s.warnings);
  for (const auto &[word, entry] : catalog) {
    const Utterance *u = eval_set.find(entry.devtst_utt);
    if (!u) continue;

    const auto src = split_whitespace(u->transcript_raw);
    const auto ref = split_whitespace(u->translation_raw);
    std::set<std::size_t> positions;
    for (std::size_t i = 0; i < src.size(); ++i)
      if (normalize_word(src[i]) == word) positions.insert(i);

    std::set<std::string> targets;
    auto a = align.find(u->id);
    if (a == align.end()) {
      s.warnings.push_back("no alignment for '" + u->id + "', matching the surface of '" + word +
                           "'");
      targets.insert(word);
    } else {
      for (const auto &link : a->second) {
        if (!positions.count(link.src)) continue;
        for (std::size_t t : link.tgt) {
          if (t >= ref.size())
            throw ValidationError("alignment for '" + u->id + "' points past the reference");
          std::string n = normalize_word(ref[t]);
          if (!n.empty()) targets.insert(lemma(n));
        }
      }
      if (targets.empty()) {
        ++s.unaligned;
        continue;
      }
    }

    std::unordered_set<std::string> bag;
    auto h = hypotheses.find(u->id);
    if (h == hypotheses.end()) {
      s.warnings.push_back("no hypothesis for '" + u->id + "'");
    } else {
      for (const auto &tok : split_whitespace(h->second)) {
        std::string n = normalize_word(tok);
        if (!n.empty()) bag.insert(lemma(n));
      }
    }
    const bool hit = std::any_of(targets.begin(), targets.end(),
                                 [&](const std::string &t) { return bag.count(t) != 0; });
    ++s.n_words;
    if (hit) ++s.matched;
    if (entry.shot_class == ShotClass::kZero) {
      ++s.n_zero;
      if (hit) ++s.matched_zero;
    } else {
      ++s.n_one;
      if (hit) ++s.matched_one;
    }
  }
  auto pct = [](std::size_t a, std::size_t b) {
    return b ? 100.0 * static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  s.overall_pct = pct(s.matched, s.n_words);
  s.zero_shot_pct = pct(s.matched_zero, s.n_zero);
  s.one_shot_pct = pct(s.matched_one, s.n_one);
  return s;
}

}  // namespace

RareWordScore rare_word_accuracy(const std::map<std::string, std::string> &hypotheses,
                                 const Corpus &eval_set, const RareWordCatalog &catalog,
                                 const AlignmentSidecar &align, const LemmaSidecar *lemmas) {
  return judge(hypotheses, eval_set, catalog, align, lemmas);
}

RareWordScore oracle_ceiling(const Corpus &eval_set, const RareWordCatalog &catalog,
                             std::span<const PrependedPair> gold_pairs,
                             const AlignmentSidecar &align, const LemmaSidecar *lemmas) {
  std::map<std::string, std::string> hyps;
  for (const auto &p : gold_pairs) hyps.emplace(p.main.id, p.example.translation_raw);
  return judge(hyps, eval_set, catalog, align, lemmas);
}

std::map<std::size_t, double> retrieval_topk_accuracy(std::span<const RetrievalResult> results,
                                                      const RareWordCatalog &catalog,
                                                      const Corpus &candidates,
                                                      std::span<const std::size_t> k_values) {
  if (results.empty()) throw ValidationError("no retrieval results to score");
  const auto by_devtst = words_by_devtst_utt(catalog);
  std::map<std::size_t, std::size_t> correct;
  for (std::size_t k : k_values) {
    if (k == 0) throw ValidationError("k must be at least 1");
    correct[k] = 0;
  }
  for (const auto &r : results) {
    auto w = by_devtst.find(r.query_id);
    if (w == by_devtst.end())
      throw ValidationError("query '" + r.query_id + "' has no catalog rare word");
    // Rank of the first candidate containing the word; hits.size() if none.
    std::size_t first = r.hits.size();
    for (std::size_t i = 0; i < r.hits.size(); ++i) {
      if (candidates.at(r.hits[i].candidate_id).contains_token(w->second)) {
        first = i;
        break;
      }
    }
    for (auto &[k, c] : correct) {
      if (k > r.hits.size())
        throw ValidationError("k=" + std::to_string(k) + " exceeds result depth " +
                              std::to_string(r.hits.size()) + " for '" + r.query_id + "'");
      if (first < k) ++c;
    }
  }
  std::map<std::size_t, double> out;
  for (const auto &[k, c] : correct)
    out[k] = 100.0 * static_cast<double>(c) / static_cast<double>(results.size());
  return out;
}

std::string format_report(const EvalReport &r) {
  auto opt = [](const std::optional<double> &v) -> json { return v ? json(*v) : json(nullptr); };
  json j = json::object();
  j["bleu"] = opt(r.bleu);
  j["wer"] = opt(r.wer);
  j["rare_overall_pct"] = opt(r.rare_overall_pct);
  j["rare_zero_shot_pct"] = opt(r.rare_zero_shot_pct);
  j["rare_one_shot_pct"] = opt(r.rare_one_shot_pct);
  json topk = json::object();
  for (const auto &[k, v] : r.retrieval_topk_pct) topk[std::to_string(k)] = v;
  j["retrieval_topk_pct"] = topk;
  j["ceiling_pct"] = opt(r.ceiling_pct);
  j["same_speaker_pct"] = opt(r.same_speaker_pct);
  j["n_queries"] = r.n_queries;
  j["n_rare_words"] = r.n_rare_words;
  j["n_warnings"] = r.n_warnings;
  return j.dump(2) + "\n";
}

}  // namespace rwd
