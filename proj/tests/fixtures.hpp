// tests/fixtures.hpp

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

// Hand-built metric fixtures shared by the unit tests and the acceptance run.

#ifndef RWD_TESTS_FIXTURES_HPP_
#define RWD_TESTS_FIXTURES_HPP_

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "rwd/corpus.hpp"
#include "rwd/metrics.hpp"
#include "rwd/prepender.hpp"
#include "rwd/splitter.hpp"

namespace rwd::fixtures {

// Three sentence pairs for corpus BLEU. Counted by hand:
//   1. "the cat sat on the mat" vs itself: n-gram matches 6/6 5/5 4/4 3/3
//   2. "a dog runs" vs "the dog runs fast": 2/3 1/2 0/1, no 4-grams
//   3. "hello world" vs "hello there world": 2/2 0/1, no 3- or 4-grams
// Totals 10/11 6/8 4/5 3/3, hypothesis length 11, reference length 13.
//   BP   = exp(1 - 13/11)                                  = 0.8337482
//   P    = exp((ln 10/11 + ln 6/8 + ln 4/5 + ln 3/3) / 4)  = 0.8593878
//   BLEU = 100 * BP * P                                    = 71.651784
inline const std::vector<std::string> kBleuHyps = {"the cat sat on the mat", "a dog runs",
                                                   "hello world"};
inline const std::vector<std::string> kBleuRefs = {"the cat sat on the mat",
                                                   "the dog runs fast", "hello there world"};
inline constexpr double kBleuExpected = 71.651784;

// Two test utterances with one rare word each. The reference translation of
// the first uses the plural "Häuser" (lemma "haus") and its hypothesis the
// singular "Haus"; the second hypothesis misses "Fahrrad".
struct RareWordFixture {
  Corpus eval_set;
  RareWordCatalog catalog;
  AlignmentSidecar align;
  LemmaSidecar lemmas;
  std::map<std::string, std::string> hyps;
};

inline RareWordFixture rare_word_fixture() {
  RareWordFixture f;
  f.eval_set = Corpus("tst", {
      Utterance::make("t1", "s1", 1.0, "the houses burned", "die Häuser brannten"),
      Utterance::make("t2", "s2", 1.0, "my bicycle broke", "mein Fahrrad brach"),
  });
  f.catalog["houses"] = {ShotClass::kZero, "p1", "t1", std::nullopt};
  f.catalog["bicycle"] = {ShotClass::kOne, "p2", "t2", std::string("r2")};
  f.align["t1"] = {{0, {0}}, {1, {1}}, {2, {2}}};
  f.align["t2"] = {{0, {0}}, {1, {1}}, {2, {2}}};
  f.lemmas = {{"häuser", "haus"}, {"haus", "haus"}, {"fahrrad", "fahrrad"},
              {"die", "der"},     {"das", "der"},   {"brannten", "brennen"},
              {"mein", "mein"},   {"brach", "brechen"}, {"rad", "rad"},
              {"ist", "sein"},    {"kaputt", "kaputt"}};
  f.hyps = {{"t1", "das Haus brannten"}, {"t2", "mein Rad ist kaputt"}};
  return f;
}

// n_words test utterances, each with a unique rare word whose reference
// translation is "T<word>"; the gold example translations of the first
// n_match of them contain that target word, the rest do not.
struct CeilingFixture {
  Corpus eval_set;
  Corpus pool;
  RareWordCatalog catalog;
  AlignmentSidecar align;
  std::vector<PrependedPair> gold;
};

inline CeilingFixture ceiling_fixture(std::size_t n_words, std::size_t n_match) {
  CeilingFixture f;
  f.eval_set.set_name("tst");
  f.pool.set_name("pool");
  for (std::size_t i = 0; i < n_words; ++i) {
    char w[32];
    std::snprintf(w, sizeof w, "rare%05zu", i);
    const std::string word = w;
    const std::string tid = "t" + word, pid = "p" + word;
    const Utterance test =
        Utterance::make(tid, "s", 1.0, "we saw " + word, "wir sahen T" + word);
    const Utterance example = Utterance::make(
        pid, "s", 1.0, word + " again", i < n_match ? "T" + word + " wieder" : "etwas wieder");
    f.eval_set.add(test);
    f.pool.add(example);
    f.catalog[word] = {ShotClass::kZero, pid, tid, std::nullopt};
    f.align[tid] = {{0, {0}}, {1, {1}}, {2, {2}}};
    f.gold.push_back({example, test, word, true});
  }
  return f;
}

}  // namespace rwd::fixtures

#endif  // RWD_TESTS_FIXTURES_HPP_
