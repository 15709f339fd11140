// tests/test_util.hpp

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

#ifndef RWD_TESTS_TEST_UTIL_HPP_
#define RWD_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rwd/corpus.hpp"

namespace rwd::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("rwd-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Utterance utt(const std::string &id, const std::string &transcript,
                     const std::string &translation = "x", const std::string &speaker = "s0") {
  return Utterance::make(id, speaker, 1.0, transcript, translation);
}

inline Corpus corpus_of(std::vector<Utterance> utts, std::string name = "c") {
  return Corpus(std::move(name), std::move(utts));
}

}  // namespace rwd::testing

#endif  // RWD_TESTS_TEST_UTIL_HPP_
