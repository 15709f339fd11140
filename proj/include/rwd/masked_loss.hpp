// rwd/masked_loss.hpp

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

#ifndef RWD_MASKED_LOSS_HPP_
#define RWD_MASKED_LOSS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rwd {

struct ConcatTarget;

/// Token layout of a decoder target: example translation, separator, main
/// translation. A plain (unprepended) target has no separator and boundary 0.
struct TargetLayout {
  std::vector<std::string> tokens;
  std::size_t boundary = 0;            // first token of the main translation
  std::optional<std::size_t> sep_index;

  /// Throws ValidationError unless sep_index < boundary <= |tokens| and the
  /// separator sits at sep_index, or there is no separator and boundary is 0.
  void validate() const;
};

TargetLayout make_layout(const ConcatTarget &target);
TargetLayout plain_layout(std::vector<std::string> tokens);

/// 0 for the example prefix and separator, 1 for the main translation.
std::vector<std::uint8_t> build_mask(const TargetLayout &layout);

enum class Reduction { kSum, kMean };

/// -sum_t M_t ln p_t over the gold-token probabilities. kMean divides by the
/// number of unmasked positions. Throws ValidationError on a length mismatch
/// or a probability outside (0, 1].
double masked_nll(std::span<const double> probs, const TargetLayout &layout,
                  Reduction reduction = Reduction::kSum);

/// True iff the hypothesis starts with the layout's forced prefix (example
/// translation and separator).
bool validate_prefix(std::span<const std::string> hypothesis, const TargetLayout &layout);

/// One line of a probability fixture file.
struct ProbFixture {
  std::string id;
  std::size_t boundary = 0;
  std::vector<double> probs;
};

/// JSON lines {"id": ..., "boundary": ..., "probs": [...]}.
std::vector<ProbFixture> parse_prob_fixtures(std::string_view jsonl);
std::vector<ProbFixture> read_prob_fixtures(const std::filesystem::path &path);

/// Loss of a fixture; positions before `boundary` are masked.
double fixture_loss(const ProbFixture &f, Reduction reduction = Reduction::kSum);

}  // namespace rwd

#endif  // RWD_MASKED_LOSS_HPP_
