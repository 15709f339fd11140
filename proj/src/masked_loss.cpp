// src/masked_loss.cpp

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

#include "rwd/masked_loss.hpp"

#include <cmath>

#include <json.hpp>

#include "rwd/corpus.hpp"
#include "rwd/error.hpp"
#include "rwd/prepender.hpp"

namespace rwd {

void TargetLayout::validate() const {
  if (boundary > tokens.size())
    throw ValidationError("layout boundary " + std::to_string(boundary) + " beyond " +
                          std::to_string(tokens.size()) + " tokens");
  if (!sep_index) {
    if (boundary != 0) throw ValidationError("layout without separator must have boundary 0");
    return;
  }
  if (*sep_index >= boundary) throw ValidationError("separator must precede the boundary");
  if (tokens[*sep_index] != kSeparator)
    throw ValidationError("token at sep_index is not the separator");
}

TargetLayout make_layout(const ConcatTarget &target) {
  TargetLayout l;
  l.tokens = split_whitespace(target.text);
  l.boundary = target.boundary;
  if (target.boundary == 0) throw ValidationError("concatenated target without separator");
  l.sep_index = target.boundary - 1;
  l.validate();
  return l;
}

TargetLayout plain_layout(std::vector<std::string> tokens) {
  TargetLayout l;
  l.tokens = std::move(tokens);
  return l;
}

std::vector<std::uint8_t> build_mask(const TargetLayout &layout) {
  layout.validate();
  std::vector<std::uint8_t> m(layout.tokens.size(), 1);
  for (std::size_t t = 0; t < layout.boundary; ++t) m[t] = 0;
  return m;
}

double masked_nll(std::span<const double> probs, const TargetLayout &layout,
                  Reduction reduction) {
  if (probs.size() != layout.tokens.size())
    throw ValidationError("got " + std::to_string(probs.size()) + " probabilities for " +
                          std::to_string(layout.tokens.size()) + " target tokens");
  const auto mask = build_mask(layout);
  double loss = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    if (!(probs[t] > 0.0 && probs[t] <= 1.0))
      throw ValidationError("probability at position " + std::to_string(t) +
                            " outside (0, 1]");
    if (!mask[t]) continue;
    loss -= std::log(probs[t]);
    ++n;
  }
  if (reduction == Reduction::kMean && n) loss /= static_cast<double>(n);
  return loss;
}

bool validate_prefix(std::span<const std::string> hypothesis, const TargetLayout &layout) {
  if (hypothesis.size() < layout.boundary) return false;
  for (std::size_t t = 0; t < layout.boundary; ++t)
    if (hypothesis[t] != layout.tokens[t]) return false;
  return true;
}

std::vector<ProbFixture> parse_prob_fixtures(std::string_view jsonl) {
  using json = nlohmann::json;
  std::vector<ProbFixture> out;
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
      ProbFixture f;
      f.id = j.at("id").get<std::string>();
      f.boundary = j.at("boundary").get<std::size_t>();
      f.probs = j.at("probs").get<std::vector<double>>();
      if (f.boundary > f.probs.size()) throw ParseError("boundary beyond probs");
      out.push_back(std::move(f));
    } catch (const json::exception &e) {
      throw ParseError(std::string("prob fixture: ") + e.what(), line_no);
    } catch (const ParseError &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

std::vector<ProbFixture> read_prob_fixtures(const std::filesystem::path &path) {
  return parse_prob_fixtures(read_file(path));
}

double fixture_loss(const ProbFixture &f, Reduction reduction) {
  // Fixtures carry no surface tokens; a placeholder layout with the separator
  // as the last masked position has the same mask.
  TargetLayout l;
  l.tokens.assign(f.probs.size(), "_");
  l.boundary = f.boundary;
  if (f.boundary > 0) {
    l.sep_index = f.boundary - 1;
    l.tokens[f.boundary - 1] = std::string(kSeparator);
  }
  return masked_nll(f.probs, l, reduction);
}

}  // namespace rwd
