// rwd/embedding.hpp

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

#ifndef RWD_EMBEDDING_HPP_
#define RWD_EMBEDDING_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rwd {

enum class Modality : std::uint8_t { kSpeech = 0, kText = 1 };

const char *to_string(Modality m);
Modality modality_from_string(std::string_view s);

/// Frame-level encoder output for one utterance: T rows of dim reals.
class FrameMatrix {
 public:
  FrameMatrix() = default;
  /// Throws ValidationError unless frames >= 1, dim >= 1, the data size
  /// matches and every value is finite.
  FrameMatrix(std::string utt_id, Modality modality, std::size_t frames, std::size_t dim,
              std::vector<float> data);

  const std::string &utt_id() const { return utt_id_; }
  Modality modality() const { return modality_; }
  std::size_t frames() const { return frames_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> row(std::size_t t) const {
    return {data_.data() + t * dim_, dim_};
  }
  const std::vector<float> &data() const { return data_; }

  friend bool operator==(const FrameMatrix &, const FrameMatrix &) = default;

 private:
  std::string utt_id_;
  Modality modality_ = Modality::kSpeech;
  std::size_t frames_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

/// Id-keyed frame matrices of one modality and a uniform dimension.
/// Insertion order is kept so that write/read round-trips bit-exactly.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

  /// Throws ValidationError on duplicate id, dim or modality mismatch.
  void add(FrameMatrix m);

  std::size_t dim() const { return dim_; }
  /// Unset while the store is empty.
  std::optional<Modality> modality() const { return modality_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<FrameMatrix> &records() const { return records_; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  const FrameMatrix *find(std::string_view id) const;
  /// Throws ValidationError naming the id if it is absent.
  const FrameMatrix &at(std::string_view id) const;

  friend bool operator==(const EmbeddingStore &a, const EmbeddingStore &b) {
    return a.dim_ == b.dim_ && a.modality_ == b.modality_ && a.records_ == b.records_;
  }

 private:
  std::size_t dim_ = 0;
  std::optional<Modality> modality_;
  std::vector<FrameMatrix> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Learned single-query attention over frames.
struct AttentionPooler {
  std::vector<double> query;
};

/// Mean over the frame axis, accumulated in double.
std::vector<double> mean_pool(const FrameMatrix &m);

/// Softmax over t of (frame_t . query), then the weighted frame sum.
/// `weights`, when non-null, receives the softmax weights.
std::vector<double> attention_pool(const FrameMatrix &m, const AttentionPooler &p,
                                   std::vector<double> *weights = nullptr);

inline constexpr char kStoreMagic[4] = {'R', 'D', 'K', 'E'};
inline constexpr std::uint32_t kStoreVersion = 1;

std::string serialize_store(const EmbeddingStore &store);
/// Throws FormatError (bad magic/version/truncation, with byte offset) or
/// ValidationError (non-finite payload).
EmbeddingStore deserialize_store(std::string_view bytes);

void write_store(const EmbeddingStore &store, const std::filesystem::path &path);
EmbeddingStore read_store(const std::filesystem::path &path);

}  // namespace rwd

#endif  // RWD_EMBEDDING_HPP_
