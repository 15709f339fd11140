// rwd/retriever.hpp

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

#ifndef RWD_RETRIEVER_HPP_
#define RWD_RETRIEVER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rwd/embedding.hpp"

namespace rwd {

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  static Matrix identity(std::size_t n);

  double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix &, const Matrix &) = default;
};

/// y = M x
std::vector<double> matvec(const Matrix &m, std::span<const double> x);

enum class Pooling : std::uint8_t { kMean = 0, kAttention = 1 };
enum class Side { kQuery, kCandidate };

const char *to_string(Pooling p);
Pooling pooling_from_string(std::string_view s);

/// One tower of the dual encoder: pooling over frozen frame features followed
/// by a stack of trainable linear maps (first k x d, then k x k).
struct EncoderSide {
  Modality modality = Modality::kSpeech;
  Pooling pooling = Pooling::kMean;
  bool train_pooler = false;
  AttentionPooler pooler;  // query of length d when pooling is attention
  std::vector<Matrix> layers;

  friend bool operator==(const EncoderSide &a, const EncoderSide &b) {
    return a.modality == b.modality && a.pooling == b.pooling &&
           a.train_pooler == b.train_pooler && a.pooler.query == b.pooler.query &&
           a.layers == b.layers;
  }
};

struct RetrieverModel {
  EncoderSide query;
  EncoderSide candidate;

  const EncoderSide &side(Side s) const { return s == Side::kQuery ? query : candidate; }
  EncoderSide &side(Side s) { return s == Side::kQuery ? query : candidate; }
  std::size_t input_dim() const { return query.layers.front().cols; }
  std::size_t output_dim() const { return query.layers.back().rows; }

  friend bool operator==(const RetrieverModel &, const RetrieverModel &) = default;
};

struct ModelConfig {
  std::size_t input_dim = 0;
  std::size_t proj_dim = 0;  // 0 means input_dim
  std::size_t depth = 1;
  Modality query_modality = Modality::kSpeech;
  Modality candidate_modality = Modality::kSpeech;
  Pooling query_pooling = Pooling::kMean;
  Pooling candidate_pooling = Pooling::kMean;
  bool train_pooler = false;
  std::uint64_t seed = 0;
};

/// Identity projections when proj_dim == input_dim (the untrained model scores
/// raw pooled features), otherwise seeded N(0, 1/d) entries for the first
/// layer; deeper layers start as identity, attention queries at zero.
RetrieverModel init_model(const ModelConfig &cfg);

/// Same shapes as `m`, every trainable value zero.
RetrieverModel zeros_like(const RetrieverModel &m);

/// Trainable parameter blocks in a fixed order: query layers, query pooler
/// (if trained), candidate layers, candidate pooler (if trained).
std::vector<std::span<double>> trainable_blocks(RetrieverModel &m);
std::size_t trainable_count(const RetrieverModel &m);
bool is_finite(const RetrieverModel &m);

/// Pooled input of a side, before projection.
std::vector<double> pool(const EncoderSide &side, const FrameMatrix &m);

/// Projection of the pooled frames. Throws ValidationError on dim or
/// modality mismatch.
std::vector<double> encode(const RetrieverModel &model, const FrameMatrix &m, Side side);

/// Raw dot product. Throws ValidationError on length mismatch.
double similarity(std::span<const double> q, std::span<const double> c);

/// A query and its positive candidate.
struct TrainPair {
  const FrameMatrix *query = nullptr;
  const FrameMatrix *positive = nullptr;
};

struct LossResult {
  double loss = 0.0;                // mean over the batch
  std::vector<double> per_sample;   // -log softmax of the positive
};

/// In-batch-negative softmax loss. Throws ValidationError for B < 2.
LossResult contrastive_loss(const RetrieverModel &model, std::span<const TrainPair> batch);

struct GradResult {
  LossResult loss;
  RetrieverModel grad;  // zeros_like(model) layout
};

/// Exact gradient of contrastive_loss with respect to every trainable block.
GradResult grad_contrastive(const RetrieverModel &model, std::span<const TrainPair> batch);

enum class Optimizer { kSgd, kAdam };

const char *to_string(Optimizer o);
Optimizer optimizer_from_string(std::string_view s);

struct TrainConfig {
  std::size_t batch_size = 4;
  double learning_rate = 1e-3;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Learning rate used when whole encoders are finetuned.
  static TrainConfig encoder_preset() {
    TrainConfig c;
    c.learning_rate = 2e-5;
    return c;
  }
};

struct TrainResult {
  RetrieverModel model;
  /// Mean loss over a fixed, unshuffled batching of all pairs: entry 0 before
  /// training, entry e after epoch e.
  std::vector<double> loss_curve;
  /// Mean minibatch loss seen during each epoch.
  std::vector<double> running_loss;
};

/// Minibatch training with per-epoch seeded shuffles; a trailing batch with
/// fewer than two pairs is skipped. Throws Error("numeric") if the loss or
/// the model becomes non-finite.
TrainResult train(const RetrieverModel &model, std::span<const TrainPair> pairs,
                  const TrainConfig &cfg);

/// Looks up (query, positive) ids in the two stores. Throws ValidationError
/// naming the first missing utterance id.
std::vector<TrainPair> resolve_pairs(
    std::span<const std::pair<std::string, std::string>> id_pairs,
    const EmbeddingStore &query_store, const EmbeddingStore &candidate_store);

struct Hit {
  std::string candidate_id;
  double score = 0.0;

  friend bool operator==(const Hit &, const Hit &) = default;
};

struct RetrievalResult {
  std::string query_id;
  std::vector<Hit> hits;  // descending score, ties by ascending id

  friend bool operator==(const RetrievalResult &, const RetrievalResult &) = default;
};

/// Candidate-side encodings of a whole store, computed once per model.
struct EncodedPool {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> vectors;
};

EncodedPool encode_pool(const RetrieverModel &model, const EmbeddingStore &pool);

using SpeakerMap = std::unordered_map<std::string, std::string>;

/// Exhaustive scoring and exact top-k. With `exclude_speaker`, candidates of
/// that speaker are skipped (their speaker must be in `speakers`). k larger
/// than the eligible pool returns every eligible candidate. Throws
/// ValidationError if k == 0 or nothing is eligible.
RetrievalResult retrieve_topk(const std::string &query_id, std::span<const double> query_vec,
                              const EncodedPool &pool, std::size_t k,
                              const std::optional<std::string> &exclude_speaker,
                              const SpeakerMap &speakers);

RetrievalResult retrieve_topk(const RetrieverModel &model, const FrameMatrix &query,
                              const EmbeddingStore &pool, std::size_t k,
                              const std::optional<std::string> &exclude_speaker,
                              const SpeakerMap &speakers);

/// Percentage of results whose top-1 candidate shares the query's speaker.
double same_speaker_proportion(std::span<const RetrievalResult> results,
                               const SpeakerMap &speakers);

/// results TSV: query_id, rank (1-based), candidate_id, score (with header).
std::string format_results(std::span<const RetrievalResult> results);
std::vector<RetrievalResult> parse_results_text(std::string_view text);
std::vector<RetrievalResult> read_results(const std::filesystem::path &path);

inline constexpr char kModelMagic[4] = {'R', 'D', 'K', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;

/// Parameters are stored as 32-bit reals, so a round trip rounds them.
std::string serialize_model(const RetrieverModel &model);
RetrieverModel deserialize_model(std::string_view bytes);
void write_model(const RetrieverModel &model, const std::filesystem::path &path);
RetrieverModel read_model(const std::filesystem::path &path);

}  // namespace rwd

#endif  // RWD_RETRIEVER_HPP_
