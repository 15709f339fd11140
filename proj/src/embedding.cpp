// src/embedding.cpp

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

#include "rwd/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "rwd/corpus.hpp"
#include "rwd/error.hpp"

namespace rwd {

static_assert(std::endian::native == std::endian::little,
              "store I/O assumes a little-endian host");
static_assert(std::numeric_limits<float>::is_iec559);

const char *to_string(Modality m) { return m == Modality::kSpeech ? "speech" : "text"; }

Modality modality_from_string(std::string_view s) {
  if (s == "speech") return Modality::kSpeech;
  if (s == "text") return Modality::kText;
  throw ValidationError("unknown modality '" + std::string(s) + "'");
}

FrameMatrix::FrameMatrix(std::string utt_id, Modality modality, std::size_t frames,
                         std::size_t dim, std::vector<float> data)
    : utt_id_(std::move(utt_id)),
      modality_(modality),
      frames_(frames),
      dim_(dim),
      data_(std::move(data)) {
  if (frames_ == 0) throw ValidationError("frame matrix '" + utt_id_ + "' has no frames");
  if (dim_ == 0) throw ValidationError("frame matrix '" + utt_id_ + "' has zero dim");
  if (data_.size() != frames_ * dim_)
    throw ValidationError("frame matrix '" + utt_id_ + "' size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw ValidationError("frame matrix '" + utt_id_ + "' has non-finite value at frame " +
                            std::to_string(i / dim_));
}

void EmbeddingStore::add(FrameMatrix m) {
  if (dim_ == 0 && records_.empty()) dim_ = m.dim();
  if (m.dim() != dim_)
    throw ValidationError("record '" + m.utt_id() + "' has dim " + std::to_string(m.dim()) +
                          ", store has " + std::to_string(dim_));
  if (modality_ && *modality_ != m.modality())
    throw ValidationError("record '" + m.utt_id() + "' modality differs from store");
  if (!index_.emplace(m.utt_id(), records_.size()).second)
    throw ValidationError("duplicate record id '" + m.utt_id() + "'");
  modality_ = m.modality();
  records_.push_back(std::move(m));
}

const FrameMatrix *EmbeddingStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

const FrameMatrix &EmbeddingStore::at(std::string_view id) const {
  const FrameMatrix *m = find(id);
  if (!m) throw ValidationError("no embedding for utterance '" + std::string(id) + "'");
  return *m;
}

std::vector<double> mean_pool(const FrameMatrix &m) {
  std::vector<double> out(m.dim(), 0.0);
  for (std::size_t t = 0; t < m.frames(); ++t) {
    auto r = m.row(t);
    for (std::size_t i = 0; i < m.dim(); ++i) out[i] += r[i];
  }
  const double inv = 1.0 / static_cast<double>(m.frames());
  for (double &v : out) v *= inv;
  return out;
}

std::vector<double> attention_pool(const FrameMatrix &m, const AttentionPooler &p,
                                   std::vector<double> *weights) {
  if (p.query.size() != m.dim())
    throw ValidationError("attention query has length " + std::to_string(p.query.size()) +
                          ", frames have dim " + std::to_string(m.dim()));
  std::vector<double> w(m.frames());
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < m.frames(); ++t) {
    auto r = m.row(t);
    double s = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) s += r[i] * p.query[i];
    w[t] = s;
    max_score = std::max(max_score, s);
  }
  double z = 0.0;
  for (double &v : w) {
    v = std::exp(v - max_score);
    z += v;
  }
  std::vector<double> out(m.dim(), 0.0);
  for (std::size_t t = 0; t < m.frames(); ++t) {
    w[t] /= z;
    auto r = m.row(t);
    for (std::size_t i = 0; i < m.dim(); ++i) out[i] += w[t] * r[i];
  }
  if (weights) *weights = std::move(w);
  return out;
}

namespace {

template <typename T>
void put(std::string &out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char *what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::size_t n, const char *what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char *what) {
    if (bytes_.size() - pos_ < n)
      throw FormatError(std::string("truncated ") + what, pos_);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_store(const EmbeddingStore &store) {
  std::string out(kStoreMagic, 4);
  put<std::uint32_t>(out, kStoreVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.size()));
  for (const auto &m : store) {
    if (m.utt_id().size() > 0xffff)
      throw ValidationError("utterance id too long for store: '" + m.utt_id() + "'");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(m.utt_id().size()));
    out += m.utt_id();
    put<std::uint8_t>(out, static_cast<std::uint8_t>(m.modality()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.frames()));
    const auto &d = m.data();
    out.append(reinterpret_cast<const char *>(d.data()), d.size() * sizeof(float));
  }
  return out;
}

EmbeddingStore deserialize_store(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(4, "magic") != std::string_view(kStoreMagic, 4))
    throw FormatError("bad magic, expected RDKE", 0);
  const auto version_at = r.pos();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kStoreVersion)
    throw FormatError("unsupported version " + std::to_string(version), version_at);
  const auto dim = r.get<std::uint32_t>("dim");
  const auto count = r.get<std::uint32_t>("record count");
  if (count > 0 && dim == 0) throw FormatError("zero dim with records", 8);

  EmbeddingStore store(dim);
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto record_at = r.pos();
    const auto id_len = r.get<std::uint16_t>("id length");
    if (id_len == 0) throw FormatError("empty record id", record_at);
    std::string id(r.take(id_len, "record id"));
    const auto modality_at = r.pos();
    const auto modality = r.get<std::uint8_t>("modality");
    if (modality > 1)
      throw FormatError("bad modality byte " + std::to_string(modality), modality_at);
    const auto frames_at = r.pos();
    const auto frames = r.get<std::uint32_t>("frame count");
    if (frames == 0) throw FormatError("record '" + id + "' has zero frames", frames_at);
    const std::size_t n_values = static_cast<std::size_t>(frames) * dim;
    const auto payload_at = r.pos();
    if (n_values > (bytes.size() - payload_at) / sizeof(float))
      throw FormatError("truncated frame payload", payload_at);
    auto payload = r.take(n_values * sizeof(float), "frame payload");
    std::vector<float> data(n_values);
    std::memcpy(data.data(), payload.data(), payload.size());
    for (std::size_t i = 0; i < n_values; ++i)
      if (!std::isfinite(data[i]))
        throw ValidationError("non-finite value in record '" + id + "' at byte offset " +
                              std::to_string(payload_at + i * sizeof(float)));
    try {
      store.add(FrameMatrix(std::move(id), static_cast<Modality>(modality), frames, dim,
                            std::move(data)));
    } catch (const ValidationError &e) {
      throw FormatError(e.what(), record_at);
    }
  }
  if (!r.at_end()) throw FormatError("trailing bytes after last record", r.pos());
  return store;
}

void write_store(const EmbeddingStore &store, const std::filesystem::path &path) {
  write_file_atomic(path, serialize_store(store));
}

EmbeddingStore read_store(const std::filesystem::path &path) {
  return deserialize_store(read_file(path));
}

}  // namespace rwd
