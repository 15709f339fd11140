// src/retriever.cpp

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

#include "rwd/retriever.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rwd/corpus.hpp"
#include "rwd/error.hpp"
#include "rwd/rng.hpp"

namespace rwd {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> matvec(const Matrix &m, std::span<const double> x) {
  if (x.size() != m.cols)
    throw ValidationError("matvec: vector length " + std::to_string(x.size()) +
                          " != matrix cols " + std::to_string(m.cols));
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double *row = m.data.data() + r * m.cols;
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

const char *to_string(Pooling p) { return p == Pooling::kMean ? "mean" : "attention"; }

Pooling pooling_from_string(std::string_view s) {
  if (s == "mean") return Pooling::kMean;
  if (s == "attention") return Pooling::kAttention;
  throw ValidationError("unknown pooling '" + std::string(s) + "'");
}

const char *to_string(Optimizer o) { return o == Optimizer::kSgd ? "sgd" : "adam"; }

Optimizer optimizer_from_string(std::string_view s) {
  if (s == "sgd") return Optimizer::kSgd;
  if (s == "adam") return Optimizer::kAdam;
  throw ValidationError("unknown optimizer '" + std::string(s) + "'");
}

RetrieverModel init_model(const ModelConfig &cfg) {
  if (cfg.input_dim == 0) throw ValidationError("model input dim must be positive");
  if (cfg.depth == 0) throw ValidationError("projection depth must be at least 1");
  const std::size_t d = cfg.input_dim;
  const std::size_t k = cfg.proj_dim ? cfg.proj_dim : d;

  Rng rng(derive_seed(cfg.seed, "init_model"));
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  auto make_side = [&](Modality modality, Pooling pooling) {
    EncoderSide s;
    s.modality = modality;
    s.pooling = pooling;
    s.train_pooler = cfg.train_pooler && pooling == Pooling::kAttention;
    if (pooling == Pooling::kAttention) s.pooler.query.assign(d, 0.0);
    if (k == d) {
      s.layers.push_back(Matrix::identity(d));
    } else {
      Matrix w(k, d);
      for (double &v : w.data) v = gauss(rng);
      s.layers.push_back(std::move(w));
    }
    for (std::size_t l = 1; l < cfg.depth; ++l) s.layers.push_back(Matrix::identity(k));
    return s;
  };
  RetrieverModel m;
  m.query = make_side(cfg.query_modality, cfg.query_pooling);
  m.candidate = make_side(cfg.candidate_modality, cfg.candidate_pooling);
  return m;
}

RetrieverModel zeros_like(const RetrieverModel &m) {
  RetrieverModel z = m;
  for (Side s : {Side::kQuery, Side::kCandidate}) {
    auto &side = z.side(s);
    for (auto &l : side.layers) std::fill(l.data.begin(), l.data.end(), 0.0);
    std::fill(side.pooler.query.begin(), side.pooler.query.end(), 0.0);
  }
  return z;
}

std::vector<std::span<double>> trainable_blocks(RetrieverModel &m) {
  std::vector<std::span<double>> out;
  for (Side s : {Side::kQuery, Side::kCandidate}) {
    auto &side = m.side(s);
    for (auto &l : side.layers) out.emplace_back(l.data);
    if (side.pooling == Pooling::kAttention && side.train_pooler)
      out.emplace_back(side.pooler.query);
  }
  return out;
}

std::size_t trainable_count(const RetrieverModel &m) {
  std::size_t n = 0;
  for (auto b : trainable_blocks(const_cast<RetrieverModel &>(m))) n += b.size();
  return n;
}

bool is_finite(const RetrieverModel &m) {
  for (Side s : {Side::kQuery, Side::kCandidate}) {
    const auto &side = m.side(s);
    for (const auto &l : side.layers)
      for (double v : l.data)
        if (!std::isfinite(v)) return false;
    for (double v : side.pooler.query)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {

void check_input(const EncoderSide &side, const FrameMatrix &m, Side which) {
  const char *name = which == Side::kQuery ? "query" : "candidate";
  if (m.modality() != side.modality)
    throw ValidationError("'" + m.utt_id() + "' is " + to_string(m.modality()) + ", " + name +
                          " side expects " + to_string(side.modality));
  if (m.dim() != side.layers.front().cols)
    throw ValidationError("'" + m.utt_id() + "' has dim " + std::to_string(m.dim()) + ", " +
                          name + " side expects " + std::to_string(side.layers.front().cols));
}

/// Activations kept for the backward pass: acts[0] is the pooled input,
/// acts[l + 1] the output of layer l.
struct SideForward {
  std::vector<double> attn;
  std::vector<std::vector<double>> acts;
  const std::vector<double> &out() const { return acts.back(); }
};

SideForward forward(const EncoderSide &side, const FrameMatrix &m) {
  SideForward f;
  f.acts.reserve(side.layers.size() + 1);
  if (side.pooling == Pooling::kAttention)
    f.acts.push_back(attention_pool(m, side.pooler, &f.attn));
  else
    f.acts.push_back(mean_pool(m));
  for (const auto &l : side.layers) f.acts.push_back(matvec(l, f.acts.back()));
  return f;
}

/// Accumulates dL/dparams of one side given dL/d(output) = g.
void backward(const EncoderSide &side, const FrameMatrix &m, const SideForward &f,
              std::vector<double> g, EncoderSide &grad) {
  for (std::size_t l = side.layers.size(); l-- > 0;) {
    const Matrix &w = side.layers[l];
    Matrix &gw = grad.layers[l];
    const auto &in = f.acts[l];
    std::vector<double> g_in(w.cols, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double gr = g[r];
      if (gr == 0.0) continue;
      double *grow = gw.data.data() + r * w.cols;
      const double *wrow = w.data.data() + r * w.cols;
      for (std::size_t c = 0; c < w.cols; ++c) {
        grow[c] += gr * in[c];
        g_in[c] += gr * wrow[c];
      }
    }
    g = std::move(g_in);
  }
  if (side.pooling == Pooling::kAttention && side.train_pooler) {
    // p = sum_t a_t x_t with a = softmax(X w):
    // dL/dw = sum_t a_t (g . x_t) (x_t - p).
    const auto &p = f.acts[0];
    for (std::size_t t = 0; t < m.frames(); ++t) {
      auto x = m.row(t);
      double gx = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) gx += g[i] * x[i];
      const double coef = f.attn[t] * gx;
      for (std::size_t i = 0; i < x.size(); ++i) grad.pooler.query[i] += coef * (x[i] - p[i]);
    }
  }
}

struct BatchForward {
  std::vector<SideForward> q, c;
  std::vector<double> sims;   // B x B, row = query
  std::vector<double> probs;  // row-wise softmax of sims
  LossResult loss;
};

BatchForward forward_batch(const RetrieverModel &model, std::span<const TrainPair> batch) {
  const std::size_t B = batch.size();
  if (B < 2) throw ValidationError("contrastive batch needs at least 2 pairs, got " +
                                   std::to_string(B));
  BatchForward f;
  f.q.reserve(B);
  f.c.reserve(B);
  for (const auto &p : batch) {
    if (!p.query || !p.positive) throw ValidationError("null frame matrix in batch");
    check_input(model.query, *p.query, Side::kQuery);
    check_input(model.candidate, *p.positive, Side::kCandidate);
    f.q.push_back(forward(model.query, *p.query));
    f.c.push_back(forward(model.candidate, *p.positive));
  }
  f.sims.resize(B * B);
  f.probs.resize(B * B);
  f.loss.per_sample.resize(B);
  double total = 0.0;
  for (std::size_t i = 0; i < B; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < B; ++j) {
      f.sims[i * B + j] = similarity(f.q[i].out(), f.c[j].out());
      mx = std::max(mx, f.sims[i * B + j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < B; ++j) z += std::exp(f.sims[i * B + j] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < B; ++j) f.probs[i * B + j] = std::exp(f.sims[i * B + j] - lse);
    f.loss.per_sample[i] = lse - f.sims[i * B + i];
    total += f.loss.per_sample[i];
  }
  f.loss.loss = total / static_cast<double>(B);
  return f;
}

}  // namespace

std::vector<double> pool(const EncoderSide &side, const FrameMatrix &m) {
  return side.pooling == Pooling::kAttention ? attention_pool(m, side.pooler) : mean_pool(m);
}

std::vector<double> encode(const RetrieverModel &model, const FrameMatrix &m, Side side) {
  const auto &s = model.side(side);
  check_input(s, m, side);
  std::vector<double> h = pool(s, m);
  for (const auto &l : s.layers) h = matvec(l, h);
  return h;
}

double similarity(std::span<const double> q, std::span<const double> c) {
  if (q.size() != c.size())
    throw ValidationError("similarity of vectors with lengths " + std::to_string(q.size()) +
                          " and " + std::to_string(c.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q[i] * c[i];
  return s;
}

LossResult contrastive_loss(const RetrieverModel &model, std::span<const TrainPair> batch) {
  return forward_batch(model, batch).loss;
}

GradResult grad_contrastive(const RetrieverModel &model, std::span<const TrainPair> batch) {
  BatchForward f = forward_batch(model, batch);
  const std::size_t B = batch.size();
  const std::size_t k = model.output_dim();
  const double inv_b = 1.0 / static_cast<double>(B);

  // dL/dS_ij = (P_ij - [i == j]) / B
  std::vector<std::vector<double>> gq(B, std::vector<double>(k, 0.0));
  std::vector<std::vector<double>> gc(B, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < B; ++i) {
    for (std::size_t j = 0; j < B; ++j) {
      const double gs = (f.probs[i * B + j] - (i == j ? 1.0 : 0.0)) * inv_b;
      const auto &qi = f.q[i].out();
      const auto &cj = f.c[j].out();
      for (std::size_t r = 0; r < k; ++r) {
        gq[i][r] += gs * cj[r];
        gc[j][r] += gs * qi[r];
      }
    }
  }

  GradResult out{std::move(f.loss), zeros_like(model)};
  for (std::size_t i = 0; i < B; ++i) {
    backward(model.query, *batch[i].query, f.q[i], std::move(gq[i]), out.grad.query);
    backward(model.candidate, *batch[i].positive, f.c[i], std::move(gc[i]), out.grad.candidate);
  }
  return out;
}

namespace {

double fixed_batch_loss(const RetrieverModel &model, std::span<const TrainPair> pairs,
                        std::size_t batch_size) {
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t start = 0; start + 2 <= pairs.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, pairs.size() - start);
    if (len < 2) break;
    total += contrastive_loss(model, pairs.subspan(start, len)).loss;
    ++n;
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

}  // namespace

TrainResult train(const RetrieverModel &model, std::span<const TrainPair> pairs,
                  const TrainConfig &cfg) {
  if (cfg.batch_size < 2) throw ValidationError("batch_size must be at least 2");
  if (pairs.size() < 2) throw ValidationError("need at least two training pairs");
  if (!(cfg.learning_rate >= 0.0)) throw ValidationError("learning rate must be >= 0");

  TrainResult res{model, {}, {}};
  RetrieverModel &m = res.model;
  auto params = trainable_blocks(m);

  std::vector<std::vector<double>> m1, m2;
  for (auto b : params) {
    m1.emplace_back(b.size(), 0.0);
    m2.emplace_back(b.size(), 0.0);
  }
  std::uint64_t step = 0;

  res.loss_curve.push_back(fixed_batch_loss(m, pairs, cfg.batch_size));
  std::vector<TrainPair> order(pairs.begin(), pairs.end());
  std::vector<TrainPair> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order.assign(pairs.begin(), pairs.end());
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle(order.begin(), order.end(), rng);

    double running = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      if (len < 2) break;
      GradResult g = grad_contrastive(m, std::span(order).subspan(start, len));
      if (!std::isfinite(g.loss.loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch + 1 << " batch " << n_batches + 1
            << " (first query '" << order[start].query->utt_id() << "')";
        throw Error("numeric", msg.str());
      }
      running += g.loss.loss;
      ++n_batches;
      ++step;

      auto grads = trainable_blocks(g.grad);
      const double lr = cfg.learning_rate;
      if (cfg.optimizer == Optimizer::kSgd) {
        for (std::size_t b = 0; b < params.size(); ++b)
          for (std::size_t i = 0; i < params[b].size(); ++i) params[b][i] -= lr * grads[b][i];
      } else {
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        for (std::size_t b = 0; b < params.size(); ++b) {
          for (std::size_t i = 0; i < params[b].size(); ++i) {
            const double gi = grads[b][i];
            m1[b][i] = cfg.beta1 * m1[b][i] + (1.0 - cfg.beta1) * gi;
            m2[b][i] = cfg.beta2 * m2[b][i] + (1.0 - cfg.beta2) * gi * gi;
            params[b][i] -= lr * (m1[b][i] / c1) / (std::sqrt(m2[b][i] / c2) + cfg.epsilon);
          }
        }
      }
    }
    if (!is_finite(m))
      throw Error("numeric", "model became non-finite in epoch " + std::to_string(epoch + 1));
    res.running_loss.push_back(n_batches ? running / static_cast<double>(n_batches) : 0.0);
    res.loss_curve.push_back(fixed_batch_loss(m, pairs, cfg.batch_size));
  }
  return res;
}

std::vector<TrainPair> resolve_pairs(
    std::span<const std::pair<std::string, std::string>> id_pairs,
    const EmbeddingStore &query_store, const EmbeddingStore &candidate_store) {
  std::vector<TrainPair> out;
  out.reserve(id_pairs.size());
  for (const auto &[q, c] : id_pairs) {
    const FrameMatrix *qm = query_store.find(q);
    if (!qm) throw ValidationError("missing query embedding for utterance '" + q + "'");
    const FrameMatrix *cm = candidate_store.find(c);
    if (!cm) throw ValidationError("missing candidate embedding for utterance '" + c + "'");
    out.push_back({qm, cm});
  }
  return out;
}

EncodedPool encode_pool(const RetrieverModel &model, const EmbeddingStore &pool) {
  EncodedPool out;
  out.ids.reserve(pool.size());
  out.vectors.reserve(pool.size());
  for (const auto &m : pool) {
    out.ids.push_back(m.utt_id());
    out.vectors.push_back(encode(model, m, Side::kCandidate));
  }
  return out;
}

RetrievalResult retrieve_topk(const std::string &query_id, std::span<const double> query_vec,
                              const EncodedPool &pool, std::size_t k,
                              const std::optional<std::string> &exclude_speaker,
                              const SpeakerMap &speakers) {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::vector<std::size_t> eligible;
  eligible.reserve(pool.ids.size());
  for (std::size_t i = 0; i < pool.ids.size(); ++i) {
    if (exclude_speaker) {
      auto it = speakers.find(pool.ids[i]);
      if (it == speakers.end())
        throw ValidationError("no speaker known for candidate '" + pool.ids[i] + "'");
      if (it->second == *exclude_speaker) continue;
    }
    eligible.push_back(i);
  }
  if (eligible.empty())
    throw ValidationError("candidate pool is empty for query '" + query_id + "'");

  std::vector<double> scores(pool.ids.size());
  for (std::size_t i : eligible) scores[i] = similarity(query_vec, pool.vectors[i]);

  const std::size_t n = std::min(k, eligible.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return pool.ids[a] < pool.ids[b];
  };
  std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(n),
                    eligible.end(), better);

  RetrievalResult r;
  r.query_id = query_id;
  r.hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    r.hits.push_back({pool.ids[eligible[i]], scores[eligible[i]]});
  return r;
}

RetrievalResult retrieve_topk(const RetrieverModel &model, const FrameMatrix &query,
                              const EmbeddingStore &pool, std::size_t k,
                              const std::optional<std::string> &exclude_speaker,
                              const SpeakerMap &speakers) {
  const auto q = encode(model, query, Side::kQuery);
  return retrieve_topk(query.utt_id(), q, encode_pool(model, pool), k, exclude_speaker, speakers);
}

double same_speaker_proportion(std::span<const RetrievalResult> results,
                               const SpeakerMap &speakers) {
  if (results.empty()) throw ValidationError("no retrieval results");
  auto speaker_of = [&](const std::string &id) -> const std::string & {
    auto it = speakers.find(id);
    if (it == speakers.end()) throw ValidationError("unknown speaker for utterance '" + id + "'");
    return it->second;
  };
  std::size_t same = 0;
  for (const auto &r : results) {
    if (r.hits.empty()) throw ValidationError("empty result for query '" + r.query_id + "'");
    if (speaker_of(r.query_id) == speaker_of(r.hits.front().candidate_id)) ++same;
  }
  return 100.0 * static_cast<double>(same) / static_cast<double>(results.size());
}

std::string format_results(std::span<const RetrievalResult> results) {
  std::string out = "query_id\trank\tcandidate_id\tscore\n";
  for (const auto &r : results) {
    for (std::size_t i = 0; i < r.hits.size(); ++i) {
      out += escape_field(r.query_id) + '\t' + std::to_string(i + 1) + '\t' +
             escape_field(r.hits[i].candidate_id) + '\t' + format_double(r.hits[i].score) + '\n';
    }
  }
  return out;
}

std::vector<RetrievalResult> parse_results_text(std::string_view text) {
  std::vector<RetrievalResult> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (++line_no == 1) {
      if (line != "query_id\trank\tcandidate_id\tscore")
        throw ParseError("bad results header", line_no);
      continue;
    }
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 4)
      throw ParseError("expected 4 columns, found " + std::to_string(cols.size()), line_no);
    std::size_t rank = 0;
    double score = 0.0;
    auto r1 = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), rank);
    auto r2 = std::from_chars(cols[3].data(), cols[3].data() + cols[3].size(), score);
    if (r1.ec != std::errc() || r1.ptr != cols[1].data() + cols[1].size())
      throw ParseError("bad rank", line_no);
    if (r2.ec != std::errc() || r2.ptr != cols[3].data() + cols[3].size())
      throw ParseError("bad score", line_no);
    std::string qid, cid;
    try {
      qid = unescape_field(cols[0]);
      cid = unescape_field(cols[2]);
    } catch (const ParseError &e) {
      throw ParseError(e.what(), line_no);
    }
    if (rank == 1) out.push_back({qid, {}});
    if (out.empty() || out.back().query_id != qid || out.back().hits.size() + 1 != rank)
      throw ParseError("ranks must run 1..n contiguously per query", line_no);
    out.back().hits.push_back({std::move(cid), score});
  }
  return out;
}

std::vector<RetrievalResult> read_results(const std::filesystem::path &path) {
  return parse_results_text(read_file(path));
}

namespace {

template <typename T>
void put(std::string &out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class ModelReader {
 public:
  explicit ModelReader(std::string_view b) : b_(b) {}
  template <typename T>
  T get(const char *what) {
    if (b_.size() - pos_ < sizeof(T)) throw FormatError(std::string("truncated ") + what, pos_);
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == b_.size(); }

 private:
  std::string_view b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const RetrieverModel &model) {
  std::string out(kModelMagic, 4);
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.input_dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.output_dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.query.layers.size()));
  for (Side s : {Side::kQuery, Side::kCandidate}) {
    const auto &side = model.side(s);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(side.modality));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(side.pooling));
    put<std::uint8_t>(out, side.train_pooler ? 1 : 0);
  }
  for (Side s : {Side::kQuery, Side::kCandidate}) {
    const auto &side = model.side(s);
    for (const auto &l : side.layers)
      for (double v : l.data) put<float>(out, static_cast<float>(v));
    if (side.pooling == Pooling::kAttention)
      for (double v : side.pooler.query) put<float>(out, static_cast<float>(v));
  }
  return out;
}

RetrieverModel deserialize_model(std::string_view bytes) {
  ModelReader r(bytes);
  if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kModelMagic, 4))
    throw FormatError("bad magic, expected RDKM", 0);
  r.get<std::uint32_t>("magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kModelVersion)
    throw FormatError("unsupported version " + std::to_string(version), 4);
  const std::size_t d = r.get<std::uint32_t>("input dim");
  const std::size_t k = r.get<std::uint32_t>("output dim");
  const std::size_t depth = r.get<std::uint32_t>("depth");
  if (d == 0 || k == 0 || depth == 0) throw FormatError("zero model dimension", 8);

  RetrieverModel m;
  for (Side s : {Side::kQuery, Side::kCandidate}) {
    auto &side = m.side(s);
    const auto at = r.pos();
    const auto modality = r.get<std::uint8_t>("modality");
    const auto pooling = r.get<std::uint8_t>("pooling");
    const auto train_pooler = r.get<std::uint8_t>("pooler flag");
    if (modality > 1 || pooling > 1 || train_pooler > 1)
      throw FormatError("bad side descriptor", at);
    side.modality = static_cast<Modality>(modality);
    side.pooling = static_cast<Pooling>(pooling);
    side.train_pooler = train_pooler != 0;
  }
  for (Side s : {Side::kQuery, Side::kCandidate}) {
    auto &side = m.side(s);
    for (std::size_t l = 0; l < depth; ++l) {
      Matrix w(k, l == 0 ? d : k);
      for (double &v : w.data) {
        const auto at = r.pos();
        const float f = r.get<float>("matrix payload");
        if (!std::isfinite(f)) throw FormatError("non-finite model parameter", at);
        v = f;
      }
      side.layers.push_back(std::move(w));
    }
    if (side.pooling == Pooling::kAttention) {
      side.pooler.query.resize(d);
      for (double &v : side.pooler.query) {
        const auto at = r.pos();
        const float f = r.get<float>("pooler payload");
        if (!std::isfinite(f)) throw FormatError("non-finite pooler parameter", at);
        v = f;
      }
    }
  }
  if (!r.at_end()) throw FormatError("trailing bytes after model", r.pos());
  return m;
}

void write_model(const RetrieverModel &model, const std::filesystem::path &path) {
  write_file_atomic(path, serialize_model(model));
}

RetrieverModel read_model(const std::filesystem::path &path) {
  return deserialize_model(read_file(path));
}

}  // namespace rwd
