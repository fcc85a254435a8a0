// src/tiny_neural.cc

// Copyright 2026 The labelseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "labelseq/tiny_neural.h"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "autodiff.h"
#include "labelseq/error.h"
#include "labelseq/rng.h"

namespace labelseq {

using nn::Mat;
using nn::Tape;

namespace {

constexpr std::string_view kCheckpointFormat = "labelseq-tiny-neural/1";
constexpr double kPositionScale = 0.3;

enum Tensor : size_t {
  kEmbed, kOutProj, kOutBias,
  kEncQ, kEncK, kEncV, kEncO, kEncW1, kEncB1, kEncW2, kEncB2,
  kDecQ, kDecK, kDecV, kDecO,
  kCrossQ, kCrossK, kCrossV, kCrossO,
  kDecW1, kDecB1, kDecW2, kDecB2,
  kTensorCount
};

constexpr const char *kTensorNames[kTensorCount] = {
    "embed", "out_proj", "out_bias",
    "enc_q", "enc_k", "enc_v", "enc_o", "enc_w1", "enc_b1", "enc_w2", "enc_b2",
    "dec_q", "dec_k", "dec_v", "dec_o",
    "cross_q", "cross_k", "cross_v", "cross_o",
    "dec_w1", "dec_b1", "dec_w2", "dec_b2"};

Mat positions(size_t n, size_t d) {
  Mat pe(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (size_t p = 0; p < n; ++p)
    for (size_t i = 0; i < d; ++i) {
      const double rate = std::pow(10000.0, static_cast<double>(i - i % 2) /
                                                static_cast<double>(d));
      const double a = static_cast<double>(p) / rate;
      pe(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
          kPositionScale * (i % 2 == 0 ? std::sin(a) : std::cos(a));
    }
  return pe;
}

}  // namespace

struct TinyNeuralModel::Weights {
  std::vector<Mat> t;

  static Weights zeros_like(const Weights &w) {
    Weights z;
    for (const auto &m : w.t) z.t.push_back(Mat::Zero(m.rows(), m.cols()));
    return z;
  }
};

// Forward pass shared by scoring and training.
struct TinyNeuralAccess {
  using Weights = TinyNeuralModel::Weights;

  static Tape::Var attention(Tape &tape, const std::vector<Tape::Var> &p,
                             size_t q, Tape::Var from, Tape::Var to,
                             bool causal, double inv_sqrt_d) {
    auto Q = tape.matmul(from, p[q]);
    auto K = tape.matmul(to, p[q + 1]);
    auto V = tape.matmul(to, p[q + 2]);
    auto A = tape.softmax_rows(tape.scale(tape.matmul_nt(Q, K), inv_sqrt_d), causal);
    return tape.add(from, tape.matmul(tape.matmul(A, V), p[q + 3]));
  }

  static Tape::Var feed_forward(Tape &tape, const std::vector<Tape::Var> &p,
                                size_t w1, Tape::Var x) {
    auto h = tape.tanh(tape.add_row(tape.matmul(x, p[w1]), p[w1 + 1]));
    return tape.add(x, tape.add_row(tape.matmul(h, p[w1 + 2]), p[w1 + 3]));
  }

  // Log-probs for every decoder position: row j predicts the token after
  // dec_ids[0..j].
  static Tape::Var forward(const TinyNeuralModel &m, Tape &tape,
                           const Weights &w, Weights *grads,
                           const std::vector<int> &enc_ids,
                           const std::vector<int> &dec_ids) {
    const size_t d = m.config_.width;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Tape::Var> p;
    for (size_t i = 0; i < kTensorCount; ++i)
      p.push_back(tape.param(w.t[i], grads ? &grads->t[i] : nullptr));

    auto enc = tape.add(tape.gather_rows(p[kEmbed], enc_ids),
                        tape.constant(positions(enc_ids.size(), d)));
    enc = attention(tape, p, kEncQ, enc, enc, false, inv_sqrt_d);
    enc = feed_forward(tape, p, kEncW1, enc);

    auto dec = tape.add(tape.gather_rows(p[kEmbed], dec_ids),
                        tape.constant(positions(dec_ids.size(), d)));
    dec = attention(tape, p, kDecQ, dec, dec, true, inv_sqrt_d);
    dec = attention(tape, p, kCrossQ, dec, enc, false, inv_sqrt_d);
    dec = feed_forward(tape, p, kDecW1, dec);

    auto logits = tape.add_row(tape.matmul_nt(dec, p[kOutProj]), p[kOutBias]);
    return tape.log_softmax_rows(logits, m.excluded_);
  }
};

TinyNeuralModel::TinyNeuralModel(Vocab vocab, const TinyNeuralConfig &config,
                                 std::string identifier)
    : vocab_(std::move(vocab)),
      config_(config),
      identifier_(std::move(identifier)),
      weights_(std::make_shared<Weights>()) {
  if (config_.width < 2 || config_.width > 64)
    throw UsageError("tiny-neural width must be in [2, 64]");
  if (config_.ffn < 1) throw UsageError("tiny-neural ffn size must be positive");
  const auto V = static_cast<Eigen::Index>(vocab_.size());
  const auto d = static_cast<Eigen::Index>(config_.width);
  const auto f = static_cast<Eigen::Index>(config_.ffn);
  SplitMix64 rng(config_.seed);
  auto normal = [&](Eigen::Index r, Eigen::Index c, double std) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = std * config_.init_scale * rng.normal();
    return m;
  };
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  auto &t = weights_->t;
  t.resize(kTensorCount);
  t[kEmbed] = normal(V, d, 0.3);
  t[kOutProj] = normal(V, d, 0.3);
  t[kOutBias] = Mat::Zero(1, V);
  for (size_t q : {kEncQ, kDecQ, kCrossQ})
    for (size_t i = 0; i < 4; ++i) t[q + i] = normal(d, d, sd);
  for (size_t w1 : {kEncW1, kDecW1}) {
    t[w1] = normal(d, f, sd);
    t[w1 + 1] = Mat::Zero(1, f);
    t[w1 + 2] = normal(f, d, 0.5 / std::sqrt(static_cast<double>(f)));
    t[w1 + 3] = Mat::Zero(1, d);
  }
  excluded_.assign(vocab_.size(), false);
  for (TokenId id : {vocab_.specials().pad, vocab_.specials().mask, vocab_.specials().unk})
    if (id >= 0) excluded_[static_cast<size_t>(id)] = true;
}

std::vector<int> TinyNeuralModel::encode_input(const RenderedInput &input) const {
  std::vector<int> ids;
  for (const auto &w : split_words(input.text)) {
    auto id = vocab_.find(w);
    ids.push_back(id ? *id : vocab_.specials().unk >= 0 ? vocab_.specials().unk
                                                        : vocab_.specials().pad);
  }
  if (ids.empty()) ids.push_back(vocab_.specials().mask);
  return ids;
}

std::vector<double> TinyNeuralModel::next_token_logprobs(
    const RenderedInput &input, std::span<const TokenId> prefix) const {
  const TokenSeq p(prefix.begin(), prefix.end());
  return next_token_logprobs_batch(input, std::span<const TokenSeq>(&p, 1)).front();
}

std::vector<std::vector<double>> TinyNeuralModel::next_token_logprobs_batch(
    const RenderedInput &input, std::span<const TokenSeq> prefixes) const {
  const auto enc_ids = encode_input(input);
  std::vector<std::vector<double>> out;
  out.reserve(prefixes.size());
  for (const auto &prefix : prefixes) {
    vocab_.check_ids(prefix);
    std::vector<int> dec{vocab_.specials().pad};
    dec.insert(dec.end(), prefix.begin(), prefix.end());
    Tape tape(false);
    auto lp = TinyNeuralAccess::forward(*this, tape, *weights_, nullptr, enc_ids, dec);
    const Mat &v = tape.value(lp);
    const auto last = v.rows() - 1;
    std::vector<double> row(vocab_.size());
    for (size_t i = 0; i < row.size(); ++i) row[i] = v(last, static_cast<Eigen::Index>(i));
    out.push_back(std::move(row));
  }
  return out;
}

double TinyNeuralModel::sequence_logprob(const RenderedInput &input,
                                         std::span<const TokenId> target) const {
  check_target(target);
  std::vector<int> dec{vocab_.specials().pad};
  dec.insert(dec.end(), target.begin(), target.end() - 1);
  Tape tape(false);
  auto lp = TinyNeuralAccess::forward(*this, tape, *weights_, nullptr,
                                      encode_input(input), dec);
  const Mat &v = tape.value(lp);
  double total = 0.0;
  for (size_t j = 0; j < target.size(); ++j)
    total += v(static_cast<Eigen::Index>(j), target[j]);
  return total;
}

std::unique_ptr<LanguageModel> TinyNeuralModel::clone() const {
  return std::make_unique<TinyNeuralModel>(*this);
}

double TinyNeuralModel::loss_and_gradient(std::span<const TrainingPair> pairs,
                                          std::vector<double> *gradient) const {
  if (pairs.empty()) throw UsageError("loss over an empty set of pairs");
  size_t tokens = 0;
  for (const auto &p : pairs) {
    if (p.target.empty()) throw DataError("label sequence must be non-empty");
    vocab_.check_ids(p.target);
    tokens += p.target.size() + 1;
  }
  Weights grads = Weights::zeros_like(*weights_);
  double total = 0.0;
  for (const auto &p : pairs) {
    std::vector<int> dec{vocab_.specials().pad};
    dec.insert(dec.end(), p.target.begin(), p.target.end());
    std::vector<int> labels(p.target.begin(), p.target.end());
    labels.push_back(vocab_.specials().eos);
    Tape tape(gradient != nullptr);
    auto lp = TinyNeuralAccess::forward(*this, tape, *weights_,
                                        gradient ? &grads : nullptr,
                                        encode_input(p.input), dec);
    auto nll = tape.pick_sum(lp, labels);
    total -= tape.value(nll)(0, 0);
    if (gradient) tape.backward(nll, -1.0 / static_cast<double>(tokens));
  }
  if (gradient) {
    gradient->clear();
    for (const auto &m : grads.t)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) gradient->push_back(m(i, j));
  }
  return total / static_cast<double>(tokens);
}

double TinyNeuralModel::loss(std::span<const TrainingPair> pairs) const {
  return loss_and_gradient(pairs, nullptr);
}

double TinyNeuralModel::train_step(std::span<const TrainingPair> batch,
                                   double learning_rate) {
  std::vector<double> g;
  const double l = loss_and_gradient(batch, &g);
  if (weights_.use_count() > 1) weights_ = std::make_shared<Weights>(*weights_);
  if (!adam_m_) {
    adam_m_ = std::make_shared<Weights>(Weights::zeros_like(*weights_));
    adam_v_ = std::make_shared<Weights>(Weights::zeros_like(*weights_));
  } else {
    if (adam_m_.use_count() > 1) adam_m_ = std::make_shared<Weights>(*adam_m_);
    if (adam_v_.use_count() > 1) adam_v_ = std::make_shared<Weights>(*adam_v_);
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++adam_step_;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_step_));
  size_t k = 0;
  for (size_t t = 0; t < kTensorCount; ++t) {
    Mat &w = weights_->t[t];
    Mat &m = adam_m_->t[t];
    Mat &v = adam_v_->t[t];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j, ++k) {
        const double gk = g[k];
        m(i, j) = b1 * m(i, j) + (1 - b1) * gk;
        v(i, j) = b2 * v(i, j) + (1 - b2) * gk * gk;
        w(i, j) -= learning_rate * (m(i, j) / c1) / (std::sqrt(v(i, j) / c2) + eps);
      }
  }
  return l;
}

std::vector<double> TinyNeuralModel::parameters() const {
  std::vector<double> flat;
  for (const auto &m : weights_->t)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

void TinyNeuralModel::set_parameters(const std::vector<double> &flat) {
  size_t n = 0;
  for (const auto &m : weights_->t) n += static_cast<size_t>(m.size());
  if (flat.size() != n)
    throw UsageError("expected " + std::to_string(n) + " parameters, got " +
                     std::to_string(flat.size()));
  auto fresh = std::make_shared<Weights>(*weights_);
  size_t k = 0;
  for (auto &m : fresh->t)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = flat[k++];
  weights_ = std::move(fresh);
}

void TinyNeuralModel::save(const std::string &path) const {
  nlohmann::json doc;
  doc["format"] = kCheckpointFormat;
  doc["identifier"] = identifier_;
  doc["width"] = config_.width;
  doc["ffn"] = config_.ffn;
  doc["seed"] = config_.seed;
  doc["tokens"] = vocab_.tokens();
  doc["specials"] = {{"pad", vocab_.specials().pad},
                     {"eos", vocab_.specials().eos},
                     {"mask", vocab_.specials().mask},
                     {"unk", vocab_.specials().unk}};
  nlohmann::json params = nlohmann::json::object();
  for (size_t t = 0; t < kTensorCount; ++t) {
    const Mat &m = weights_->t[t];
    std::vector<double> data;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    params[kTensorNames[t]] = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
  }
  doc["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  out << doc.dump() << '\n';
  if (!out) throw DataError("failed writing checkpoint '" + path + "'");
}

TinyNeuralModel TinyNeuralModel::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  try {
    nlohmann::json doc;
    in >> doc;
    if (doc.value("format", std::string()) != kCheckpointFormat)
      throw DataError(path + ": not a tiny-neural checkpoint (expected format '" +
                      std::string(kCheckpointFormat) + "')");
    SpecialIds sp;
    sp.pad = doc.at("specials").at("pad").get<TokenId>();
    sp.eos = doc.at("specials").at("eos").get<TokenId>();
    sp.mask = doc.at("specials").at("mask").get<TokenId>();
    sp.unk = doc.at("specials").value("unk", -1);
    TinyNeuralConfig cfg;
    cfg.width = doc.at("width").get<size_t>();
    cfg.ffn = doc.at("ffn").get<size_t>();
    cfg.seed = doc.value("seed", uint64_t{0});
    TinyNeuralModel model(Vocab(doc.at("tokens").get<std::vector<std::string>>(), sp),
                          cfg, doc.value("identifier", std::string("tiny-neural")));
    for (size_t t = 0; t < kTensorCount; ++t) {
      const auto &p = doc.at("params").at(kTensorNames[t]);
      Mat &m = model.weights_->t[t];
      if (p.at("rows").get<Eigen::Index>() != m.rows() ||
          p.at("cols").get<Eigen::Index>() != m.cols())
        throw DataError(path + ": tensor '" + kTensorNames[t] + "' has the wrong shape");
      const auto data = p.at("data").get<std::vector<double>>();
      if (data.size() != static_cast<size_t>(m.size()))
        throw DataError(path + ": tensor '" + kTensorNames[t] + "' has the wrong size");
      size_t k = 0;
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = data[k++];
    }
    return model;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(path + ": malformed checkpoint: " + e.what());
  }
}

Vocab build_word_vocab(const std::vector<std::string> &texts) {
  std::vector<std::string> words;
  for (const auto &t : texts)
    for (auto &w : split_words(t)) words.push_back(std::move(w));
  return Vocab::with_specials(words);
}

}  // namespace labelseq
