// Copyright 2026 The nerkit Authors
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

#include "nerkit/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nerkit/eval.hpp"
#include "nerkit/rng.hpp"

namespace nerkit {

TrainConfig TrainConfig::toy_profile() { return TrainConfig{}; }

TrainConfig TrainConfig::finetune_profile() {
  TrainConfig c;
  c.learning_rate = 2e-5;
  c.batch_size = 32;
  c.epochs = 10;
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("batch_size must be at least 1");
  }
  if (epochs < 1) {
    throw std::invalid_argument("epochs must be at least 1");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) {
    throw std::invalid_argument("adam_eps must be positive");
  }
  if (clip_norm && !(*clip_norm > 0.0)) {
    throw std::invalid_argument("clip_norm must be positive when set");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw std::invalid_argument("dropout must lie in [0, 1)");
  }
  if (threads < 1) {
    throw std::invalid_argument("threads must be at least 1");
  }
}

std::vector<Batch> make_batches(const Corpus& corpus, const Vocabulary& vocab,
                                int batch_size, int max_len,
                                std::uint64_t seed) {
  if (batch_size < 1) {
    throw std::invalid_argument("batch_size must be at least 1");
  }
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const Sentence& sent = corpus.sentences[s];
    if (!sent.tagged()) {
      throw std::invalid_argument("sentence " + std::to_string(s) +
                                  " is untagged");
    }
    if (sent.size() > static_cast<std::size_t>(max_len)) {
      throw std::invalid_argument(
          "sentence " + std::to_string(s) + " has " +
          std::to_string(sent.size()) + " tokens, exceeding max_len " +
          std::to_string(max_len));
    }
  }

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<Batch> batches;
  for (std::size_t begin = 0; begin < order.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
    std::size_t width = 0;
    for (std::size_t i = begin; i < end; ++i) {
      width = std::max(width, corpus.sentences[order[i]].size());
    }
    Batch batch;
    for (std::size_t i = begin; i < end; ++i) {
      const Sentence& sent = corpus.sentences[order[i]];
      std::vector<int> ids = vocab.encode(sent.tokens);
      std::vector<std::uint8_t> mask(sent.size(), 1);
      std::vector<int> gold;
      gold.reserve(sent.size());
      for (const BioTag& tag : *sent.tags) {
        gold.push_back(tag.id());
      }
      ids.resize(width, Vocabulary::kPadId);
      mask.resize(width, 0);
      gold.resize(width, 0);
      batch.token_ids.push_back(std::move(ids));
      batch.mask.push_back(std::move(mask));
      batch.gold.push_back(std::move(gold));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

AdamState AdamState::init(const ModelParams& params) {
  AdamState state;
  state.m = zeros_like(params);
  state.v = zeros_like(params);
  state.step = 0;
  return state;
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  auto p_list = tensor_list(params);
  const auto g_list = tensor_list(grads);
  auto m_list = tensor_list(state.m);
  auto v_list = tensor_list(state.v);
  if (p_list.size() != g_list.size()) {
    throw std::invalid_argument("gradient/parameter tensor count mismatch");
  }

  double sq_norm = 0.0;
  for (std::size_t t = 0; t < g_list.size(); ++t) {
    if (p_list[t].second->rows() != g_list[t].second->rows() ||
        p_list[t].second->cols() != g_list[t].second->cols()) {
      throw std::invalid_argument("gradient shape mismatch in tensor " +
                                  g_list[t].first);
    }
    if (!g_list[t].second->allFinite()) {
      throw std::runtime_error("non-finite gradient in tensor " +
                               g_list[t].first);
    }
    sq_norm += g_list[t].second->squaredNorm();
  }
  double grad_scale = 1.0;
  if (config.clip_norm) {
    const double norm = std::sqrt(sq_norm);
    if (norm > *config.clip_norm) {
      grad_scale = *config.clip_norm / norm;
    }
  }

  state.step += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < p_list.size(); ++t) {
    const Matrix g = *g_list[t].second * grad_scale;
    Matrix& m = *m_list[t].second;
    Matrix& v = *v_list[t].second;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    const Matrix m_hat = m / bias1;
    const Matrix v_hat = v / bias2;
    p_list[t].second->array() -=
        config.learning_rate * m_hat.array() /
        (v_hat.array().sqrt() + config.adam_eps);
  }
}

namespace {

Corpus predict_corpus(const ModelConfig& config, const ModelParams& params,
                      const Vocabulary& vocab, const Corpus& corpus) {
  Corpus out = corpus;
  for (Sentence& sent : out.sentences) {
    sent.tags = predict(config, params, sent, vocab);
  }
  return out;
}

}  // namespace

TrainResult train(const ModelConfig& model_config,
                  const TrainConfig& train_config, const Corpus& train_corpus,
                  const Corpus* dev_corpus) {
  train_config.validate();
  if (train_corpus.empty()) {
    throw std::invalid_argument("empty training corpus");
  }

  const Vocabulary vocab = Vocabulary::build(train_corpus);
  ModelConfig config = model_config;
  config.vocab_size = static_cast<int>(vocab.size());
  config.validate();

  ModelParams params = init_params(config);
  AdamState adam = AdamState::init(params);

  TrainReport report;
  ModelParams best_params = params;
  double best_f1 = -1.0;
  int best_epoch = 0;

  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const std::vector<Batch> batches =
        make_batches(train_corpus, vocab, train_config.batch_size,
                     config.max_len, derive_seed(train_config.seed,
                                                 static_cast<std::uint64_t>(epoch)));
    double loss_sum = 0.0;
    std::size_t token_count = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      BackwardOptions options;
      options.dropout = train_config.dropout;
      options.dropout_seed = derive_seed(
          derive_seed(train_config.seed, 0x647267ULL + epoch), b);
      options.threads = train_config.threads;
      const BackwardResult res = backward(config, params, batches[b], options);
      adam_step(params, res.grads, adam, train_config);
      const std::size_t tokens = batches[b].unmasked_count();
      loss_sum += res.loss * static_cast<double>(tokens);
      token_count += tokens;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(token_count);
    if (dev_corpus != nullptr) {
      const Corpus pred = predict_corpus(config, params, vocab, *dev_corpus);
      stats.dev_f1 = score(*dev_corpus, pred).macro_f1;
      if (*stats.dev_f1 > best_f1) {
        best_f1 = *stats.dev_f1;
        best_epoch = epoch;
        best_params = params;
      }
    }
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    report.epochs.push_back(stats);
  }

  if (dev_corpus == nullptr) {
    best_params = params;
    best_epoch = train_config.epochs;
  } else {
    report.best_dev_f1 = best_f1;
  }
  report.best_epoch = best_epoch;

  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.vocab = vocab;
  ckpt.tags.assign(tag_names().begin(), tag_names().end());
  ckpt.params = std::move(best_params);
  return {std::move(ckpt), std::move(report)};
}

}  // namespace nerkit
