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

#ifndef NERKIT_TRAINER_HPP_
#define NERKIT_TRAINER_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "nerkit/checkpoint.hpp"
#include "nerkit/corpus.hpp"
#include "nerkit/model.hpp"
#include "nerkit/vocab.hpp"

namespace nerkit {

// Optimization hyperparameters. Two documented profiles:
//  - toy (default): lr 1e-3, batch 32, 50 epochs — trains the small
//    from-scratch encoder from random init in reasonable time.
//  - finetune: lr 2e-5, batch 32, 10 epochs — the rates typical for
//    fine-tuning large pretrained encoders; far too slow for random init,
//    kept selectable for parity with that setting.
struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 50;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::optional<double> clip_norm = 1.0;  // global-norm clip; nullopt disables
  std::uint64_t seed = 42;
  double dropout = 0.1;
  int threads = 1;

  static TrainConfig toy_profile();
  static TrainConfig finetune_profile();

  void validate() const;  // throws std::invalid_argument
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> dev_f1;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 1-based; dev macro-F1 argmax (ties earliest),
                       // final epoch when no dev set is given
  std::optional<double> best_dev_f1;
};

// Shuffles sentences with the seeded RNG, groups them into batches of at
// most batch_size, and pads each batch to its own max length (pad id 0,
// mask 0). Every sentence appears in exactly one batch. Throws on untagged
// or overlong sentences.
std::vector<Batch> make_batches(const Corpus& corpus, const Vocabulary& vocab,
                                int batch_size, int max_len,
                                std::uint64_t seed);

// First and second Adam moments, shaped like the parameters.
struct AdamState {
  Gradients m;
  Gradients v;
  std::int64_t step = 0;

  static AdamState init(const ModelParams& params);
};

// One bias-corrected Adam update, in place. Global-norm clipping (when
// configured) applies to the incoming gradients first. Throws on
// non-finite gradients.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

struct TrainResult {
  Checkpoint checkpoint;
  TrainReport report;
};

// Full training loop: shuffled mini-batch Adam on the mean cross-entropy,
// per-epoch dev evaluation (span-level macro-F1), best-epoch checkpoint.
// The vocabulary is built from the training corpus; model_config.vocab_size
// is overwritten accordingly. Deterministic given the two seeds: identical
// runs produce byte-identical checkpoints.
TrainResult train(const ModelConfig& model_config,
                  const TrainConfig& train_config, const Corpus& train_corpus,
                  const Corpus* dev_corpus = nullptr);

}  // namespace nerkit

#endif  // NERKIT_TRAINER_HPP_
