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

#ifndef NERKIT_MODEL_HPP_
#define NERKIT_MODEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nerkit/bio.hpp"
#include "nerkit/corpus.hpp"
#include "nerkit/vocab.hpp"

namespace nerkit {

// All internal math runs in double precision. Checkpoints store float32;
// the precision only matters in memory, where the analytic-vs-numeric
// gradient comparison needs the headroom.
using Matrix = Eigen::MatrixXd;

// Encoder and classifier hyperparameters. The label count is fixed by the
// closed tag set.
struct ModelConfig {
  int vocab_size = 0;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int d_ff = 128;
  int max_len = 128;
  int n_labels = static_cast<int>(kNumLabels);
  std::uint64_t seed = 42;

  int head_dim() const { return d_model / n_heads; }
  void validate() const;  // throws std::invalid_argument
};

// One pre-layer-norm encoder layer. Attention projections are bias-free;
// the position-wise feedforward is affine. Every trainable tensor is a
// Matrix (vectors are stored 1 x d) so that iteration, serialization and
// optimizer state all share one shape vocabulary.
struct LayerParams {
  Matrix ln1_scale, ln1_offset;  // 1 x d
  Matrix wq, wk, wv, wo;         // d x d, head columns packed side by side
  Matrix ln2_scale, ln2_offset;  // 1 x d
  Matrix w1, b1;                 // d x d_ff, 1 x d_ff
  Matrix w2, b2;                 // d_ff x d, 1 x d
};

struct ModelParams {
  Matrix embedding;              // vocab x d
  std::vector<LayerParams> layers;
  Matrix lnf_scale, lnf_offset;  // 1 x d, final layer norm
  Matrix head_w, head_b;         // d x n_labels, 1 x n_labels

  std::size_t parameter_count() const;
};

// Gradients mirror the parameter shapes exactly.
using Gradients = ModelParams;

// (name, tensor) pairs in declaration order — the canonical iteration order
// for checkpoints, optimizer state and gradient reductions.
std::vector<std::pair<std::string, Matrix*>> tensor_list(ModelParams& params);
std::vector<std::pair<std::string, const Matrix*>> tensor_list(
    const ModelParams& params);

// Closed-form parameter count; matches ModelParams::parameter_count() for
// params built from the same config.
std::size_t parameter_count(const ModelConfig& config);

// Xavier-uniform weights, zero biases, unit/zero layer-norm scale/offset.
// Bit-identical for identical (config, seed).
ModelParams init_params(const ModelConfig& config);

// All-zero parameter set with the shapes the config dictates.
ModelParams zeros_params(const ModelConfig& config);

ModelParams zeros_like(const ModelParams& params);

// Sinusoidal position table, n x d: even columns sin, odd columns cos.
Matrix position_encoding(int n, int d);

// One row of contextualized width-d_model state per input position.
struct EncoderOutput {
  Matrix hidden;  // n x d_model
};

// Per-token probability rows over the 13 labels; each row sums to 1.
struct ProbDistribution {
  Matrix rows;  // n x n_labels
};

// Pre-layer-norm transformer encoder forward pass (inference mode, no
// dropout). Masked positions contribute -inf attention logits as keys, so
// they never influence unmasked outputs. Requires at least one unmasked
// position; token ids must lie in [0, vocab_size).
EncoderOutput encode(const ModelConfig& config, const ModelParams& params,
                     const std::vector<int>& token_ids,
                     const std::vector<std::uint8_t>& mask);

struct ClassifierOutput {
  Matrix logits;  // n x n_labels
  ProbDistribution probs;
};

// Affine head per position, then numerically stable softmax (row-max
// subtracted before exponentiation).
ClassifierOutput classify(const ModelConfig& config, const ModelParams& params,
                          const EncoderOutput& hidden);

// Per-token argmax over the label distribution; ties break toward the
// lowest label id. No transition constraints: the output may violate BIO
// and is repaired downstream before span extraction.
std::vector<BioTag> predict(const ModelConfig& config,
                            const ModelParams& params,
                            const Sentence& sentence, const Vocabulary& vocab);

// Mean over unmasked positions of -log softmax(logits)[gold]. Throws when
// every position is masked.
double cross_entropy(const Matrix& logits, const std::vector<int>& gold,
                     const std::vector<std::uint8_t>& mask);

// Padded batch: rows are independent sentences of equal padded length.
// Pad positions carry mask 0 and never affect the loss or the gradients.
struct Batch {
  std::vector<std::vector<int>> token_ids;
  std::vector<std::vector<std::uint8_t>> mask;
  std::vector<std::vector<int>> gold;  // label ids; ignored where mask is 0

  std::size_t rows() const { return token_ids.size(); }
  std::size_t unmasked_count() const;
  void validate(const ModelConfig& config) const;
};

struct BackwardOptions {
  double dropout = 0.0;            // forced off for gradient checks
  std::uint64_t dropout_seed = 0;  // per-sentence masks derive from this
  int threads = 1;                 // reduction order is fixed regardless
};

struct BackwardResult {
  double loss = 0.0;
  Gradients grads;
};

// Loss plus exact analytic gradients of the batch-mean cross-entropy with
// respect to every parameter tensor. Deterministic for fixed inputs and
// options; per-sentence contributions are reduced in row order no matter
// how many threads run. Throws std::runtime_error naming the tensor if a
// gradient turns non-finite.
BackwardResult backward(const ModelConfig& config, const ModelParams& params,
                        const Batch& batch,
                        const BackwardOptions& options = {});

// Dropout-free batch loss; the finite-difference oracle differentiates this.
double batch_loss(const ModelConfig& config, const ModelParams& params,
                  const Batch& batch);

}  // namespace nerkit

#endif  // NERKIT_MODEL_HPP_
