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

#include "nerkit/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "nerkit/rng.hpp"

namespace nerkit {

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
}

// d/dx [x * Phi(x)] = Phi(x) + x * phi(x) for the standard normal Phi, phi.
double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf =
      std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  return cdf + x * pdf;
}

// Row-wise stable softmax; -inf entries turn into exact zeros.
void softmax_rows_inplace(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).maxCoeff();
    m.row(i) = (m.row(i).array() - mx).exp();
    m.row(i) /= m.row(i).sum();
  }
}

double log_sum_exp_row(const Matrix& m, Eigen::Index i) {
  const double mx = m.row(i).maxCoeff();
  return mx + std::log((m.row(i).array() - mx).exp().sum());
}

struct LayerNormCache {
  Matrix normalized;        // n x d
  Eigen::VectorXd inv_std;  // n
};

Matrix layer_norm(const Matrix& x, const Matrix& scale, const Matrix& offset,
                  LayerNormCache* cache) {
  const Eigen::VectorXd mean = x.rowwise().mean();
  Matrix centered = x.colwise() - mean;
  const Eigen::VectorXd var = centered.array().square().rowwise().mean();
  const Eigen::VectorXd inv_std = (var.array() + kLayerNormEps).rsqrt();
  Matrix normalized = centered;
  normalized.array().colwise() *= inv_std.array();
  Matrix out = normalized;
  out.array().rowwise() *= scale.row(0).array();
  out.array().rowwise() += offset.row(0).array();
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = inv_std;
  }
  return out;
}

// Accumulates dscale/doffset and returns dx. Per-row derivation of
// y = scale * (x - mean) / sqrt(var + eps) + offset.
Matrix layer_norm_backward(const Matrix& dy, const LayerNormCache& cache,
                           const Matrix& scale, Matrix& dscale,
                           Matrix& doffset) {
  dscale.row(0).array() +=
      (dy.array() * cache.normalized.array()).colwise().sum();
  doffset.row(0).array() += dy.array().colwise().sum();
  Matrix dxhat = dy;
  dxhat.array().rowwise() *= scale.row(0).array();
  const Eigen::VectorXd m1 = dxhat.rowwise().mean();
  const Eigen::VectorXd m2 =
      (dxhat.array() * cache.normalized.array()).rowwise().mean();
  Matrix dx = dxhat;
  dx.colwise() -= m1;
  dx.array() -= cache.normalized.array().colwise() * m2.array();
  dx.array().colwise() *= cache.inv_std.array();
  return dx;
}

// Entries are 0 (dropped) or 1/(1-p); row-major draw order.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  Matrix m(rows, cols);
  const double keep_scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.next_double() < p ? 0.0 : keep_scale;
    }
  }
  return m;
}

struct LayerCache {
  LayerNormCache ln1;
  Matrix ln1_out;           // n x d
  Matrix q, k, v;           // n x d, head columns packed
  std::vector<Matrix> attn; // per head, n x n softmax rows
  Matrix o_cat;             // n x d
  Matrix attn_drop;         // n x d; empty when dropout is off
  Matrix x_mid;             // after the attention residual
  LayerNormCache ln2;
  Matrix ln2_out;           // n x d
  Matrix ffn_pre;           // n x d_ff, before GELU
  Matrix ffn_act;           // n x d_ff
  Matrix ffn_drop;          // n x d; empty when dropout is off
  Matrix x_out;
};

struct ForwardCache {
  Matrix emb_drop;          // empty when dropout is off
  Matrix x0;                // encoder input after embedding (+dropout)
  std::vector<LayerCache> layers;
  LayerNormCache lnf;
  Matrix hidden;            // n x d
};

// Shared forward pass. `dropout` > 0 requires `rng`; `cache` may be null
// for inference. Masked positions are excluded from attention as keys only;
// their own rows still flow through (and are ignored downstream).
Matrix forward_sentence(const ModelConfig& config, const ModelParams& params,
                        const std::vector<int>& ids,
                        const std::vector<std::uint8_t>& mask, double dropout,
                        Rng* rng, ForwardCache* cache) {
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index d = config.d_model;
  const int heads = config.n_heads;
  const Eigen::Index dh = config.head_dim();
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = params.embedding.row(ids[static_cast<std::size_t>(i)]);
  }
  x += position_encoding(static_cast<int>(n), static_cast<int>(d));
  if (dropout > 0.0) {
    Matrix drop = dropout_mask(n, d, dropout, *rng);
    x = x.cwiseProduct(drop);
    if (cache != nullptr) cache->emb_drop = std::move(drop);
  }
  if (cache != nullptr) {
    cache->x0 = x;
    cache->layers.resize(params.layers.size());
  }

  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& lp = params.layers[l];
    LayerCache* lc = cache != nullptr ? &cache->layers[l] : nullptr;

    Matrix ln1_out = layer_norm(x, lp.ln1_scale, lp.ln1_offset,
                                lc != nullptr ? &lc->ln1 : nullptr);
    Matrix q = ln1_out * lp.wq;
    Matrix k = ln1_out * lp.wk;
    Matrix v = ln1_out * lp.wv;

    Matrix o_cat(n, d);
    for (int h = 0; h < heads; ++h) {
      const auto qh = q.middleCols(h * dh, dh);
      const auto kh = k.middleCols(h * dh, dh);
      const auto vh = v.middleCols(h * dh, dh);
      Matrix scores = qh * kh.transpose() * inv_sqrt_dh;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!mask[static_cast<std::size_t>(j)]) {
          scores.col(j).setConstant(kNegInf);
        }
      }
      softmax_rows_inplace(scores);
      o_cat.middleCols(h * dh, dh) = scores * vh;
      if (lc != nullptr) lc->attn.push_back(std::move(scores));
    }

    Matrix attn_out = o_cat * lp.wo;
    if (dropout > 0.0) {
      Matrix drop = dropout_mask(n, d, dropout, *rng);
      attn_out = attn_out.cwiseProduct(drop);
      if (lc != nullptr) lc->attn_drop = std::move(drop);
    }
    Matrix x_mid = x + attn_out;

    Matrix ln2_out = layer_norm(x_mid, lp.ln2_scale, lp.ln2_offset,
                                lc != nullptr ? &lc->ln2 : nullptr);
    Matrix ffn_pre = ln2_out * lp.w1;
    ffn_pre.array().rowwise() += lp.b1.row(0).array();
    Matrix ffn_act = ffn_pre.unaryExpr([](double v) { return gelu(v); });
    Matrix ffn_out = ffn_act * lp.w2;
    ffn_out.array().rowwise() += lp.b2.row(0).array();
    if (dropout > 0.0) {
      Matrix drop = dropout_mask(n, d, dropout, *rng);
      ffn_out = ffn_out.cwiseProduct(drop);
      if (lc != nullptr) lc->ffn_drop = std::move(drop);
    }
    Matrix x_out = x_mid + ffn_out;

    if (lc != nullptr) {
      lc->ln1_out = std::move(ln1_out);
      lc->q = std::move(q);
      lc->k = std::move(k);
      lc->v = std::move(v);
      lc->o_cat = std::move(o_cat);
      lc->x_mid = std::move(x_mid);
      lc->ln2_out = std::move(ln2_out);
      lc->ffn_pre = std::move(ffn_pre);
      lc->ffn_act = std::move(ffn_act);
      lc->x_out = x_out;
    }
    x = std::move(x_out);
  }

  Matrix hidden = layer_norm(x, params.lnf_scale, params.lnf_offset,
                             cache != nullptr ? &cache->lnf : nullptr);
  if (cache != nullptr) cache->hidden = hidden;
  return hidden;
}

struct SentenceBackward {
  double loss_sum = 0.0;   // sum of per-token losses over unmasked positions
  std::size_t count = 0;   // unmasked positions
  Gradients grads;         // raw sums; the caller applies the 1/T scale
};

SentenceBackward backward_sentence(const ModelConfig& config,
                                   const ModelParams& params,
                                   const std::vector<int>& ids,
                                   const std::vector<std::uint8_t>& mask,
                                   const std::vector<int>& gold,
                                   double dropout, std::uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index d = config.d_model;
  const int heads = config.n_heads;
  const Eigen::Index dh = config.head_dim();
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  Rng rng(seed);
  ForwardCache cache;
  forward_sentence(config, params, ids, mask, dropout,
                   dropout > 0.0 ? &rng : nullptr, &cache);

  Matrix logits = cache.hidden * params.head_w;
  logits.array().rowwise() += params.head_b.row(0).array();

  SentenceBackward out;
  out.grads = zeros_like(params);
  Gradients& g = out.grads;

  // dL/dlogits rows: softmax(row) - onehot(gold) on unmasked positions.
  Matrix dz = Matrix::Zero(n, config.n_labels);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const int y = gold[static_cast<std::size_t>(i)];
    out.loss_sum += log_sum_exp_row(logits, i) - logits(i, y);
    ++out.count;
    const double mx = logits.row(i).maxCoeff();
    Eigen::RowVectorXd p = (logits.row(i).array() - mx).exp();
    p /= p.sum();
    dz.row(i) = p;
    dz(i, y) -= 1.0;
  }

  g.head_w += cache.hidden.transpose() * dz;
  g.head_b.row(0) += dz.colwise().sum();
  Matrix dhidden = dz * params.head_w.transpose();

  Matrix dx = layer_norm_backward(dhidden, cache.lnf, params.lnf_scale,
                                  g.lnf_scale, g.lnf_offset);

  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const LayerParams& lp = params.layers[li];
    const LayerCache& c = cache.layers[li];
    LayerParams& gl = g.layers[li];

    // Feedforward block: x_out = x_mid + drop(gelu(ln2_out W1 + b1) W2 + b2).
    Matrix dffn_out = c.ffn_drop.size() > 0 ? dx.cwiseProduct(c.ffn_drop) : dx;
    gl.w2 += c.ffn_act.transpose() * dffn_out;
    gl.b2.row(0) += dffn_out.colwise().sum();
    Matrix dact = dffn_out * lp.w2.transpose();
    Matrix dpre = dact.cwiseProduct(
        c.ffn_pre.unaryExpr([](double v) { return gelu_grad(v); }));
    gl.w1 += c.ln2_out.transpose() * dpre;
    gl.b1.row(0) += dpre.colwise().sum();
    Matrix dln2_out = dpre * lp.w1.transpose();
    Matrix dx_mid =
        dx + layer_norm_backward(dln2_out, c.ln2, lp.ln2_scale, gl.ln2_scale,
                                 gl.ln2_offset);

    // Attention block: x_mid = x_in + drop(o_cat Wo).
    Matrix dattn_out =
        c.attn_drop.size() > 0 ? dx_mid.cwiseProduct(c.attn_drop) : dx_mid;
    gl.wo += c.o_cat.transpose() * dattn_out;
    Matrix do_cat = dattn_out * lp.wo.transpose();

    Matrix dq(n, d), dk(n, d), dv(n, d);
    for (int h = 0; h < heads; ++h) {
      const auto doh = do_cat.middleCols(h * dh, dh);
      const auto kh = c.k.middleCols(h * dh, dh);
      const auto qh = c.q.middleCols(h * dh, dh);
      const auto vh = c.v.middleCols(h * dh, dh);
      const Matrix& w = c.attn[static_cast<std::size_t>(h)];
      Matrix dw = doh * vh.transpose();
      dv.middleCols(h * dh, dh) = w.transpose() * doh;
      // Softmax Jacobian per row; masked columns carry w == 0 and stay 0.
      Matrix ds(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double row_dot = dw.row(i).dot(w.row(i));
        ds.row(i) = (w.row(i).array() * (dw.row(i).array() - row_dot)).matrix();
      }
      dq.middleCols(h * dh, dh) = ds * kh * inv_sqrt_dh;
      dk.middleCols(h * dh, dh) = ds.transpose() * qh * inv_sqrt_dh;
    }

    gl.wq += c.ln1_out.transpose() * dq;
    gl.wk += c.ln1_out.transpose() * dk;
    gl.wv += c.ln1_out.transpose() * dv;
    Matrix dln1_out = dq * lp.wq.transpose() + dk * lp.wk.transpose() +
                      dv * lp.wv.transpose();
    dx = dx_mid + layer_norm_backward(dln1_out, c.ln1, lp.ln1_scale,
                                      gl.ln1_scale, gl.ln1_offset);
  }

  if (cache.emb_drop.size() > 0) {
    dx = dx.cwiseProduct(cache.emb_drop);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    g.embedding.row(ids[static_cast<std::size_t>(i)]) += dx.row(i);
  }
  return out;
}

Matrix xavier_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.next_uniform(-limit, limit);
    }
  }
  return m;
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size < 2) {
    throw std::invalid_argument(
        "vocab_size must be at least 2 (<pad> and <unk>)");
  }
  if (d_model < 1 || n_layers < 1 || d_ff < 1 || max_len < 1 || n_heads < 1) {
    throw std::invalid_argument(
        "d_model, n_layers, n_heads, d_ff and max_len must be positive");
  }
  if (d_model % n_heads != 0) {
    throw std::invalid_argument("d_model " + std::to_string(d_model) +
                                " is not divisible by n_heads " +
                                std::to_string(n_heads));
  }
  if (n_labels != static_cast<int>(kNumLabels)) {
    throw std::invalid_argument("n_labels is fixed at " +
                                std::to_string(kNumLabels));
  }
}

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [name, tensor] : tensor_list(*this)) {
    total += static_cast<std::size_t>(tensor->size());
  }
  return total;
}

namespace {

template <typename Params, typename MatrixPtr>
std::vector<std::pair<std::string, MatrixPtr>> tensor_list_impl(Params& p) {
  std::vector<std::pair<std::string, MatrixPtr>> out;
  out.emplace_back("embedding", &p.embedding);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& lp = p.layers[l];
    const std::string prefix = "layers." + std::to_string(l) + ".";
    out.emplace_back(prefix + "ln1_scale", &lp.ln1_scale);
    out.emplace_back(prefix + "ln1_offset", &lp.ln1_offset);
    out.emplace_back(prefix + "wq", &lp.wq);
    out.emplace_back(prefix + "wk", &lp.wk);
    out.emplace_back(prefix + "wv", &lp.wv);
    out.emplace_back(prefix + "wo", &lp.wo);
    out.emplace_back(prefix + "ln2_scale", &lp.ln2_scale);
    out.emplace_back(prefix + "ln2_offset", &lp.ln2_offset);
    out.emplace_back(prefix + "w1", &lp.w1);
    out.emplace_back(prefix + "b1", &lp.b1);
    out.emplace_back(prefix + "w2", &lp.w2);
    out.emplace_back(prefix + "b2", &lp.b2);
  }
  out.emplace_back("lnf_scale", &p.lnf_scale);
  out.emplace_back("lnf_offset", &p.lnf_offset);
  out.emplace_back("head_w", &p.head_w);
  out.emplace_back("head_b", &p.head_b);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Matrix*>> tensor_list(ModelParams& params) {
  return tensor_list_impl<ModelParams, Matrix*>(params);
}

std::vector<std::pair<std::string, const Matrix*>> tensor_list(
    const ModelParams& params) {
  return tensor_list_impl<const ModelParams, const Matrix*>(params);
}

std::size_t parameter_count(const ModelConfig& config) {
  const std::size_t v = static_cast<std::size_t>(config.vocab_size);
  const std::size_t d = static_cast<std::size_t>(config.d_model);
  const std::size_t dff = static_cast<std::size_t>(config.d_ff);
  const std::size_t nl = static_cast<std::size_t>(config.n_labels);
  const std::size_t per_layer = 2 * d        // ln1 scale/offset
                                + 4 * d * d  // wq wk wv wo
                                + 2 * d      // ln2 scale/offset
                                + d * dff + dff   // w1, b1
                                + dff * d + d;    // w2, b2
  return v * d + static_cast<std::size_t>(config.n_layers) * per_layer +
         2 * d + d * nl + nl;
}

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const Eigen::Index d = config.d_model;
  const Eigen::Index dff = config.d_ff;

  ModelParams p;
  p.embedding = xavier_uniform(config.vocab_size, d, rng);
  p.layers.resize(static_cast<std::size_t>(config.n_layers));
  for (LayerParams& lp : p.layers) {
    lp.ln1_scale = Matrix::Ones(1, d);
    lp.ln1_offset = Matrix::Zero(1, d);
    lp.wq = xavier_uniform(d, d, rng);
    lp.wk = xavier_uniform(d, d, rng);
    lp.wv = xavier_uniform(d, d, rng);
    lp.wo = xavier_uniform(d, d, rng);
    lp.ln2_scale = Matrix::Ones(1, d);
    lp.ln2_offset = Matrix::Zero(1, d);
    lp.w1 = xavier_uniform(d, dff, rng);
    lp.b1 = Matrix::Zero(1, dff);
    lp.w2 = xavier_uniform(dff, d, rng);
    lp.b2 = Matrix::Zero(1, d);
  }
  p.lnf_scale = Matrix::Ones(1, d);
  p.lnf_offset = Matrix::Zero(1, d);
  p.head_w = xavier_uniform(d, config.n_labels, rng);
  p.head_b = Matrix::Zero(1, config.n_labels);
  return p;
}

ModelParams zeros_params(const ModelConfig& config) {
  config.validate();
  const Eigen::Index d = config.d_model;
  const Eigen::Index dff = config.d_ff;
  ModelParams p;
  p.embedding = Matrix::Zero(config.vocab_size, d);
  p.layers.resize(static_cast<std::size_t>(config.n_layers));
  for (LayerParams& lp : p.layers) {
    lp.ln1_scale = Matrix::Zero(1, d);
    lp.ln1_offset = Matrix::Zero(1, d);
    lp.wq = Matrix::Zero(d, d);
    lp.wk = Matrix::Zero(d, d);
    lp.wv = Matrix::Zero(d, d);
    lp.wo = Matrix::Zero(d, d);
    lp.ln2_scale = Matrix::Zero(1, d);
    lp.ln2_offset = Matrix::Zero(1, d);
    lp.w1 = Matrix::Zero(d, dff);
    lp.b1 = Matrix::Zero(1, dff);
    lp.w2 = Matrix::Zero(dff, d);
    lp.b2 = Matrix::Zero(1, d);
  }
  p.lnf_scale = Matrix::Zero(1, d);
  p.lnf_offset = Matrix::Zero(1, d);
  p.head_w = Matrix::Zero(d, config.n_labels);
  p.head_b = Matrix::Zero(1, config.n_labels);
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z;
  z.embedding = Matrix::Zero(params.embedding.rows(), params.embedding.cols());
  z.layers.resize(params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams& src = params.layers[l];
    LayerParams& dst = z.layers[l];
    auto zero_of = [](const Matrix& m) {
      return Matrix::Zero(m.rows(), m.cols()).eval();
    };
    dst.ln1_scale = zero_of(src.ln1_scale);
    dst.ln1_offset = zero_of(src.ln1_offset);
    dst.wq = zero_of(src.wq);
    dst.wk = zero_of(src.wk);
    dst.wv = zero_of(src.wv);
    dst.wo = zero_of(src.wo);
    dst.ln2_scale = zero_of(src.ln2_scale);
    dst.ln2_offset = zero_of(src.ln2_offset);
    dst.w1 = zero_of(src.w1);
    dst.b1 = zero_of(src.b1);
    dst.w2 = zero_of(src.w2);
    dst.b2 = zero_of(src.b2);
  }
  z.lnf_scale = Matrix::Zero(1, params.lnf_scale.cols());
  z.lnf_offset = Matrix::Zero(1, params.lnf_offset.cols());
  z.head_w = Matrix::Zero(params.head_w.rows(), params.head_w.cols());
  z.head_b = Matrix::Zero(1, params.head_b.cols());
  return z;
}

Matrix position_encoding(int n, int d) {
  Matrix pe(n, d);
  for (int pos = 0; pos < n; ++pos) {
    for (int k = 0; 2 * k < d; ++k) {
      const double freq =
          std::exp(-std::log(10000.0) * (2.0 * k) / static_cast<double>(d));
      pe(pos, 2 * k) = std::sin(pos * freq);
      if (2 * k + 1 < d) {
        pe(pos, 2 * k + 1) = std::cos(pos * freq);
      }
    }
  }
  return pe;
}

namespace {

void check_sequence(const ModelConfig& config, const std::vector<int>& ids,
                    const std::vector<std::uint8_t>& mask) {
  if (ids.empty()) {
    throw std::invalid_argument("empty token sequence");
  }
  if (ids.size() != mask.size()) {
    throw std::invalid_argument("token/mask length mismatch");
  }
  if (ids.size() > static_cast<std::size_t>(config.max_len)) {
    throw std::invalid_argument("sequence length " +
                                std::to_string(ids.size()) +
                                " exceeds max_len " +
                                std::to_string(config.max_len));
  }
  bool any_unmasked = false;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= config.vocab_size) {
      throw std::invalid_argument("token id " + std::to_string(ids[i]) +
                                  " out of range at position " +
                                  std::to_string(i));
    }
    any_unmasked = any_unmasked || mask[i];
  }
  if (!any_unmasked) {
    throw std::invalid_argument("sequence has no unmasked positions");
  }
}

}  // namespace

EncoderOutput encode(const ModelConfig& config, const ModelParams& params,
                     const std::vector<int>& token_ids,
                     const std::vector<std::uint8_t>& mask) {
  config.validate();
  check_sequence(config, token_ids, mask);
  return {forward_sentence(config, params, token_ids, mask, 0.0, nullptr,
                           nullptr)};
}

ClassifierOutput classify(const ModelConfig& config, const ModelParams& params,
                          const EncoderOutput& hidden) {
  if (hidden.hidden.cols() != config.d_model ||
      params.head_w.rows() != config.d_model) {
    throw std::invalid_argument("hidden width does not match the classifier");
  }
  ClassifierOutput out;
  out.logits = hidden.hidden * params.head_w;
  out.logits.array().rowwise() += params.head_b.row(0).array();
  out.probs.rows = out.logits;
  softmax_rows_inplace(out.probs.rows);
  return out;
}

std::vector<BioTag> predict(const ModelConfig& config,
                            const ModelParams& params,
                            const Sentence& sentence,
                            const Vocabulary& vocab) {
  const std::vector<int> ids = vocab.encode(sentence.tokens);
  const std::vector<std::uint8_t> mask(ids.size(), 1);
  const EncoderOutput hidden = encode(config, params, ids, mask);
  const ClassifierOutput cls = classify(config, params, hidden);
  std::vector<BioTag> tags;
  tags.reserve(ids.size());
  for (Eigen::Index i = 0; i < cls.logits.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < config.n_labels; ++j) {
      if (cls.logits(i, j) > cls.logits(i, best)) {
        best = j;  // strict '>' keeps the lowest id on ties
      }
    }
    tags.push_back(BioTag::from_id(best));
  }
  return tags;
}

double cross_entropy(const Matrix& logits, const std::vector<int>& gold,
                     const std::vector<std::uint8_t>& mask) {
  const std::size_t n = static_cast<std::size_t>(logits.rows());
  if (gold.size() != n || mask.size() != n) {
    throw std::invalid_argument("logits/gold/mask length mismatch");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (gold[i] < 0 || gold[i] >= logits.cols()) {
      throw std::invalid_argument("gold label id out of range at position " +
                                  std::to_string(i));
    }
    sum += log_sum_exp_row(logits, static_cast<Eigen::Index>(i)) -
           logits(static_cast<Eigen::Index>(i), gold[i]);
    ++count;
  }
  if (count == 0) {
    throw std::invalid_argument("no unmasked positions");
  }
  return sum / static_cast<double>(count);
}

std::size_t Batch::unmasked_count() const {
  std::size_t total = 0;
  for (const auto& row : mask) {
    for (std::uint8_t m : row) {
      total += m ? 1 : 0;
    }
  }
  return total;
}

void Batch::validate(const ModelConfig& config) const {
  if (token_ids.empty()) {
    throw std::invalid_argument("empty batch");
  }
  if (mask.size() != token_ids.size() || gold.size() != token_ids.size()) {
    throw std::invalid_argument("batch row count mismatch");
  }
  const std::size_t len = token_ids.front().size();
  for (std::size_t r = 0; r < token_ids.size(); ++r) {
    if (token_ids[r].size() != len || mask[r].size() != len ||
        gold[r].size() != len) {
      throw std::invalid_argument("batch rows must share one padded length");
    }
    check_sequence(config, token_ids[r], mask[r]);
    for (std::size_t i = 0; i < len; ++i) {
      if (mask[r][i] && (gold[r][i] < 0 || gold[r][i] >= config.n_labels)) {
        throw std::invalid_argument("gold label id out of range in row " +
                                    std::to_string(r));
      }
    }
  }
}

BackwardResult backward(const ModelConfig& config, const ModelParams& params,
                        const Batch& batch, const BackwardOptions& options) {
  config.validate();
  batch.validate(config);
  const std::size_t rows = batch.rows();
  std::vector<SentenceBackward> parts(rows);

  auto run_row = [&](std::size_t r) {
    parts[r] = backward_sentence(config, params, batch.token_ids[r],
                                 batch.mask[r], batch.gold[r], options.dropout,
                                 derive_seed(options.dropout_seed, r));
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(options.threads, 1), rows);
  if (workers <= 1) {
    for (std::size_t r = 0; r < rows; ++r) run_row(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < rows; r += workers) run_row(r);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // Fixed reduction order: results do not depend on the worker count.
  BackwardResult result;
  result.grads = zeros_like(params);
  double loss_sum = 0.0;
  std::size_t total_tokens = 0;
  auto total = tensor_list(result.grads);
  for (std::size_t r = 0; r < rows; ++r) {
    loss_sum += parts[r].loss_sum;
    total_tokens += parts[r].count;
    const auto part = tensor_list(parts[r].grads);
    for (std::size_t t = 0; t < total.size(); ++t) {
      *total[t].second += *part[t].second;
    }
  }
  const double scale = 1.0 / static_cast<double>(total_tokens);
  for (auto& [name, tensor] : total) {
    *tensor *= scale;
    if (!tensor->allFinite()) {
      throw std::runtime_error("non-finite gradient in tensor " + name);
    }
  }
  result.loss = loss_sum * scale;
  if (!std::isfinite(result.loss)) {
    throw std::runtime_error("non-finite loss");
  }
  return result;
}

double batch_loss(const ModelConfig& config, const ModelParams& params,
                  const Batch& batch) {
  config.validate();
  batch.validate(config);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    const Matrix hidden = forward_sentence(config, params, batch.token_ids[r],
                                           batch.mask[r], 0.0, nullptr,
                                           nullptr);
    Matrix logits = hidden * params.head_w;
    logits.array().rowwise() += params.head_b.row(0).array();
    const auto& mask = batch.mask[r];
    const auto& gold = batch.gold[r];
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      sum += log_sum_exp_row(logits, static_cast<Eigen::Index>(i)) -
             logits(static_cast<Eigen::Index>(i), gold[i]);
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("batch has no unmasked positions");
  }
  return sum / static_cast<double>(count);
}

}  // namespace nerkit
