// Copyright 2026 The rangediff Authors
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

#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "rangediff/core.hpp"
#include "rangediff/diffusion.hpp"
#include "rangediff/schedule.hpp"

namespace rangediff {

/// Sinusoidal embedding of the normalised timestep t/T at dim/2 geometric
/// frequencies (2 pi 2^j), all sines first, then all cosines.
inline Vec timestep_embed(int t, int steps, int dim) {
  if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("timestep_embed: dim must be even");
  if (t < 1 || t > steps) throw std::out_of_range("timestep_embed: t outside [1, T]");
  const double u = static_cast<double>(t) / steps;
  const int half = dim / 2;
  Vec out(dim);
  for (int j = 0; j < half; ++j) {
    const double w = std::ldexp(2.0 * M_PI, j);
    out[j] = std::sin(w * u);
    out[half + j] = std::cos(w * u);
  }
  return out;
}

namespace detail {

inline Vec matvec(const Grid& w, const Vec& x) {
  if (static_cast<size_t>(w.cols()) != x.size())
    throw std::invalid_argument("matvec: shape mismatch");
  Vec out(w.rows(), 0.0);
  for (int r = 0; r < w.rows(); ++r) {
    double acc = 0.0;
    const double* row = w.data() + static_cast<size_t>(r) * w.cols();
    for (int c = 0; c < w.cols(); ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
  return out;
}

inline Vec matvec_transposed(const Grid& w, const Vec& y) {
  if (static_cast<size_t>(w.rows()) != y.size())
    throw std::invalid_argument("matvec_transposed: shape mismatch");
  Vec out(w.cols(), 0.0);
  for (int r = 0; r < w.rows(); ++r) {
    const double* row = w.data() + static_cast<size_t>(r) * w.cols();
    for (int c = 0; c < w.cols(); ++c) out[c] += row[c] * y[r];
  }
  return out;
}

inline void add_outer(Grid& w, const Vec& y, const Vec& x) {
  for (int r = 0; r < w.rows(); ++r) {
    double* row = w.data() + static_cast<size_t>(r) * w.cols();
    for (int c = 0; c < w.cols(); ++c) row[c] += y[r] * x[c];
  }
}

inline void softmax_inplace(Vec& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

}  // namespace detail

struct LinearLayer {
  Grid w;  // out x in
  Vec b;
};

/// Zero-gated cross-attention adapter: projections plus a scalar gate that
/// starts at exactly zero, so the adapter is an identity at initialisation.
struct AdapterParams {
  Grid wq;  // d_head x d_h
  Grid wk;  // d_head x d_tok
  Grid wv;  // d_h x d_tok
  Vec gate = {0.0};
};

/// h' = h + gate * softmax(Q K^T / sqrt(d_head)) V, rows of h as queries,
/// condition tokens as keys/values. Softmax rows are max-subtracted.
inline Grid gated_cross_attention(const Grid& h, const Grid& tokens, const AdapterParams& a) {
  const int d_h = h.cols();
  const int d_tok = tokens.cols();
  const int d_head = a.wq.rows();
  if (a.wq.cols() != d_h || a.wk.cols() != d_tok || a.wv.cols() != d_tok ||
      a.wk.rows() != d_head || a.wv.rows() != d_h || tokens.rows() < 1)
    throw std::invalid_argument("gated_cross_attention: shape mismatch");
  const int m = tokens.rows();
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d_head));
  const double g = a.gate[0];

  // Keys and values, one per token.
  std::vector<Vec> keys(m), vals(m);
  for (int j = 0; j < m; ++j) {
    Vec tok(tokens.data() + static_cast<size_t>(j) * d_tok,
            tokens.data() + static_cast<size_t>(j + 1) * d_tok);
    keys[j] = detail::matvec(a.wk, tok);
    vals[j] = detail::matvec(a.wv, tok);
  }

  Grid out(h.rows(), d_h);
  for (int n = 0; n < h.rows(); ++n) {
    Vec hn(h.data() + static_cast<size_t>(n) * d_h, h.data() + static_cast<size_t>(n + 1) * d_h);
    const Vec q = detail::matvec(a.wq, hn);
    Vec scores(m, 0.0);
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d_head; ++k) acc += q[k] * keys[j][k];
      scores[j] = acc * inv_sqrt;
    }
    detail::softmax_inplace(scores);
    for (int c = 0; c < d_h; ++c) {
      double attn = 0.0;
      for (int j = 0; j < m; ++j) attn += scores[j] * vals[j][c];
      out(n, c) = hn[c] + g * attn;
    }
  }
  return out;
}

struct DenoiserConfig {
  int data_dim = 2;
  int embed_dim = 16;            // timestep embedding width, even
  int d_h = 32;                  // adapter width / condition summary width
  int d_tok = 16;                // condition token width; d_head follows it
  std::vector<int> hidden = {128, 128};
  int schedule_steps = 200;      // T used to normalise the timestep

  void validate() const {
    if (data_dim < 1 || d_h < 1 || d_tok < 1 || schedule_steps < 1 || hidden.empty())
      throw std::invalid_argument("DenoiserConfig: sizes must be positive");
    if (embed_dim < 2 || embed_dim % 2 != 0)
      throw std::invalid_argument("DenoiserConfig: embed_dim must be even");
    for (int hsz : hidden)
      if (hsz < 1) throw std::invalid_argument("DenoiserConfig: hidden sizes must be positive");
  }
};

/// All weights of the toy noise-prediction network:
/// stem (x, t-embedding) -> adapter features, a gated cross-attention adapter
/// over the condition tokens, then a tanh MLP trunk on
/// [x | t-embedding | condition summary] that outputs the noise estimate.
struct DenoiserParams {
  DenoiserConfig cfg;
  LinearLayer stem;                // d_h x (data_dim + embed_dim)
  AdapterParams adapter;
  std::vector<LinearLayer> trunk;  // hidden layers plus the output layer
};

/// Visits every tensor in declaration order; checkpoints and the optimizer
/// rely on this order being stable.
template <typename Params, typename Fn>
void visit_tensors(Params& p, Fn&& fn) {
  fn(p.stem.w.values());
  fn(p.stem.b);
  fn(p.adapter.wq.values());
  fn(p.adapter.wk.values());
  fn(p.adapter.wv.values());
  fn(p.adapter.gate);
  for (auto& layer : p.trunk) {
    fn(layer.w.values());
    fn(layer.b);
  }
}

/// Same-shape zero clone, used for gradients and optimizer moments.
inline DenoiserParams zeros_like(const DenoiserParams& p) {
  DenoiserParams out = p;
  visit_tensors(out, [](std::vector<double>& v) { v.assign(v.size(), 0.0); });
  return out;
}

/// Random initialisation: weights ~ N(0, 1/fan_in), biases zero, gate
/// exactly zero.
inline DenoiserParams init_denoiser(const DenoiserConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  auto fill = [&](Grid& g) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.cols()));
    for (double& x : g.values()) x = normal(rng) * scale;
  };
  DenoiserParams p;
  p.cfg = cfg;
  const int in_stem = cfg.data_dim + cfg.embed_dim;
  p.stem.w = Grid(cfg.d_h, in_stem);
  p.stem.b.assign(cfg.d_h, 0.0);
  fill(p.stem.w);
  const int d_head = cfg.d_tok;
  p.adapter.wq = Grid(d_head, cfg.d_h);
  p.adapter.wk = Grid(d_head, cfg.d_tok);
  p.adapter.wv = Grid(cfg.d_h, cfg.d_tok);
  fill(p.adapter.wq);
  fill(p.adapter.wk);
  fill(p.adapter.wv);
  p.adapter.gate = {0.0};
  int prev = cfg.data_dim + cfg.embed_dim + cfg.d_h;
  for (int hsz : cfg.hidden) {
    LinearLayer l;
    l.w = Grid(hsz, prev);
    l.b.assign(hsz, 0.0);
    fill(l.w);
    p.trunk.push_back(std::move(l));
    prev = hsz;
  }
  LinearLayer out_layer;
  out_layer.w = Grid(cfg.data_dim, prev);
  out_layer.b.assign(cfg.data_dim, 0.0);
  fill(out_layer.w);
  p.trunk.push_back(std::move(out_layer));
  return p;
}

namespace detail {

/// Intermediate activations of one forward pass, kept for backprop.
struct ForwardTrace {
  Vec u;                    // [x | t-embedding]
  Vec h;                    // stem output
  Vec q;                    // query
  std::vector<Vec> keys;    // per token
  std::vector<Vec> vals;    // per token
  Vec attn_weights;         // softmax row
  Vec attn;                 // weighted value sum
  Vec summary;              // h + gate * attn
  std::vector<Vec> z;       // trunk activations, z[0] = trunk input
  std::vector<Vec> pre;     // trunk pre-activations per hidden layer
  Vec out;
};

inline Grid null_tokens(int d_tok) { return Grid(1, d_tok, 0.0); }

inline ForwardTrace forward_trace(const Vec& x, int t, const Grid& tokens,
                                  const DenoiserParams& p) {
  const DenoiserConfig& cfg = p.cfg;
  if (static_cast<int>(x.size()) != cfg.data_dim)
    throw std::invalid_argument("denoiser forward: data dimension mismatch");
  if (tokens.cols() != cfg.d_tok)
    throw std::invalid_argument("denoiser forward: token width mismatch");
  ForwardTrace tr;
  const Vec emb = timestep_embed(t, cfg.schedule_steps, cfg.embed_dim);
  tr.u = x;
  tr.u.insert(tr.u.end(), emb.begin(), emb.end());
  tr.h = matvec(p.stem.w, tr.u);
  for (size_t i = 0; i < tr.h.size(); ++i) tr.h[i] += p.stem.b[i];

  const int m = tokens.rows();
  const int d_head = p.adapter.wq.rows();
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d_head));
  tr.q = matvec(p.adapter.wq, tr.h);
  tr.keys.resize(m);
  tr.vals.resize(m);
  tr.attn_weights.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    Vec tok(tokens.data() + static_cast<size_t>(j) * cfg.d_tok,
            tokens.data() + static_cast<size_t>(j + 1) * cfg.d_tok);
    tr.keys[j] = matvec(p.adapter.wk, tok);
    tr.vals[j] = matvec(p.adapter.wv, tok);
    double acc = 0.0;
    for (int k = 0; k < d_head; ++k) acc += tr.q[k] * tr.keys[j][k];
    tr.attn_weights[j] = acc * inv_sqrt;
  }
  softmax_inplace(tr.attn_weights);
  tr.attn.assign(cfg.d_h, 0.0);
  for (int j = 0; j < m; ++j)
    for (int c = 0; c < cfg.d_h; ++c) tr.attn[c] += tr.attn_weights[j] * tr.vals[j][c];
  tr.summary = tr.h;
  const double g = p.adapter.gate[0];
  for (int c = 0; c < cfg.d_h; ++c) tr.summary[c] += g * tr.attn[c];

  Vec z0 = x;
  z0.insert(z0.end(), emb.begin(), emb.end());
  z0.insert(z0.end(), tr.summary.begin(), tr.summary.end());
  tr.z.push_back(std::move(z0));
  const size_t n_hidden = p.trunk.size() - 1;
  for (size_t l = 0; l < n_hidden; ++l) {
    Vec pre = matvec(p.trunk[l].w, tr.z.back());
    for (size_t i = 0; i < pre.size(); ++i) pre[i] += p.trunk[l].b[i];
    Vec act(pre.size());
    for (size_t i = 0; i < pre.size(); ++i) act[i] = std::tanh(pre[i]);
    tr.pre.push_back(std::move(pre));
    tr.z.push_back(std::move(act));
  }
  tr.out = matvec(p.trunk.back().w, tr.z.back());
  for (size_t i = 0; i < tr.out.size(); ++i) tr.out[i] += p.trunk.back().b[i];
  return tr;
}

/// Accumulates parameter gradients for one element given dL/d(out).
inline void backward_trace(const ForwardTrace& tr, const Grid& tokens, const DenoiserParams& p,
                           const Vec& dout, DenoiserParams& grads) {
  const DenoiserConfig& cfg = p.cfg;
  const size_t n_hidden = p.trunk.size() - 1;

  // Output layer.
  add_outer(grads.trunk.back().w, dout, tr.z.back());
  for (size_t i = 0; i < dout.size(); ++i) grads.trunk.back().b[i] += dout[i];
  Vec dz = matvec_transposed(p.trunk.back().w, dout);

  // Hidden layers, last to first.
  for (size_t l = n_hidden; l-- > 0;) {
    Vec dpre(dz.size());
    for (size_t i = 0; i < dz.size(); ++i) {
      const double th = tr.z[l + 1][i];
      dpre[i] = dz[i] * (1.0 - th * th);
    }
    add_outer(grads.trunk[l].w, dpre, tr.z[l]);
    for (size_t i = 0; i < dpre.size(); ++i) grads.trunk[l].b[i] += dpre[i];
    dz = matvec_transposed(p.trunk[l].w, dpre);
  }

  // Split the trunk-input gradient; x and the embedding are constants.
  const int off = cfg.data_dim + cfg.embed_dim;
  Vec dsummary(dz.begin() + off, dz.end());

  // Residual and gate.
  Vec dh = dsummary;
  const double g = p.adapter.gate[0];
  double dgate = 0.0;
  for (int c = 0; c < cfg.d_h; ++c) dgate += dsummary[c] * tr.attn[c];
  grads.adapter.gate[0] += dgate;
  Vec dattn(cfg.d_h);
  for (int c = 0; c < cfg.d_h; ++c) dattn[c] = g * dsummary[c];

  // Attention backward.
  const int m = tokens.rows();
  const int d_head = p.adapter.wq.rows();
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d_head));
  Vec da(m, 0.0);
  for (int j = 0; j < m; ++j)
    for (int c = 0; c < cfg.d_h; ++c) da[j] += dattn[c] * tr.vals[j][c];
  double dot = 0.0;
  for (int j = 0; j < m; ++j) dot += tr.attn_weights[j] * da[j];
  Vec dscores(m);
  for (int j = 0; j < m; ++j) dscores[j] = tr.attn_weights[j] * (da[j] - dot);

  Vec dq(d_head, 0.0);
  for (int j = 0; j < m; ++j) {
    Vec tok(tokens.data() + static_cast<size_t>(j) * cfg.d_tok,
            tokens.data() + static_cast<size_t>(j + 1) * cfg.d_tok);
    // dV_j = a_j * dattn; dK_j = dscores_j * q / sqrt(d_head).
    Vec dv(cfg.d_h);
    for (int c = 0; c < cfg.d_h; ++c) dv[c] = tr.attn_weights[j] * dattn[c];
    add_outer(grads.adapter.wv, dv, tok);
    Vec dk(d_head);
    for (int k = 0; k < d_head; ++k) {
      dk[k] = dscores[j] * tr.q[k] * inv_sqrt;
      dq[k] += dscores[j] * tr.keys[j][k] * inv_sqrt;
    }
    add_outer(grads.adapter.wk, dk, tok);
  }
  add_outer(grads.adapter.wq, dq, tr.h);
  const Vec dh_from_q = matvec_transposed(p.adapter.wq, dq);
  for (int c = 0; c < cfg.d_h; ++c) dh[c] += dh_from_q[c];

  // Stem.
  add_outer(grads.stem.w, dh, tr.u);
  for (size_t i = 0; i < dh.size(); ++i) grads.stem.b[i] += dh[i];
}

}  // namespace detail

/// Noise prediction eps(x_t, t, c). Passing tokens with zero rows selects
/// the null condition (a single all-zero token), the classifier-free
/// guidance "empty" input.
inline Vec denoiser_forward(const Vec& x, int t, const Grid& tokens, const DenoiserParams& p) {
  if (tokens.rows() > 0) return detail::forward_trace(x, t, tokens, p).out;
  return detail::forward_trace(x, t, detail::null_tokens(p.cfg.d_tok), p).out;
}

inline Vec denoiser_forward_unconditional(const Vec& x, int t, const DenoiserParams& p) {
  return denoiser_forward(x, t, Grid(), p);
}

/// One training batch. A tokens entry with zero rows stands for the null
/// condition.
struct TrainingBatch {
  std::vector<Vec> x0;
  std::vector<int> t;
  std::vector<Vec> noise;
  std::vector<Grid> tokens;

  size_t size() const { return x0.size(); }
};

struct BackwardResult {
  double loss = 0.0;
  DenoiserParams grads;
};

/// Mean noise-prediction loss over the batch with exact analytic gradients
/// for every parameter.
inline BackwardResult denoiser_backward(const TrainingBatch& batch, const DenoiserParams& p,
                                        const NoiseSchedule& schedule) {
  const size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("denoiser_backward: empty batch");
  if (batch.t.size() != n || batch.noise.size() != n || batch.tokens.size() != n)
    throw std::invalid_argument("denoiser_backward: ragged batch");
  BackwardResult res;
  res.grads = zeros_like(p);
  for (size_t i = 0; i < n; ++i) {
    const Vec xt = forward_sample(batch.x0[i], batch.t[i], batch.noise[i], schedule);
    const Grid tok =
        batch.tokens[i].rows() > 0 ? batch.tokens[i] : detail::null_tokens(p.cfg.d_tok);
    const detail::ForwardTrace tr = detail::forward_trace(xt, batch.t[i], tok, p);
    double loss_i = 0.0;
    Vec dout(tr.out.size());
    for (size_t k = 0; k < tr.out.size(); ++k) {
      const double d = tr.out[k] - batch.noise[i][k];
      loss_i += d * d;
      dout[k] = 2.0 * d / static_cast<double>(n);
    }
    res.loss += loss_i / static_cast<double>(n);
    detail::backward_trace(tr, tok, p, dout, res.grads);
  }
  return res;
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  DenoiserParams m;
  DenoiserParams v;
  long step = 0;

  static AdamState init(const DenoiserParams& p) {
    return AdamState{zeros_like(p), zeros_like(p), 0};
  }
};

/// Standard bias-corrected adaptive-moment update, applied in place.
inline void adam_step(DenoiserParams& params, const DenoiserParams& grads, AdamState& state,
                      const AdamConfig& cfg = {}) {
  state.step += 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  std::vector<std::vector<double>*> ps, ms, vs;
  std::vector<const std::vector<double>*> gs;
  visit_tensors(params, [&](std::vector<double>& t) { ps.push_back(&t); });
  visit_tensors(grads, [&](const std::vector<double>& t) { gs.push_back(&t); });
  visit_tensors(state.m, [&](std::vector<double>& t) { ms.push_back(&t); });
  visit_tensors(state.v, [&](std::vector<double>& t) { vs.push_back(&t); });
  for (size_t k = 0; k < ps.size(); ++k) {
    std::vector<double>& p = *ps[k];
    const std::vector<double>& g = *gs[k];
    std::vector<double>& m = *ms[k];
    std::vector<double>& v = *vs[k];
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

struct TrainConfig {
  int steps = 20000;
  int batch = 128;
  double lr = 1e-3;
  double null_condition_rate = 0.3;
  uint64_t seed = 0;
};

struct TrainResult {
  DenoiserParams params;
  std::vector<double> losses;  // one entry per optimisation step
};

/// Deterministic training loop over a toy 2D sampler. The dataset callback
/// returns one (x0, condition tokens) draw; conditions are dropped to the
/// null token with the configured probability.
inline TrainResult train_denoiser(
    const std::function<std::pair<Vec, Grid>(std::mt19937_64&)>& sample,
    const NoiseSchedule& schedule, const DenoiserConfig& dcfg, const TrainConfig& tcfg) {
  if (tcfg.steps < 0 || tcfg.batch < 1) throw ConfigError("train: bad steps/batch");
  if (tcfg.null_condition_rate < 0.0 || tcfg.null_condition_rate > 1.0)
    throw ConfigError("train: null_condition_rate outside [0, 1]");
  if (dcfg.schedule_steps != schedule.steps())
    throw ConfigError("train: config T does not match the schedule");
  std::mt19937_64 rng(tcfg.seed);
  TrainResult res;
  res.params = init_denoiser(dcfg, rng);
  AdamState state = AdamState::init(res.params);
  AdamConfig adam;
  adam.lr = tcfg.lr;
  std::uniform_int_distribution<int> t_dist(1, schedule.steps());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  res.losses.reserve(tcfg.steps);
  for (int step = 0; step < tcfg.steps; ++step) {
    TrainingBatch batch;
    batch.x0.reserve(tcfg.batch);
    for (int b = 0; b < tcfg.batch; ++b) {
      auto [x0, tokens] = sample(rng);
      batch.x0.push_back(std::move(x0));
      batch.t.push_back(t_dist(rng));
      Vec noise(dcfg.data_dim);
      for (double& x : noise) x = normal(rng);
      batch.noise.push_back(std::move(noise));
      if (unit(rng) < tcfg.null_condition_rate) tokens = Grid();
      batch.tokens.push_back(std::move(tokens));
    }
    BackwardResult bw = denoiser_backward(batch, res.params, schedule);
    adam_step(res.params, bw.grads, state, adam);
    res.losses.push_back(bw.loss);
  }
  return res;
}

/// Ancestral sampling from pure noise with optional classifier-free
/// guidance. All randomness comes from the supplied generator.
inline Vec generate_ddpm(const DenoiserParams& p, const NoiseSchedule& s, const Grid& tokens,
                         double cfg_scale, std::mt19937_64& rng,
                         SigmaChoice sigma = SigmaChoice::kBetaTilde) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec x(p.cfg.data_dim);
  for (double& v : x) v = normal(rng);
  for (int t = s.steps(); t >= 1; --t) {
    Vec eps;
    if (tokens.rows() > 0) {
      const Vec eps_cond = denoiser_forward(x, t, tokens, p);
      const Vec eps_uncond = denoiser_forward_unconditional(x, t, p);
      eps = cfg_combine(eps_cond, eps_uncond, cfg_scale);
    } else {
      eps = denoiser_forward_unconditional(x, t, p);
    }
    Vec z(x.size(), 0.0);
    if (t > 1)
      for (double& v : z) v = normal(rng);
    x = ddpm_step(x, eps, t, z, s, sigma);
  }
  return x;
}

/// Deterministic strided sampling over {T, T-s, ..., s, 0}. The stride must
/// divide T so steps are uniform.
inline Vec generate_ddim(const DenoiserParams& p, const NoiseSchedule& s, int n_steps,
                         const Grid& tokens, double cfg_scale, std::mt19937_64& rng) {
  if (n_steps < 1 || n_steps > s.steps() || s.steps() % n_steps != 0)
    throw std::invalid_argument("generate_ddim: step count must divide T uniformly");
  const int stride = s.steps() / n_steps;
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec x(p.cfg.data_dim);
  for (double& v : x) v = normal(rng);
  for (int t = s.steps(); t >= stride; t -= stride) {
    Vec eps;
    if (tokens.rows() > 0) {
      const Vec eps_cond = denoiser_forward(x, t, tokens, p);
      const Vec eps_uncond = denoiser_forward_unconditional(x, t, p);
      eps = cfg_combine(eps_cond, eps_uncond, cfg_scale);
    } else {
      eps = denoiser_forward_unconditional(x, t, p);
    }
    x = ddim_step(x, eps, t, t - stride, s);
  }
  return x;
}

}  // namespace rangediff
