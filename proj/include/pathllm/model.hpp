#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathllm/nn.hpp"
#include "pathllm/rng.hpp"
#include "pathllm/vocab.hpp"

namespace pathllm {

struct ModelConfig {
  std::uint32_t d = 64;
  std::uint32_t h = 4;
  std::uint32_t blocks = 2;
  std::uint32_t vocab = 0;
  std::uint32_t max_len = 128;
};

struct BlockOffsets {
  std::size_t ln1_g, ln1_b;
  std::size_t wq, bq, wk, bk, wv, bv, wo, bo;
  std::size_t ln2_g, ln2_b;
  std::size_t w1, b1, w2, b2;
};

// Flat parameter vector layout; serialization uses this same order.
struct ParamLayout {
  std::size_t tok_emb = 0;
  std::size_t pos_emb = 0;
  std::vector<BlockOffsets> blocks;
  std::size_t wout = 0;
  std::size_t total = 0;
};

inline ParamLayout make_layout(const ModelConfig& cfg) {
  const std::size_t d = cfg.d;
  ParamLayout layout;
  std::size_t off = 0;
  auto take = [&off](std::size_t n) {
    std::size_t at = off;
    off += n;
    return at;
  };
  layout.tok_emb = take(static_cast<std::size_t>(cfg.vocab) * d);
  layout.pos_emb = take(static_cast<std::size_t>(cfg.max_len) * d);
  for (std::uint32_t b = 0; b < cfg.blocks; ++b) {
    BlockOffsets bo;
    bo.ln1_g = take(d);
    bo.ln1_b = take(d);
    bo.wq = take(d * d);
    bo.bq = take(d);
    bo.wk = take(d * d);
    bo.bk = take(d);
    bo.wv = take(d * d);
    bo.bv = take(d);
    bo.wo = take(d * d);
    bo.bo = take(d);
    bo.ln2_g = take(d);
    bo.ln2_b = take(d);
    bo.w1 = take(d * 4 * d);
    bo.b1 = take(4 * d);
    bo.w2 = take(4 * d * d);
    bo.b2 = take(d);
    layout.blocks.push_back(bo);
  }
  layout.wout = take(d * static_cast<std::size_t>(cfg.vocab));
  layout.total = off;
  return layout;
}

namespace detail {

inline constexpr double kLnEps = 1e-5;

}  // namespace detail

// Pre-norm causal transformer over a closed vocabulary. Parameters live in
// one flat vector; the last block's hidden states feed an unbiased output
// projection (no final normalization layer).
template <typename Scalar>
class ToyModel {
 public:
  ModelConfig cfg;
  std::vector<Scalar> params;

  explicit ToyModel(const ModelConfig& config) : cfg(config) {
    if (cfg.d == 0 || cfg.h == 0 || cfg.d % cfg.h != 0) {
      throw std::invalid_argument("model dim must divide into heads");
    }
    if (cfg.vocab < 4) {
      throw std::invalid_argument("vocab must include the special tokens");
    }
    if (cfg.blocks == 0 || cfg.max_len == 0) {
      throw std::invalid_argument("blocks and max_len must be positive");
    }
    layout_ = make_layout(cfg);
    params.assign(layout_.total, Scalar(0));
  }

  const ParamLayout& layout() const { return layout_; }
  std::size_t param_count() const { return layout_.total; }

  // Gaussian(0, 0.02) weights and embeddings, zero biases, identity norms.
  void init_parameters(std::uint64_t seed) {
    Rng rng(seed);
    auto fill_gauss = [&](std::size_t off, std::size_t n) {
      for (std::size_t i = 0; i < n; ++i) {
        params[off + i] = Scalar(rng.normal() * 0.02);
      }
    };
    auto fill_const = [&](std::size_t off, std::size_t n, Scalar v) {
      for (std::size_t i = 0; i < n; ++i) params[off + i] = v;
    };
    const std::size_t d = cfg.d;
    std::fill(params.begin(), params.end(), Scalar(0));
    fill_gauss(layout_.tok_emb, static_cast<std::size_t>(cfg.vocab) * d);
    fill_gauss(layout_.pos_emb, static_cast<std::size_t>(cfg.max_len) * d);
    for (const BlockOffsets& b : layout_.blocks) {
      fill_const(b.ln1_g, d, Scalar(1));
      fill_gauss(b.wq, d * d);
      fill_gauss(b.wk, d * d);
      fill_gauss(b.wv, d * d);
      fill_gauss(b.wo, d * d);
      fill_const(b.ln2_g, d, Scalar(1));
      fill_gauss(b.w1, d * 4 * d);
      fill_gauss(b.w2, 4 * d * d);
    }
    fill_gauss(layout_.wout, d * static_cast<std::size_t>(cfg.vocab));
  }

  // Row t holds the next-token logits after reading tokens[0..t].
  std::vector<Scalar> forward_logits(const std::vector<TokenId>& tokens) const {
    Cache cache;
    run_forward(tokens, cache);
    return std::move(cache.logits);
  }

  // Final-block hidden states, one row of d per position.
  std::vector<Scalar> last_hidden_states(
      const std::vector<TokenId>& tokens) const {
    Cache cache;
    run_forward(tokens, cache);
    return cache.blocks.back().x_out;
  }

  // Mean next-token cross-entropy over positions 1..T-1, skipping PAD
  // targets.
  Scalar clm_loss(const std::vector<TokenId>& tokens) const {
    if (tokens.size() < 2) {
      throw std::invalid_argument("loss needs at least 2 tokens");
    }
    Cache cache;
    run_forward(tokens, cache);
    const std::size_t T = tokens.size();
    const std::size_t V = cfg.vocab;
    Scalar total = 0;
    std::size_t count = 0;
    std::vector<Scalar> logp(V);
    for (std::size_t j = 1; j < T; ++j) {
      if (tokens[j] == Vocab::kPad) continue;
      log_softmax_row(&cache.logits[(j - 1) * V], logp.data(), V);
      total -= logp[tokens[j]];
      ++count;
    }
    return count ? total / Scalar(count) : Scalar(0);
  }

  // clm_loss plus its parameter gradient accumulated into grad (sized like
  // params).
  Scalar loss_and_grad(const std::vector<TokenId>& tokens,
                       std::vector<Scalar>& grad) const {
    if (tokens.size() < 2) {
      throw std::invalid_argument("loss needs at least 2 tokens");
    }
    if (grad.size() != params.size()) {
      throw std::invalid_argument("gradient buffer size mismatch");
    }
    Cache cache;
    run_forward(tokens, cache);
    const std::size_t T = tokens.size();
    const std::size_t d = cfg.d;
    const std::size_t V = cfg.vocab;

    std::size_t count = 0;
    for (std::size_t j = 1; j < T; ++j) {
      if (tokens[j] != Vocab::kPad) ++count;
    }
    if (count == 0) return Scalar(0);

    Scalar total = 0;
    std::vector<Scalar> dlogits(T * V, Scalar(0));
    std::vector<Scalar> logp(V);
    for (std::size_t j = 1; j < T; ++j) {
      if (tokens[j] == Vocab::kPad) continue;
      Scalar* row = &dlogits[(j - 1) * V];
      log_softmax_row(&cache.logits[(j - 1) * V], logp.data(), V);
      total -= logp[tokens[j]];
      for (std::size_t v = 0; v < V; ++v) {
        row[v] = std::exp(logp[v]) / Scalar(count);
      }
      row[tokens[j]] -= Scalar(1) / Scalar(count);
    }

    // Output projection.
    const std::vector<Scalar>& final_x = cache.blocks.back().x_out;
    std::vector<Scalar> dx(T * d, Scalar(0));
    nn::dense_backward(final_x.data(), &params[layout_.wout], dlogits.data(),
                       T, d, V, dx.data(), &grad[layout_.wout],
                       static_cast<Scalar*>(nullptr));

    for (std::size_t b = cfg.blocks; b-- > 0;) {
      backward_block(tokens, cache, b, dx, grad);
    }

    // Embedding tables.
    for (std::size_t t = 0; t < T; ++t) {
      Scalar* gtok = &grad[layout_.tok_emb + static_cast<std::size_t>(tokens[t]) * d];
      Scalar* gpos = &grad[layout_.pos_emb + t * d];
      for (std::size_t i = 0; i < d; ++i) {
        gtok[i] += dx[t * d + i];
        gpos[i] += dx[t * d + i];
      }
    }
    return total / Scalar(count);
  }

 private:
  ParamLayout layout_;

  struct BlockCache {
    std::vector<Scalar> x_in, ln1_xhat, ln1_inv, a;
    std::vector<Scalar> q, k, v, att, concat, x_mid;
    std::vector<Scalar> ln2_xhat, ln2_inv, a2, hlin, hact, x_out;
  };
  struct Cache {
    std::vector<Scalar> x0;
    std::vector<BlockCache> blocks;
    std::vector<Scalar> logits;
  };

  static void log_softmax_row(const Scalar* logits, Scalar* out,
                              std::size_t n) {
    Scalar mx = logits[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
    Scalar sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += std::exp(logits[i] - mx);
    Scalar lse = mx + std::log(sum);
    for (std::size_t i = 0; i < n; ++i) out[i] = logits[i] - lse;
  }

  void layer_norm(const std::vector<Scalar>& x, std::size_t go, std::size_t bo,
                  std::size_t T, std::vector<Scalar>& y,
                  std::vector<Scalar>& xhat, std::vector<Scalar>& inv) const {
    const std::size_t d = cfg.d;
    const Scalar* g = &params[go];
    const Scalar* b = &params[bo];
    y.assign(T * d, Scalar(0));
    xhat.assign(T * d, Scalar(0));
    inv.assign(T, Scalar(0));
    for (std::size_t t = 0; t < T; ++t) {
      const Scalar* row = &x[t * d];
      Scalar mean = 0;
      for (std::size_t i = 0; i < d; ++i) mean += row[i];
      mean /= Scalar(d);
      Scalar var = 0;
      for (std::size_t i = 0; i < d; ++i) {
        Scalar c = row[i] - mean;
        var += c * c;
      }
      var /= Scalar(d);
      Scalar is = Scalar(1) / std::sqrt(var + Scalar(detail::kLnEps));
      inv[t] = is;
      for (std::size_t i = 0; i < d; ++i) {
        Scalar xh = (row[i] - mean) * is;
        xhat[t * d + i] = xh;
        y[t * d + i] = g[i] * xh + b[i];
      }
    }
  }

  void layer_norm_backward(const std::vector<Scalar>& dy,
                           const std::vector<Scalar>& xhat,
                           const std::vector<Scalar>& inv, std::size_t go,
                           std::size_t bo, std::size_t T,
                           std::vector<Scalar>& dx,
                           std::vector<Scalar>& grad) const {
    const std::size_t d = cfg.d;
    const Scalar* g = &params[go];
    for (std::size_t t = 0; t < T; ++t) {
      Scalar m1 = 0, m2 = 0;
      for (std::size_t i = 0; i < d; ++i) {
        Scalar dxh = dy[t * d + i] * g[i];
        m1 += dxh;
        m2 += dxh * xhat[t * d + i];
        grad[go + i] += dy[t * d + i] * xhat[t * d + i];
        grad[bo + i] += dy[t * d + i];
      }
      m1 /= Scalar(d);
      m2 /= Scalar(d);
      for (std::size_t i = 0; i < d; ++i) {
        Scalar dxh = dy[t * d + i] * g[i];
        dx[t * d + i] += inv[t] * (dxh - m1 - xhat[t * d + i] * m2);
      }
    }
  }

  void linear(const std::vector<Scalar>& x, std::size_t wo, std::size_t bo,
              std::size_t T, std::size_t in, std::size_t out,
              std::vector<Scalar>& y) const {
    y.assign(T * out, Scalar(0));
    nn::dense_forward(x.data(), &params[wo], &params[bo], T, in, out,
                      y.data());
  }

  void linear_backward(const std::vector<Scalar>& x,
                       const std::vector<Scalar>& dy, std::size_t wo,
                       std::size_t bo, std::size_t T, std::size_t in,
                       std::size_t out, std::vector<Scalar>& dx,
                       std::vector<Scalar>& grad) const {
    nn::dense_backward(x.data(), &params[wo], dy.data(), T, in, out, dx.data(),
                       &grad[wo], &grad[bo]);
  }

  void run_forward(const std::vector<TokenId>& tokens, Cache& cache) const {
    const std::size_t T = tokens.size();
    const std::size_t d = cfg.d;
    const std::size_t V = cfg.vocab;
    if (T == 0) throw std::invalid_argument("empty token sequence");
    if (T > cfg.max_len) {
      throw std::invalid_argument("sequence exceeds max_len");
    }
    for (TokenId id : tokens) {
      if (id < 0 || static_cast<std::uint32_t>(id) >= cfg.vocab) {
        throw std::invalid_argument("token id outside vocabulary");
      }
    }

    cache.x0.assign(T * d, Scalar(0));
    for (std::size_t t = 0; t < T; ++t) {
      const Scalar* tok = &params[layout_.tok_emb +
                                  static_cast<std::size_t>(tokens[t]) * d];
      const Scalar* pos = &params[layout_.pos_emb + t * d];
      for (std::size_t i = 0; i < d; ++i) cache.x0[t * d + i] = tok[i] + pos[i];
    }

    cache.blocks.resize(cfg.blocks);
    const std::vector<Scalar>* x = &cache.x0;
    for (std::uint32_t b = 0; b < cfg.blocks; ++b) {
      BlockCache& bc = cache.blocks[b];
      const BlockOffsets& off = layout_.blocks[b];
      bc.x_in = *x;
      layer_norm(bc.x_in, off.ln1_g, off.ln1_b, T, bc.a, bc.ln1_xhat,
                 bc.ln1_inv);
      linear(bc.a, off.wq, off.bq, T, d, d, bc.q);
      linear(bc.a, off.wk, off.bk, T, d, d, bc.k);
      linear(bc.a, off.wv, off.bv, T, d, d, bc.v);
      attention_forward(bc, T);
      std::vector<Scalar> attn_out;
      linear(bc.concat, off.wo, off.bo, T, d, d, attn_out);
      bc.x_mid.assign(T * d, Scalar(0));
      for (std::size_t i = 0; i < T * d; ++i) {
        bc.x_mid[i] = bc.x_in[i] + attn_out[i];
      }
      layer_norm(bc.x_mid, off.ln2_g, off.ln2_b, T, bc.a2, bc.ln2_xhat,
                 bc.ln2_inv);
      linear(bc.a2, off.w1, off.b1, T, d, 4 * d, bc.hlin);
      bc.hact.assign(T * 4 * d, Scalar(0));
      for (std::size_t i = 0; i < T * 4 * d; ++i) {
        bc.hact[i] = nn::gelu(bc.hlin[i]);
      }
      std::vector<Scalar> ffn_out;
      linear(bc.hact, off.w2, off.b2, T, 4 * d, d, ffn_out);
      bc.x_out.assign(T * d, Scalar(0));
      for (std::size_t i = 0; i < T * d; ++i) {
        bc.x_out[i] = bc.x_mid[i] + ffn_out[i];
      }
      x = &bc.x_out;
    }

    cache.logits.assign(T * V, Scalar(0));
    nn::dense_forward(x->data(), &params[layout_.wout],
                      static_cast<const Scalar*>(nullptr), T, d, V,
                      cache.logits.data());
  }

  void attention_forward(BlockCache& bc, std::size_t T) const {
    const std::size_t d = cfg.d;
    const std::size_t nh = cfg.h;
    const std::size_t dh = d / nh;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));
    bc.att.assign(nh * T * T, Scalar(0));
    bc.concat.assign(T * d, Scalar(0));
    std::vector<Scalar> scores;
    for (std::size_t head = 0; head < nh; ++head) {
      const std::size_t ho = head * dh;
      for (std::size_t t = 0; t < T; ++t) {
        scores.assign(t + 1, Scalar(0));
        for (std::size_t s = 0; s <= t; ++s) {
          Scalar dot = 0;
          for (std::size_t kk = 0; kk < dh; ++kk) {
            dot += bc.q[t * d + ho + kk] * bc.k[s * d + ho + kk];
          }
          scores[s] = dot * scale;
        }
        Scalar mx = scores[0];
        for (std::size_t s = 1; s <= t; ++s) mx = std::max(mx, scores[s]);
        Scalar sum = 0;
        for (std::size_t s = 0; s <= t; ++s) {
          scores[s] = std::exp(scores[s] - mx);
          sum += scores[s];
        }
        Scalar* arow = &bc.att[(head * T + t) * T];
        for (std::size_t s = 0; s <= t; ++s) arow[s] = scores[s] / sum;
        Scalar* crow = &bc.concat[t * d + ho];
        for (std::size_t s = 0; s <= t; ++s) {
          Scalar w = arow[s];
          const Scalar* vrow = &bc.v[s * d + ho];
          for (std::size_t kk = 0; kk < dh; ++kk) crow[kk] += w * vrow[kk];
        }
      }
    }
  }

  void backward_block(const std::vector<TokenId>& tokens, const Cache& cache,
                      std::size_t b, std::vector<Scalar>& dx,
                      std::vector<Scalar>& grad) const {
    const std::size_t T = tokens.size();
    const std::size_t d = cfg.d;
    const std::size_t nh = cfg.h;
    const std::size_t dh = d / nh;
    const BlockCache& bc = cache.blocks[b];
    const BlockOffsets& off = layout_.blocks[b];

    // dx arrives as the gradient at x_out; the residual splits it between
    // the FFN branch and x_mid.
    std::vector<Scalar> dhact(T * 4 * d, Scalar(0));
    std::vector<Scalar> dxmid = dx;
    linear_backward(bc.hact, dx, off.w2, off.b2, T, 4 * d, d, dhact, grad);
    std::vector<Scalar> dhlin(T * 4 * d, Scalar(0));
    for (std::size_t i = 0; i < T * 4 * d; ++i) {
      dhlin[i] = dhact[i] * nn::gelu_grad(bc.hlin[i]);
    }
    std::vector<Scalar> da2(T * d, Scalar(0));
    linear_backward(bc.a2, dhlin, off.w1, off.b1, T, d, 4 * d, da2, grad);
    layer_norm_backward(da2, bc.ln2_xhat, bc.ln2_inv, off.ln2_g, off.ln2_b, T,
                        dxmid, grad);

    std::vector<Scalar> dao = dxmid;
    std::vector<Scalar> dxin = dxmid;
    std::vector<Scalar> dconcat(T * d, Scalar(0));
    linear_backward(bc.concat, dao, off.wo, off.bo, T, d, d, dconcat, grad);

    std::vector<Scalar> dq(T * d, Scalar(0));
    std::vector<Scalar> dk(T * d, Scalar(0));
    std::vector<Scalar> dv(T * d, Scalar(0));
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));
    std::vector<Scalar> datt(T, Scalar(0));
    for (std::size_t head = 0; head < nh; ++head) {
      const std::size_t ho = head * dh;
      for (std::size_t t = 0; t < T; ++t) {
        const Scalar* arow = &bc.att[(head * T + t) * T];
        const Scalar* drow = &dconcat[t * d + ho];
        Scalar dot_sum = 0;
        for (std::size_t s = 0; s <= t; ++s) {
          Scalar da = 0;
          const Scalar* vrow = &bc.v[s * d + ho];
          for (std::size_t kk = 0; kk < dh; ++kk) da += drow[kk] * vrow[kk];
          datt[s] = da;
          dot_sum += arow[s] * da;
          Scalar* gv = &dv[s * d + ho];
          for (std::size_t kk = 0; kk < dh; ++kk) {
            gv[kk] += arow[s] * drow[kk];
          }
        }
        for (std::size_t s = 0; s <= t; ++s) {
          Scalar ds = arow[s] * (datt[s] - dot_sum) * scale;
          Scalar* gq = &dq[t * d + ho];
          Scalar* gk = &dk[s * d + ho];
          const Scalar* krow = &bc.k[s * d + ho];
          const Scalar* qrow = &bc.q[t * d + ho];
          for (std::size_t kk = 0; kk < dh; ++kk) {
            gq[kk] += ds * krow[kk];
            gk[kk] += ds * qrow[kk];
          }
        }
      }
    }

    std::vector<Scalar> da(T * d, Scalar(0));
    linear_backward(bc.a, dq, off.wq, off.bq, T, d, d, da, grad);
    linear_backward(bc.a, dk, off.wk, off.bk, T, d, d, da, grad);
    linear_backward(bc.a, dv, off.wv, off.bv, T, d, d, da, grad);
    layer_norm_backward(da, bc.ln1_xhat, bc.ln1_inv, off.ln1_g, off.ln1_b, T,
                        dxin, grad);
    dx = std::move(dxin);
  }
};

template <typename To, typename From>
ToyModel<To> convert_model(const ToyModel<From>& src) {
  ToyModel<To> dst(src.cfg);
  for (std::size_t i = 0; i < src.params.size(); ++i) {
    dst.params[i] = static_cast<To>(src.params[i]);
  }
  return dst;
}

// ---- log-probability factorization ----------------------------------------

struct SpanLogprob {
  TokenTag tag = TokenTag::Filler;
  std::uint32_t index = 0;   // node or edge ordinal within the path
  double logprob = 0.0;
  std::size_t token_count = 0;
};

struct SequenceLogprob {
  double total = 0.0;             // sum of log p(t_j | t_<j), j >= 1
  std::vector<SpanLogprob> per_span;
  double grouping_residual = 0.0; // sum(per_span) - total
};

// Splits the autoregressive log-probability of `enc` by the span owning
// each target token: one entry per node, one per edge, one for filler.
template <typename Scalar>
SequenceLogprob sequence_logprob(const ToyModel<Scalar>& model,
                                 const EncodedText& enc) {
  const std::size_t T = enc.ids.size();
  const std::size_t V = model.cfg.vocab;
  std::vector<Scalar> logits = model.forward_logits(enc.ids);

  SequenceLogprob out;
  std::vector<SpanLogprob> nodes, edges;
  SpanLogprob filler;
  std::vector<double> logp(V);
  for (std::size_t j = 1; j < T; ++j) {
    const Scalar* row = &logits[(j - 1) * V];
    double mx = static_cast<double>(row[0]);
    for (std::size_t v = 1; v < V; ++v) {
      mx = std::max(mx, static_cast<double>(row[v]));
    }
    double sum = 0;
    for (std::size_t v = 0; v < V; ++v) {
      sum += std::exp(static_cast<double>(row[v]) - mx);
    }
    double lp = static_cast<double>(row[enc.ids[j]]) - mx - std::log(sum);
    out.total += lp;

    TokenTag tag = enc.tags[j];
    std::uint32_t index = enc.span_index[j];
    std::vector<SpanLogprob>* bucket = nullptr;
    if (tag == TokenTag::Node) {
      bucket = &nodes;
    } else if (tag == TokenTag::Edge) {
      bucket = &edges;
    }
    if (bucket) {
      while (bucket->size() <= index) {
        SpanLogprob s;
        s.tag = tag;
        s.index = static_cast<std::uint32_t>(bucket->size());
        bucket->push_back(s);
      }
      (*bucket)[index].logprob += lp;
      (*bucket)[index].token_count += 1;
    } else {
      filler.logprob += lp;
      filler.token_count += 1;
    }
  }
  double span_sum = 0;
  for (SpanLogprob& s : nodes) {
    span_sum += s.logprob;
    out.per_span.push_back(std::move(s));
  }
  for (SpanLogprob& s : edges) {
    span_sum += s.logprob;
    out.per_span.push_back(std::move(s));
  }
  span_sum += filler.logprob;
  out.per_span.push_back(filler);
  out.grouping_residual = span_sum - out.total;
  return out;
}

// ---- gradient checking -----------------------------------------------------

// Central-difference check of `analytic` at the given parameter indices;
// returns the max relative error.
inline double gradcheck_against(ToyModel<double>& model,
                                const std::vector<TokenId>& tokens,
                                const std::vector<double>& analytic,
                                const std::vector<std::size_t>& indices,
                                double eps) {
  double worst = 0.0;
  for (std::size_t idx : indices) {
    double saved = model.params[idx];
    model.params[idx] = saved + eps;
    double up = model.clm_loss(tokens);
    model.params[idx] = saved - eps;
    double down = model.clm_loss(tokens);
    model.params[idx] = saved;
    double numeric = (up - down) / (2.0 * eps);
    // The floor keeps central-difference rounding noise (~1e-9 absolute at
    // eps=1e-5) from dominating the ratio where the true gradient is near
    // zero; below the floor the check degrades to an absolute one.
    double denom = std::max({std::fabs(analytic[idx]), std::fabs(numeric),
                             1e-4});
    worst = std::max(worst, std::fabs(analytic[idx] - numeric) / denom);
  }
  return worst;
}

// Samples >= n_samples parameter coordinates and compares the analytic
// gradient of clm_loss with central differences.
inline double finite_difference_gradcheck(ToyModel<double>& model,
                                          const std::vector<TokenId>& tokens,
                                          double eps, std::size_t n_samples,
                                          std::uint64_t seed) {
  std::vector<double> grad(model.param_count(), 0.0);
  model.loss_and_grad(tokens, grad);
  Rng rng(seed);
  std::vector<std::size_t> indices;
  if (model.param_count() <= n_samples) {
    for (std::size_t i = 0; i < model.param_count(); ++i) indices.push_back(i);
  } else {
    for (std::size_t i = 0; i < n_samples; ++i) {
      indices.push_back(rng.below(model.param_count()));
    }
  }
  return gradcheck_against(model, tokens, grad, indices, eps);
}

// ---- node embedding extraction ---------------------------------------------

// Mean of the last-block hidden states over the text's tokens, BOS and EOS
// excluded. The flag marks an empty text (zero vector).
template <typename Scalar>
std::pair<std::vector<Scalar>, bool> extract_node_embedding(
    const ToyModel<Scalar>& model, const std::string& node_text,
    const Vocab& vocab) {
  std::vector<TokenId> ids = encode(vocab, node_text, model.cfg.max_len);
  const std::size_t d = model.cfg.d;
  std::vector<Scalar> xi(d, Scalar(0));
  if (ids.size() <= 2) return {xi, true};
  std::vector<Scalar> states = model.last_hidden_states(ids);
  const std::size_t r = ids.size() - 2;
  for (std::size_t t = 1; t + 1 < ids.size(); ++t) {
    for (std::size_t i = 0; i < d; ++i) xi[i] += states[t * d + i];
  }
  for (std::size_t i = 0; i < d; ++i) xi[i] /= Scalar(r);
  return {xi, false};
}

// ---- serialization ----------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw std::runtime_error("truncated model file");
  std::uint32_t v = static_cast<std::uint8_t>(in[pos]) |
                    (static_cast<std::uint32_t>(
                         static_cast<std::uint8_t>(in[pos + 1]))
                     << 8) |
                    (static_cast<std::uint32_t>(
                         static_cast<std::uint8_t>(in[pos + 2]))
                     << 16) |
                    (static_cast<std::uint32_t>(
                         static_cast<std::uint8_t>(in[pos + 3]))
                     << 24);
  pos += 4;
  return v;
}

}  // namespace detail

// model.bin: "PLLM", version, d, h, blocks, vocab, max_len as little-endian
// u32, then all parameters as little-endian f32 in layout order.
template <typename Scalar>
void save_model(const ToyModel<Scalar>& model, const std::string& path) {
  std::string out;
  out += "PLLM";
  detail::put_u32(out, 1);
  detail::put_u32(out, model.cfg.d);
  detail::put_u32(out, model.cfg.h);
  detail::put_u32(out, model.cfg.blocks);
  detail::put_u32(out, model.cfg.vocab);
  detail::put_u32(out, model.cfg.max_len);
  for (Scalar p : model.params) {
    float f = static_cast<float>(p);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    detail::put_u32(out, bits);
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

inline ToyModel<float> load_model(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot read " + path);
  std::string blob((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());
  if (blob.size() < 4 || blob.compare(0, 4, "PLLM") != 0) {
    throw std::runtime_error("bad model magic");
  }
  std::size_t pos = 4;
  std::uint32_t version = detail::get_u32(blob, pos);
  if (version != 1) throw std::runtime_error("unsupported model version");
  ModelConfig cfg;
  cfg.d = detail::get_u32(blob, pos);
  cfg.h = detail::get_u32(blob, pos);
  cfg.blocks = detail::get_u32(blob, pos);
  cfg.vocab = detail::get_u32(blob, pos);
  cfg.max_len = detail::get_u32(blob, pos);
  ToyModel<float> model(cfg);
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    std::uint32_t bits = detail::get_u32(blob, pos);
    float f;
    std::memcpy(&f, &bits, 4);
    model.params[i] = f;
  }
  if (pos != blob.size()) throw std::runtime_error("trailing model bytes");
  return model;
}

}  // namespace pathllm
