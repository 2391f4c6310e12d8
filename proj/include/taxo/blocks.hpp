#pragma once

#include <string>
#include <vector>

#include "taxo/graph.hpp"
#include "taxo/rng.hpp"

namespace taxo::nn {

struct AttentionParams {
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;

  void init(const std::string& prefix, int d_model, Rng& rng);
  void collect(std::vector<Tensor*>& out);
};

// One post-norm transformer encoder layer: self-attention + residual +
// layer norm, then a 4x GELU feed-forward + residual + layer norm.
struct EncoderLayerParams {
  AttentionParams attn;
  Tensor ln1_gain, ln1_bias;
  Tensor ff_w1, ff_b1, ff_w2, ff_b2;
  Tensor ln2_gain, ln2_bias;

  void init(const std::string& prefix, int d_model, Rng& rng);
  void collect(std::vector<Tensor*>& out);
};

Graph::Ref linear(Graph& g, Graph::Ref x, Tensor& w, Tensor& b);

// Multi-head self-attention over x (n x d). `additive_mask`, when non-null,
// is an n x n matrix added to every head's scores before softmax (use large
// negatives to hide keys).
Graph::Ref attention(Graph& g, Graph::Ref x, AttentionParams& p, int heads,
                     const Mat* additive_mask);

Graph::Ref encoder_layer(Graph& g, Graph::Ref x, EncoderLayerParams& p, int heads,
                         const Mat* additive_mask);

// Fills a tensor with N(0, 0.02) draws.
void gaussian_init(Tensor& t, Rng& rng, double stddev = 0.02);

}  // namespace taxo::nn
