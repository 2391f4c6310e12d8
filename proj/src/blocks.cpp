#include "taxo/blocks.hpp"

#include <cmath>

#include "taxo/errors.hpp"

namespace taxo::nn {

void gaussian_init(Tensor& t, Rng& rng, double stddev) {
  for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value(i) = rng.gaussian(0.0, stddev);
}

void AttentionParams::init(const std::string& prefix, int d, Rng& rng) {
  wq = Tensor(prefix + ".wq", d, d);
  bq = Tensor(prefix + ".bq", 1, d);
  wk = Tensor(prefix + ".wk", d, d);
  bk = Tensor(prefix + ".bk", 1, d);
  wv = Tensor(prefix + ".wv", d, d);
  bv = Tensor(prefix + ".bv", 1, d);
  wo = Tensor(prefix + ".wo", d, d);
  bo = Tensor(prefix + ".bo", 1, d);
  for (Tensor* t : {&wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo}) gaussian_init(*t, rng);
}

void AttentionParams::collect(std::vector<Tensor*>& out) {
  for (Tensor* t : {&wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo}) out.push_back(t);
}

void EncoderLayerParams::init(const std::string& prefix, int d, Rng& rng) {
  attn.init(prefix + ".attn", d, rng);
  const int ff = 4 * d;
  ff_w1 = Tensor(prefix + ".ff_w1", d, ff);
  ff_b1 = Tensor(prefix + ".ff_b1", 1, ff);
  ff_w2 = Tensor(prefix + ".ff_w2", ff, d);
  ff_b2 = Tensor(prefix + ".ff_b2", 1, d);
  for (Tensor* t : {&ff_w1, &ff_b1, &ff_w2, &ff_b2}) gaussian_init(*t, rng);
  // Layer norms start as identity transforms.
  ln1_gain = Tensor(prefix + ".ln1_gain", 1, d);
  ln1_gain.value.setOnes();
  ln1_bias = Tensor(prefix + ".ln1_bias", 1, d);
  ln2_gain = Tensor(prefix + ".ln2_gain", 1, d);
  ln2_gain.value.setOnes();
  ln2_bias = Tensor(prefix + ".ln2_bias", 1, d);
}

void EncoderLayerParams::collect(std::vector<Tensor*>& out) {
  attn.collect(out);
  for (Tensor* t : {&ln1_gain, &ln1_bias, &ff_w1, &ff_b1, &ff_w2, &ff_b2, &ln2_gain, &ln2_bias})
    out.push_back(t);
}

Graph::Ref linear(Graph& g, Graph::Ref x, Tensor& w, Tensor& b) {
  return g.add_row(g.matmul(x, g.param(w)), g.param(b));
}

Graph::Ref attention(Graph& g, Graph::Ref x, AttentionParams& p, int heads,
                     const Mat* additive_mask) {
  const int d = static_cast<int>(g.value(x).cols());
  if (heads <= 0 || d % heads != 0)
    throw ConfigError("attention: d_model " + std::to_string(d) + " not divisible by heads " +
                      std::to_string(heads));
  const int dh = d / heads;
  Graph::Ref q = linear(g, x, p.wq, p.bq);
  Graph::Ref k = linear(g, x, p.wk, p.bk);
  Graph::Ref v = linear(g, x, p.wv, p.bv);
  Graph::Ref mask = additive_mask ? g.input(*additive_mask) : -1;
  std::vector<Graph::Ref> head_out;
  head_out.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Graph::Ref qh = g.slice_cols(q, h * dh, (h + 1) * dh);
    Graph::Ref kh = g.slice_cols(k, h * dh, (h + 1) * dh);
    Graph::Ref vh = g.slice_cols(v, h * dh, (h + 1) * dh);
    Graph::Ref scores = g.scale(g.matmul(qh, g.transpose(kh)), 1.0 / std::sqrt(dh));
    if (mask >= 0) scores = g.add(scores, mask);
    head_out.push_back(g.matmul(g.softmax_rows(scores), vh));
  }
  Graph::Ref merged = heads == 1 ? head_out.front() : g.concat_cols(head_out);
  return linear(g, merged, p.wo, p.bo);
}

Graph::Ref encoder_layer(Graph& g, Graph::Ref x, EncoderLayerParams& p, int heads,
                         const Mat* additive_mask) {
  Graph::Ref a = attention(g, x, p.attn, heads, additive_mask);
  Graph::Ref h = g.layer_norm(g.add(x, a), g.param(p.ln1_gain), g.param(p.ln1_bias));
  Graph::Ref f = linear(g, g.gelu_(linear(g, h, p.ff_w1, p.ff_b1)), p.ff_w2, p.ff_b2);
  return g.layer_norm(g.add(h, f), g.param(p.ln2_gain), g.param(p.ln2_bias));
}

}  // namespace taxo::nn
