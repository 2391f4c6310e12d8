#include <doctest.h>

#include "taxo/blocks.hpp"
#include "taxo/graph.hpp"
#include "test_support.hpp"

using namespace taxo;
using nn::Graph;
using nn::Mat;
using nn::Tensor;

namespace {

void randomize(Tensor& t, Rng& rng, double scale = 0.5) {
  for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value(i) = rng.gaussian(0.0, scale);
}

// Reduces any graph output to one scalar with fixed mixing weights so every
// output entry influences the loss.
Graph::Ref to_scalar(Graph& g, Graph::Ref x) {
  const Mat& v = g.value(x);
  Mat mix(v.rows(), v.cols());
  Rng rng(99);
  for (Eigen::Index i = 0; i < mix.size(); ++i) mix(i) = rng.gaussian(0.0, 1.0);
  return g.mean_all(g.mul(x, g.input(mix)));
}

void expect_op_gradients(const std::function<Graph::Ref(Graph&, std::vector<Tensor*>&)>& build,
                         double tol = 1e-5) {
  Rng rng(41);
  std::vector<Tensor*> tensors;
  {
    // One dry run to discover the tensor set.
    Graph g;
    build(g, tensors);
  }
  for (Tensor* t : tensors) randomize(*t, rng);
  auto eval = [&]() {
    Graph g;
    std::vector<Tensor*> unused;
    return g.scalar(to_scalar(g, build(g, unused)));
  };
  auto accumulate = [&]() {
    for (Tensor* t : tensors) t->zero_grad();
    Graph g;
    std::vector<Tensor*> unused;
    Graph::Ref loss = to_scalar(g, build(g, unused));
    g.backward(loss);
  };
  auto result = test::check_gradients(tensors, eval, accumulate);
  INFO("worst entry: ", result.worst);
  CHECK(result.max_rel_err < tol);
  CHECK(result.probes > 0);
}

}  // namespace

TEST_CASE("matmul forward and gradients") {
  static Tensor a("a", 3, 4), b("b", 4, 2);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&a, &b};
    return g.matmul(g.param(a), g.param(b));
  });
  Graph g;
  CHECK(g.value(g.matmul(g.param(a), g.param(b))).isApprox(a.value * b.value));
}

TEST_CASE("add, add_row, mul, scale gradients") {
  static Tensor x("x", 3, 5), y("y", 3, 5), bias("bias", 1, 5);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x, &y, &bias};
    Graph::Ref s = g.add(g.param(x), g.param(y));
    s = g.add_row(s, g.param(bias));
    s = g.mul(s, g.param(y));
    return g.scale(s, 0.37);
  });
}

TEST_CASE("nonlinearity gradients") {
  static Tensor x("x", 2, 6);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x};
    return g.gelu_(g.tanh_(g.sigmoid_(g.param(x))));
  });
}

TEST_CASE("softmax rows forward and gradients") {
  static Tensor x("x", 4, 3);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x};
    return g.softmax_rows(g.param(x));
  });
  Graph g;
  const Mat& y = g.value(g.softmax_rows(g.param(x)));
  for (int r = 0; r < 4; ++r) CHECK(y.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log gradients away from the clamp") {
  static Tensor x("x", 2, 3);
  Rng rng(5);
  for (Eigen::Index i = 0; i < x.value.size(); ++i) x.value(i) = 0.2 + rng.uniform();
  auto eval = [&]() {
    Graph g;
    return g.scalar(g.mean_all(g.log_(g.param(x))));
  };
  auto accumulate = [&]() {
    x.zero_grad();
    Graph g;
    g.backward(g.mean_all(g.log_(g.param(x))));
  };
  auto res = test::check_gradients({&x}, eval, accumulate);
  CHECK(res.max_rel_err < 1e-6);
}

TEST_CASE("layer norm gradients") {
  static Tensor x("x", 3, 8), gain("gain", 1, 8), bias("bias", 1, 8);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x, &gain, &bias};
    return g.layer_norm(g.param(x), g.param(gain), g.param(bias));
  });
}

TEST_CASE("concat and slice gradients") {
  static Tensor x("x", 2, 4), y("y", 3, 4), z("z", 2, 3);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x, &y, &z};
    Graph::Ref rows = g.concat_rows({g.param(x), g.param(y)});
    Graph::Ref cols = g.concat_cols({g.slice_rows(rows, 1, 3), g.param(z)});
    return g.slice_cols(cols, 1, 6);
  });
}

TEST_CASE("pick and transpose gradients") {
  static Tensor x("x", 3, 3);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x};
    Graph::Ref t = g.transpose(g.param(x));
    return g.add(g.pick(t, 0, 2), g.pick(t, 2, 1));
  });
}

TEST_CASE("embed_rows gathers and scatters") {
  static Tensor table("table", 6, 4);
  expect_op_gradients([](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&table};
    return g.embed_rows(table, {0, 3, 3, 5});
  });
  Graph g;
  Graph::Ref e = g.embed_rows(table, {2, 2});
  CHECK(g.value(e).row(0) == table.value.row(2));
  CHECK(g.value(e).row(1) == table.value.row(2));
}

TEST_CASE("shared subgraph accumulates gradients once per use") {
  static Tensor x("x", 1, 1);
  x.value(0, 0) = 0.7;
  x.zero_grad();
  Graph g;
  Graph::Ref p = g.param(x);
  Graph::Ref reused = g.add(p, p);  // 2x
  g.backward(g.mean_all(g.add(reused, p)));  // 3x total
  CHECK(x.grad(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("attention block gradients, masked and unmasked") {
  static nn::AttentionParams attn;
  static Tensor x("x", 5, 8);
  static bool init_done = false;
  if (!init_done) {
    Rng rng(17);
    attn.init("attn", 8, rng);
    init_done = true;
  }
  Mat mask = Mat::Zero(5, 5);
  mask.col(4).setConstant(-1e9);

  expect_op_gradients([&](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x};
    attn.collect(ts);
    return attention(g, g.param(x), attn, 2, &mask);
  });
  expect_op_gradients([&](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x};
    attn.collect(ts);
    return attention(g, g.param(x), attn, 1, nullptr);
  });
}

TEST_CASE("encoder layer gradients") {
  static nn::EncoderLayerParams layer;
  static Tensor x("x", 4, 8);
  static bool init_done = false;
  if (!init_done) {
    Rng rng(23);
    layer.init("layer", 8, rng);
    init_done = true;
  }
  expect_op_gradients([&](Graph& g, std::vector<Tensor*>& ts) {
    ts = {&x};
    layer.collect(ts);
    return encoder_layer(g, g.param(x), layer, 2, nullptr);
  });
}
