#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace taxo::nn {

using Mat = Eigen::MatrixXd;

// A trainable parameter tensor. `grad` accumulates across backward passes
// until the optimizer consumes and clears it.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;

  Tensor() = default;
  Tensor(std::string n, int rows, int cols)
      : name(std::move(n)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}

  int rows() const { return static_cast<int>(value.rows()); }
  int cols() const { return static_cast<int>(value.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(value.size()); }
  void zero_grad() { grad.setZero(); }
};

// Tape-based reverse-mode autodiff over dense matrices. One Graph instance
// records one forward computation; backward() walks the tape in reverse and
// accumulates into Tensor::grad for every Param/EmbedRows leaf. Graphs are
// cheap to build and are discarded after each step.
class Graph {
 public:
  using Ref = int;

  // Leaves.
  Ref input(Mat m);                                  // constant, no gradient
  Ref param(Tensor& t);                              // full tensor leaf
  Ref embed_rows(Tensor& t, std::vector<int> rows);  // row gather, scatter-add on backward

  // Linear algebra.
  Ref matmul(Ref a, Ref b);
  Ref transpose(Ref a);
  Ref add(Ref a, Ref b);           // same shape
  Ref add_row(Ref x, Ref bias);    // bias (1 x c) broadcast over rows of x
  Ref mul(Ref a, Ref b);           // elementwise
  Ref scale(Ref a, double s);

  // Nonlinearities.
  Ref tanh_(Ref a);
  Ref sigmoid_(Ref a);
  Ref gelu_(Ref a);
  Ref softmax_rows(Ref a);
  Ref log_(Ref a);  // clamps at 1e-12 before the log
  Ref layer_norm(Ref x, Ref gain, Ref bias);  // per-row, eps 1e-5

  // Shape plumbing.
  Ref concat_rows(const std::vector<Ref>& parts);
  Ref concat_cols(const std::vector<Ref>& parts);
  Ref slice_rows(Ref a, int r0, int r1);
  Ref slice_cols(Ref a, int c0, int c1);
  Ref pick(Ref a, int r, int c);  // 1x1 view of one entry
  Ref mean_all(Ref a);            // 1x1

  const Mat& value(Ref r) const { return nodes_[static_cast<std::size_t>(r)].value; }
  double scalar(Ref r) const { return nodes_[static_cast<std::size_t>(r)].value(0, 0); }

  // Seeds d(root)/d(root) = 1 and accumulates gradients into every bound
  // Tensor. `root` must be 1x1.
  void backward(Ref root);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    Input,
    Param,
    EmbedRows,
    MatMul,
    Transpose,
    Add,
    AddRow,
    Mul,
    Scale,
    Tanh,
    Sigmoid,
    Gelu,
    SoftmaxRows,
    Log,
    LayerNorm,
    ConcatRows,
    ConcatCols,
    SliceRows,
    SliceCols,
    Pick,
    MeanAll,
  };

  struct Node {
    Op op;
    Mat value;
    Mat grad;
    bool grad_ready = false;
    Ref a = -1, b = -1, c = -1;
    std::vector<Ref> list;
    double s = 0.0;
    int i0 = 0, i1 = 0;
    Tensor* tensor = nullptr;
    std::vector<int> rows;
    Mat aux;  // op-specific forward stats reused by backward
  };

  Ref push(Node n);
  Node& at(Ref r) { return nodes_[static_cast<std::size_t>(r)]; }
  void ensure_grad(Node& n);
  void add_grad(Ref r, const Mat& g);

  std::vector<Node> nodes_;
};

}  // namespace taxo::nn
