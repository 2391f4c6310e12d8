#include "taxo/graph.hpp"

#include <cassert>
#include <cmath>

#include "taxo/errors.hpp"

namespace taxo::nn {

namespace {

constexpr double kLogFloor = 1e-12;
constexpr double kLnEps = 1e-5;  // layer norm epsilon

double gelu_scalar(double x) {
  return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2));
}

double gelu_deriv(double x) {
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  const double Phi = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  return Phi + x * phi;
}

}  // namespace

Graph::Ref Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Ref>(nodes_.size() - 1);
}

Graph::Ref Graph::input(Mat m) {
  Node n;
  n.op = Op::Input;
  n.value = std::move(m);
  return push(std::move(n));
}

Graph::Ref Graph::param(Tensor& t) {
  Node n;
  n.op = Op::Param;
  n.value = t.value;
  n.tensor = &t;
  return push(std::move(n));
}

Graph::Ref Graph::embed_rows(Tensor& t, std::vector<int> rows) {
  Node n;
  n.op = Op::EmbedRows;
  n.tensor = &t;
  n.value.resize(static_cast<Eigen::Index>(rows.size()), t.value.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= t.rows())
      throw DataError("embed_rows: index " + std::to_string(rows[i]) + " out of range for " + t.name);
    n.value.row(static_cast<Eigen::Index>(i)) = t.value.row(rows[i]);
  }
  n.rows = std::move(rows);
  return push(std::move(n));
}

Graph::Ref Graph::matmul(Ref a, Ref b) {
  Node n;
  n.op = Op::MatMul;
  n.a = a;
  n.b = b;
  n.value = at(a).value * at(b).value;
  return push(std::move(n));
}

Graph::Ref Graph::transpose(Ref a) {
  Node n;
  n.op = Op::Transpose;
  n.a = a;
  n.value = at(a).value.transpose();
  return push(std::move(n));
}

Graph::Ref Graph::add(Ref a, Ref b) {
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  n.value = at(a).value + at(b).value;
  return push(std::move(n));
}

Graph::Ref Graph::add_row(Ref x, Ref bias) {
  Node n;
  n.op = Op::AddRow;
  n.a = x;
  n.b = bias;
  n.value = at(x).value.rowwise() + at(bias).value.row(0);
  return push(std::move(n));
}

Graph::Ref Graph::mul(Ref a, Ref b) {
  Node n;
  n.op = Op::Mul;
  n.a = a;
  n.b = b;
  n.value = at(a).value.cwiseProduct(at(b).value);
  return push(std::move(n));
}

Graph::Ref Graph::scale(Ref a, double s) {
  Node n;
  n.op = Op::Scale;
  n.a = a;
  n.s = s;
  n.value = at(a).value * s;
  return push(std::move(n));
}

Graph::Ref Graph::tanh_(Ref a) {
  Node n;
  n.op = Op::Tanh;
  n.a = a;
  n.value = at(a).value.array().tanh();
  return push(std::move(n));
}

Graph::Ref Graph::sigmoid_(Ref a) {
  Node n;
  n.op = Op::Sigmoid;
  n.a = a;
  const Mat& x = at(a).value;
  n.value.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x(i);
    n.value(i) = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  return push(std::move(n));
}

Graph::Ref Graph::gelu_(Ref a) {
  Node n;
  n.op = Op::Gelu;
  n.a = a;
  const Mat& x = at(a).value;
  n.value.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) n.value(i) = gelu_scalar(x(i));
  return push(std::move(n));
}

Graph::Ref Graph::softmax_rows(Ref a) {
  Node n;
  n.op = Op::SoftmaxRows;
  n.a = a;
  const Mat& x = at(a).value;
  n.value.resize(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    Eigen::Array<double, 1, Eigen::Dynamic> e = (x.row(r).array() - m).exp();
    n.value.row(r) = (e / e.sum()).matrix();
  }
  return push(std::move(n));
}

Graph::Ref Graph::log_(Ref a) {
  Node n;
  n.op = Op::Log;
  n.a = a;
  n.value = at(a).value.cwiseMax(kLogFloor).array().log();
  return push(std::move(n));
}

Graph::Ref Graph::layer_norm(Ref x, Ref gain, Ref bias) {
  Node n;
  n.op = Op::LayerNorm;
  n.a = x;
  n.b = gain;
  n.c = bias;
  const Mat& xv = at(x).value;
  const Eigen::Index rows = xv.rows(), cols = xv.cols();
  n.value.resize(rows, cols);
  n.aux.resize(rows, 2);  // column 0: mean, column 1: inv std
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mu = xv.row(r).mean();
    const double var = (xv.row(r).array() - mu).square().mean();
    const double inv = 1.0 / std::sqrt(var + kLnEps);
    n.aux(r, 0) = mu;
    n.aux(r, 1) = inv;
    n.value.row(r) =
        (((xv.row(r).array() - mu) * inv) * at(gain).value.row(0).array() + at(bias).value.row(0).array())
            .matrix();
  }
  return push(std::move(n));
}

Graph::Ref Graph::concat_rows(const std::vector<Ref>& parts) {
  Node n;
  n.op = Op::ConcatRows;
  n.list = parts;
  Eigen::Index rows = 0;
  const Eigen::Index cols = at(parts.front()).value.cols();
  for (Ref p : parts) rows += at(p).value.rows();
  n.value.resize(rows, cols);
  Eigen::Index r = 0;
  for (Ref p : parts) {
    n.value.middleRows(r, at(p).value.rows()) = at(p).value;
    r += at(p).value.rows();
  }
  return push(std::move(n));
}

Graph::Ref Graph::concat_cols(const std::vector<Ref>& parts) {
  Node n;
  n.op = Op::ConcatCols;
  n.list = parts;
  Eigen::Index cols = 0;
  const Eigen::Index rows = at(parts.front()).value.rows();
  for (Ref p : parts) cols += at(p).value.cols();
  n.value.resize(rows, cols);
  Eigen::Index c = 0;
  for (Ref p : parts) {
    n.value.middleCols(c, at(p).value.cols()) = at(p).value;
    c += at(p).value.cols();
  }
  return push(std::move(n));
}

Graph::Ref Graph::slice_rows(Ref a, int r0, int r1) {
  Node n;
  n.op = Op::SliceRows;
  n.a = a;
  n.i0 = r0;
  n.i1 = r1;
  n.value = at(a).value.middleRows(r0, r1 - r0);
  return push(std::move(n));
}

Graph::Ref Graph::slice_cols(Ref a, int c0, int c1) {
  Node n;
  n.op = Op::SliceCols;
  n.a = a;
  n.i0 = c0;
  n.i1 = c1;
  n.value = at(a).value.middleCols(c0, c1 - c0);
  return push(std::move(n));
}

Graph::Ref Graph::pick(Ref a, int r, int c) {
  Node n;
  n.op = Op::Pick;
  n.a = a;
  n.i0 = r;
  n.i1 = c;
  n.value = Mat::Constant(1, 1, at(a).value(r, c));
  return push(std::move(n));
}

Graph::Ref Graph::mean_all(Ref a) {
  Node n;
  n.op = Op::MeanAll;
  n.a = a;
  n.value = Mat::Constant(1, 1, at(a).value.mean());
  return push(std::move(n));
}

void Graph::ensure_grad(Node& n) {
  if (!n.grad_ready) {
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    n.grad_ready = true;
  }
}

void Graph::add_grad(Ref r, const Mat& g) {
  Node& n = at(r);
  ensure_grad(n);
  n.grad += g;
}

void Graph::backward(Ref root) {
  Node& top = at(root);
  assert(top.value.rows() == 1 && top.value.cols() == 1);
  ensure_grad(top);
  top.grad(0, 0) += 1.0;

  for (Ref r = root; r >= 0; --r) {
    Node& n = at(r);
    if (!n.grad_ready) continue;
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::Input:
        break;
      case Op::Param:
        n.tensor->grad += g;
        break;
      case Op::EmbedRows:
        for (std::size_t i = 0; i < n.rows.size(); ++i)
          n.tensor->grad.row(n.rows[i]) += g.row(static_cast<Eigen::Index>(i));
        break;
      case Op::MatMul:
        add_grad(n.a, g * at(n.b).value.transpose());
        add_grad(n.b, at(n.a).value.transpose() * g);
        break;
      case Op::Transpose:
        add_grad(n.a, g.transpose());
        break;
      case Op::Add:
        add_grad(n.a, g);
        add_grad(n.b, g);
        break;
      case Op::AddRow:
        add_grad(n.a, g);
        add_grad(n.b, g.colwise().sum());
        break;
      case Op::Mul:
        add_grad(n.a, g.cwiseProduct(at(n.b).value));
        add_grad(n.b, g.cwiseProduct(at(n.a).value));
        break;
      case Op::Scale:
        add_grad(n.a, g * n.s);
        break;
      case Op::Tanh:
        add_grad(n.a, g.cwiseProduct((1.0 - n.value.array().square()).matrix()));
        break;
      case Op::Sigmoid:
        add_grad(n.a, g.cwiseProduct(n.value.cwiseProduct((1.0 - n.value.array()).matrix())));
        break;
      case Op::Gelu: {
        const Mat& x = at(n.a).value;
        Mat d(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i) d(i) = gelu_deriv(x(i));
        add_grad(n.a, g.cwiseProduct(d));
        break;
      }
      case Op::SoftmaxRows: {
        Mat d(n.value.rows(), n.value.cols());
        for (Eigen::Index row = 0; row < n.value.rows(); ++row) {
          const double dot = g.row(row).dot(n.value.row(row));
          d.row(row) = n.value.row(row).cwiseProduct((g.row(row).array() - dot).matrix());
        }
        add_grad(n.a, d);
        break;
      }
      case Op::Log: {
        const Mat& x = at(n.a).value;
        Mat d(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i) d(i) = x(i) > kLogFloor ? g(i) / x(i) : 0.0;
        add_grad(n.a, d);
        break;
      }
      case Op::LayerNorm: {
        const Mat& x = at(n.a).value;
        const Mat& gain = at(n.b).value;
        const Eigen::Index rows = x.rows(), cols = x.cols();
        Mat dx(rows, cols), dgain = Mat::Zero(1, cols), dbias = Mat::Zero(1, cols);
        using RowArr = Eigen::Array<double, 1, Eigen::Dynamic>;
        for (Eigen::Index row = 0; row < rows; ++row) {
          const double mu = n.aux(row, 0), inv = n.aux(row, 1);
          RowArr xhat = (x.row(row).array() - mu) * inv;
          RowArr grow = g.row(row).array();
          dgain.row(0).array() += grow * xhat;
          dbias.row(0).array() += grow;
          RowArr dxhat = grow * gain.row(0).array();
          const double m1 = dxhat.mean();
          const double m2 = (dxhat * xhat).mean();
          dx.row(row) = (inv * (dxhat - m1 - xhat * m2)).matrix();
        }
        add_grad(n.a, dx);
        add_grad(n.b, dgain);
        add_grad(n.c, dbias);
        break;
      }
      case Op::ConcatRows: {
        Eigen::Index row = 0;
        for (Ref p : n.list) {
          const Eigen::Index pr = at(p).value.rows();
          add_grad(p, g.middleRows(row, pr));
          row += pr;
        }
        break;
      }
      case Op::ConcatCols: {
        Eigen::Index col = 0;
        for (Ref p : n.list) {
          const Eigen::Index pc = at(p).value.cols();
          add_grad(p, g.middleCols(col, pc));
          col += pc;
        }
        break;
      }
      case Op::SliceRows: {
        Node& pa = at(n.a);
        ensure_grad(pa);
        pa.grad.middleRows(n.i0, n.i1 - n.i0) += g;
        break;
      }
      case Op::SliceCols: {
        Node& pa = at(n.a);
        ensure_grad(pa);
        pa.grad.middleCols(n.i0, n.i1 - n.i0) += g;
        break;
      }
      case Op::Pick: {
        Node& pa = at(n.a);
        ensure_grad(pa);
        pa.grad(n.i0, n.i1) += g(0, 0);
        break;
      }
      case Op::MeanAll: {
        Node& pa = at(n.a);
        ensure_grad(pa);
        pa.grad.array() += g(0, 0) / static_cast<double>(pa.value.size());
        break;
      }
    }
  }
}

}  // namespace taxo::nn
