#pragma once

#include <cmath>
#include <vector>

#include "taxo/graph.hpp"

namespace taxo::nn {

// Adam with decoupled weight decay. Decay is multiplied by the step's
// learning rate, so lr == 0 is an exact no-op on parameter values.
class AdamW {
 public:
  explicit AdamW(std::vector<Tensor*> params, double weight_decay = 0.01, double beta1 = 0.9,
                 double beta2 = 0.999, double eps = 1e-6)
      : params_(std::move(params)), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (Tensor* t : params_) {
      m_.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
      v_.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
    }
  }

  // Applies one update from the accumulated gradients, then clears them.
  void step(double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(b1_, t_);
    const double bc2 = 1.0 - std::pow(b2_, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Tensor& p = *params_[i];
      m_[i] = b1_ * m_[i] + (1.0 - b1_) * p.grad;
      v_[i] = b2_ * v_[i] + (1.0 - b2_) * p.grad.cwiseProduct(p.grad);
      Mat mhat = m_[i] / bc1;
      Mat vhat = v_[i] / bc2;
      p.value -= lr * (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
      p.value -= (lr * wd_) * p.value;
      p.zero_grad();
    }
  }

  void zero_grad() {
    for (Tensor* t : params_) t->zero_grad();
  }

 private:
  std::vector<Tensor*> params_;
  std::vector<Mat> m_, v_;
  double wd_, b1_, b2_, eps_;
  long t_ = 0;
};

}  // namespace taxo::nn
