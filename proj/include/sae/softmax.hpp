#pragma once

#include <array>
#include <cstddef>

#include "sae/matrix.hpp"

namespace sae {

class Rng;

// Linear map from d features to k class scores followed by softmax.
struct SoftmaxParams {
  Matrix w;  // k x d
  Matrix b;  // k x 1
  double lambda = 0.001;  // L2 on w only

  std::size_t classes() const noexcept { return w.rows(); }
  std::size_t input_width() const noexcept { return w.cols(); }

  static SoftmaxParams glorot(std::size_t k, std::size_t d, Rng& rng, double lambda = 0.001);
  void validate() const;
};

struct SoftmaxGradients {
  Matrix d_w;
  Matrix d_b;
  Matrix d_features;  // batch x d, for backprop into the encoder stack
};

std::array<Matrix*, 2> tensors(SoftmaxParams& p);
std::array<const Matrix*, 2> tensors(const SoftmaxParams& p);
// Parameter gradients only; d_features is not a trainable tensor.
std::array<Matrix*, 2> tensors(SoftmaxGradients& g);
std::array<const Matrix*, 2> tensors(const SoftmaxGradients& g);

// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& z);
Matrix logits(const SoftmaxParams& p, const Matrix& features);

// Mean cross-entropy + (lambda/2)|w|^2. Probabilities clamp at 1e-12 before log.
double sm_loss(const SoftmaxParams& p, const Matrix& features, const Matrix& labels);
SoftmaxGradients sm_gradients(const SoftmaxParams& p, const Matrix& features,
                              const Matrix& labels);

struct SoftmaxLossAndGradients {
  double loss = 0.0;
  SoftmaxGradients grads;
};
SoftmaxLossAndGradients sm_loss_and_gradients(const SoftmaxParams& p, const Matrix& features,
                                              const Matrix& labels);

// Index of the largest entry per row; ties go to the lowest index.
std::vector<std::size_t> argmax_rows(const Matrix& m);
// One-hot encoding of class indices.
Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes);

}  // namespace sae
