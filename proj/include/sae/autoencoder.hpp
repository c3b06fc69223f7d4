#pragma once

#include <array>
#include <cstddef>

#include "sae/matrix.hpp"

namespace sae {

class Rng;

// Penalty weights of one sparse autoencoder.
struct SparsityConfig {
  double rho = 0.05;     // target mean hidden activation, in (0, 1)
  double beta = 1.0;     // weight of the KL sparsity penalty
  double lambda = 0.001; // L2 decay on encoder and decoder weights (not biases)

  void validate() const;
  friend bool operator==(const SparsityConfig&, const SparsityConfig&) = default;
};

// One autoencoder with untied weights.
//   hidden = sigmoid(x * w_enc^T + b_hidden)      w_enc: m x n, b_hidden: m x 1
//   output = sigmoid(hidden * w_dec^T + b_out)    w_dec: n x m, b_out:    n x 1
struct AutoencoderParams {
  Matrix w_enc;
  Matrix b_hidden;
  Matrix w_dec;
  Matrix b_out;

  std::size_t input_width() const noexcept { return w_enc.cols(); }
  std::size_t hidden_width() const noexcept { return w_enc.rows(); }

  static AutoencoderParams zeros(std::size_t n, std::size_t m);
  // Glorot-uniform weights (encoder drawn first), zero biases.
  static AutoencoderParams glorot(std::size_t n, std::size_t m, Rng& rng);

  // Throws ShapeError if the four arrays disagree about (n, m).
  void validate() const;
};

struct LayerGradients {
  Matrix d_w_enc;
  Matrix d_b_hidden;
  Matrix d_w_dec;
  Matrix d_b_out;
};

std::array<Matrix*, 4> tensors(AutoencoderParams& p);
std::array<const Matrix*, 4> tensors(const AutoencoderParams& p);
std::array<Matrix*, 4> tensors(LayerGradients& g);
std::array<const Matrix*, 4> tensors(const LayerGradients& g);

double sigmoid(double v) noexcept;
Matrix sigmoid(const Matrix& v);

Matrix encode(const AutoencoderParams& p, const Matrix& x);
Matrix decode(const AutoencoderParams& p, const Matrix& h);

// Mean half squared reconstruction error + (lambda/2)(|w_enc|^2 + |w_dec|^2)
// + beta * sum_j KL(rho || mean activation of hidden unit j).
double ae_loss(const AutoencoderParams& p, const Matrix& x, const SparsityConfig& cfg);
LayerGradients ae_gradients(const AutoencoderParams& p, const Matrix& x,
                            const SparsityConfig& cfg);

struct LossAndGradients {
  double loss = 0.0;
  LayerGradients grads;
};
// One forward pass shared between the loss and its gradients.
LossAndGradients ae_loss_and_gradients(const AutoencoderParams& p, const Matrix& x,
                                       const SparsityConfig& cfg);

// Mean over samples and units of (output - x)^2.
double reconstruction_mse(const AutoencoderParams& p, const Matrix& x);

}  // namespace sae
