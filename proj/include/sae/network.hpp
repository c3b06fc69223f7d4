#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sae/autoencoder.hpp"
#include "sae/softmax.hpp"

namespace sae {

// Encoder stack plus softmax head. Position in `encoders` is the layer index;
// decoders stay in each record for resumed pretraining but never take part
// in inference or fine-tuning.
struct StackedNetwork {
  std::vector<AutoencoderParams> encoders;
  std::vector<SparsityConfig> sparsity;  // one per encoder
  SoftmaxParams head;

  std::size_t input_width() const;
  std::size_t classes() const noexcept { return head.classes(); }
  // [n, m1, m2, ..., k]
  std::vector<std::size_t> layer_sizes() const;

  // Checks the shape chain encoders[i].m == encoders[i+1].n, last m == head d.
  void validate() const;

  // Glorot weights drawn in layer order (encoder then decoder), head last.
  static StackedNetwork random(std::span<const std::size_t> widths, std::size_t classes,
                               std::span<const SparsityConfig> sparsity, double head_lambda,
                               Rng& rng);
};

// Throws ShapeError unless widths has at least two entries, all >= 1, and
// classes >= 2. Allocates nothing.
void validate_layer_sizes(std::span<const std::size_t> widths, std::size_t classes);

// Encoder activations for every layer: result[0] is x, result[l+1] is the
// output of encoder l.
std::vector<Matrix> forward_activations(const StackedNetwork& net, const Matrix& x);
Matrix forward_features(const StackedNetwork& net, const Matrix& x);

struct Prediction {
  std::vector<std::size_t> labels;
  Matrix probs;
};
Prediction predict(const StackedNetwork& net, const Matrix& x);

// Gradients of the supervised end-to-end loss with respect to every encoder
// (w_enc, b_hidden) and the head.
struct StackGradients {
  std::vector<Matrix> d_w_enc;
  std::vector<Matrix> d_b_hidden;
  Matrix d_w_head;
  Matrix d_b_head;
};

// Trainable tensors for fine-tuning, in a fixed order shared by both types.
std::vector<Matrix*> tensors(StackedNetwork& net);
std::vector<const Matrix*> tensors(const StackedNetwork& net);
std::vector<Matrix*> tensors(StackGradients& g);
std::vector<const Matrix*> tensors(const StackGradients& g);

// Cross-entropy of the full forward pass plus L2 on all encoder weights
// (each layer's lambda) and on the head weights.
double stack_loss(const StackedNetwork& net, const Matrix& x, const Matrix& labels);
StackGradients stack_gradients(const StackedNetwork& net, const Matrix& x, const Matrix& labels);

struct StackLossAndGradients {
  double loss = 0.0;
  StackGradients grads;
};
StackLossAndGradients stack_loss_and_gradients(const StackedNetwork& net, const Matrix& x,
                                               const Matrix& labels);

// Model file:
//   "SAEM" | u32 version | u64 layer count
//   per layer: u64 n | u64 m | w_enc | b_hidden | w_dec | b_out
//   u64 k | u64 d | head w | head b
//   per layer: f64 rho | f64 beta | f64 lambda, then f64 head lambda
// Integers and IEEE-754 doubles little-endian, matrices row-major.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize(const StackedNetwork& net);
StackedNetwork deserialize(std::span<const std::uint8_t> bytes);
std::size_t serialized_size(std::span<const std::size_t> widths, std::size_t classes);

void save_model(const StackedNetwork& net, const std::filesystem::path& path);
StackedNetwork load_model(const std::filesystem::path& path);

}  // namespace sae
