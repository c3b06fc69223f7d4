#include "sae/network.hpp"

#include "sae/error.hpp"
#include "sae/rng.hpp"

namespace sae {

std::size_t StackedNetwork::input_width() const {
  return encoders.empty() ? head.input_width() : encoders.front().input_width();
}

std::vector<std::size_t> StackedNetwork::layer_sizes() const {
  std::vector<std::size_t> out;
  out.push_back(input_width());
  for (const auto& e : encoders) out.push_back(e.hidden_width());
  out.push_back(classes());
  return out;
}

void StackedNetwork::validate() const {
  if (encoders.empty()) throw ShapeError("network has no encoder layers");
  if (sparsity.size() != encoders.size()) {
    throw ShapeError("network has " + std::to_string(encoders.size()) + " encoders but " +
                     std::to_string(sparsity.size()) + " sparsity records");
  }
  for (std::size_t i = 0; i < encoders.size(); ++i) {
    encoders[i].validate();
    sparsity[i].validate();
    if (i + 1 < encoders.size() &&
        encoders[i].hidden_width() != encoders[i + 1].input_width()) {
      throw ShapeError("layer " + std::to_string(i + 1) + " emits " +
                       std::to_string(encoders[i].hidden_width()) + " features but layer " +
                       std::to_string(i + 2) + " expects " +
                       std::to_string(encoders[i + 1].input_width()));
    }
  }
  head.validate();
  if (encoders.back().hidden_width() != head.input_width()) {
    throw ShapeError("last encoder emits " + std::to_string(encoders.back().hidden_width()) +
                     " features but the head expects " + std::to_string(head.input_width()));
  }
}

void validate_layer_sizes(std::span<const std::size_t> widths, std::size_t classes) {
  if (widths.size() < 2) throw ShapeError("need an input width and at least one hidden width");
  for (std::size_t w : widths) {
    if (w == 0) throw ShapeError("layer widths must be >= 1");
  }
  if (classes < 2) throw ShapeError("need at least 2 classes");
}

StackedNetwork StackedNetwork::random(std::span<const std::size_t> widths, std::size_t classes,
                                      std::span<const SparsityConfig> sparsity,
                                      double head_lambda, Rng& rng) {
  validate_layer_sizes(widths, classes);
  const std::size_t layers = widths.size() - 1;
  if (sparsity.size() != layers && sparsity.size() != 1) {
    throw ParameterError("expected 1 or " + std::to_string(layers) + " sparsity configs");
  }
  StackedNetwork net;
  for (std::size_t l = 0; l < layers; ++l) {
    net.encoders.push_back(AutoencoderParams::glorot(widths[l], widths[l + 1], rng));
    net.sparsity.push_back(sparsity.size() == 1 ? sparsity[0] : sparsity[l]);
  }
  net.head = SoftmaxParams::glorot(classes, widths.back(), rng, head_lambda);
  net.validate();
  return net;
}

std::vector<Matrix> forward_activations(const StackedNetwork& net, const Matrix& x) {
  if (x.cols() != net.input_width()) {
    throw ShapeError("input has " + std::to_string(x.cols()) + " columns, network expects " +
                     std::to_string(net.input_width()));
  }
  std::vector<Matrix> acts;
  acts.reserve(net.encoders.size() + 1);
  acts.push_back(x);
  for (const auto& e : net.encoders) acts.push_back(encode(e, acts.back()));
  return acts;
}

Matrix forward_features(const StackedNetwork& net, const Matrix& x) {
  if (x.cols() != net.input_width()) {
    throw ShapeError("input has " + std::to_string(x.cols()) + " columns, network expects " +
                     std::to_string(net.input_width()));
  }
  Matrix h = encode(net.encoders.front(), x);
  for (std::size_t l = 1; l < net.encoders.size(); ++l) h = encode(net.encoders[l], h);
  return h;
}

Prediction predict(const StackedNetwork& net, const Matrix& x) {
  Prediction out;
  out.probs = softmax(logits(net.head, forward_features(net, x)));
  out.labels = argmax_rows(out.probs);
  return out;
}

std::vector<Matrix*> tensors(StackedNetwork& net) {
  std::vector<Matrix*> out;
  for (auto& e : net.encoders) {
    out.push_back(&e.w_enc);
    out.push_back(&e.b_hidden);
  }
  out.push_back(&net.head.w);
  out.push_back(&net.head.b);
  return out;
}

std::vector<const Matrix*> tensors(const StackedNetwork& net) {
  std::vector<const Matrix*> out;
  for (const auto& e : net.encoders) {
    out.push_back(&e.w_enc);
    out.push_back(&e.b_hidden);
  }
  out.push_back(&net.head.w);
  out.push_back(&net.head.b);
  return out;
}

std::vector<Matrix*> tensors(StackGradients& g) {
  std::vector<Matrix*> out;
  for (std::size_t l = 0; l < g.d_w_enc.size(); ++l) {
    out.push_back(&g.d_w_enc[l]);
    out.push_back(&g.d_b_hidden[l]);
  }
  out.push_back(&g.d_w_head);
  out.push_back(&g.d_b_head);
  return out;
}

std::vector<const Matrix*> tensors(const StackGradients& g) {
  std::vector<const Matrix*> out;
  for (std::size_t l = 0; l < g.d_w_enc.size(); ++l) {
    out.push_back(&g.d_w_enc[l]);
    out.push_back(&g.d_b_hidden[l]);
  }
  out.push_back(&g.d_w_head);
  out.push_back(&g.d_b_head);
  return out;
}

namespace {

double encoder_decay(const StackedNetwork& net) {
  double decay = 0.0;
  for (std::size_t l = 0; l < net.encoders.size(); ++l) {
    decay += 0.5 * net.sparsity[l].lambda * frobenius_sq(net.encoders[l].w_enc);
  }
  return decay;
}

}  // namespace

double stack_loss(const StackedNetwork& net, const Matrix& x, const Matrix& labels) {
  return sm_loss(net.head, forward_features(net, x), labels) + encoder_decay(net);
}

StackLossAndGradients stack_loss_and_gradients(const StackedNetwork& net, const Matrix& x,
                                               const Matrix& labels) {
  const std::vector<Matrix> acts = forward_activations(net, x);
  auto head = sm_loss_and_gradients(net.head, acts.back(), labels);

  StackLossAndGradients out;
  out.loss = head.loss + encoder_decay(net);
  const std::size_t layers = net.encoders.size();
  out.grads.d_w_enc.resize(layers);
  out.grads.d_b_hidden.resize(layers);
  out.grads.d_w_head = std::move(head.grads.d_w);
  out.grads.d_b_head = std::move(head.grads.d_b);

  Matrix upstream = std::move(head.grads.d_features);
  for (std::size_t l = layers; l-- > 0;) {
    const Matrix& h = acts[l + 1];
    Matrix delta = std::move(upstream);
    auto d = delta.data();
    auto hh = h.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= hh[i] * (1.0 - hh[i]);

    out.grads.d_w_enc[l] = matmul_tn(delta, acts[l]);
    subtract_scaled(out.grads.d_w_enc[l], -net.sparsity[l].lambda, net.encoders[l].w_enc);
    out.grads.d_b_hidden[l] = column_sums(delta);
    if (l > 0) upstream = matmul(delta, net.encoders[l].w_enc);
  }
  return out;
}

StackGradients stack_gradients(const StackedNetwork& net, const Matrix& x, const Matrix& labels) {
  return stack_loss_and_gradients(net, x, labels).grads;
}

}  // namespace sae
