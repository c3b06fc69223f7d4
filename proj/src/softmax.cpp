#include "sae/softmax.hpp"

#include <algorithm>
#include <cmath>

#include "sae/error.hpp"
#include "sae/rng.hpp"

namespace sae {

namespace {

constexpr double kProbabilityFloor = 1e-12;

void check_batch(const SoftmaxParams& p, const Matrix& features, const Matrix& labels) {
  if (features.cols() != p.input_width()) {
    throw ShapeError("softmax: features have " + std::to_string(features.cols()) +
                     " columns, head expects " + std::to_string(p.input_width()));
  }
  if (labels.rows() != features.rows() || labels.cols() != p.classes()) {
    throw ShapeError("softmax: labels " + labels.shape() + " do not match features " +
                     features.shape() + " with " + std::to_string(p.classes()) + " classes");
  }
  if (features.rows() == 0) throw ShapeError("softmax: empty batch");
}

}  // namespace

SoftmaxParams SoftmaxParams::glorot(std::size_t k, std::size_t d, Rng& rng, double lambda) {
  return {glorot_init(k, d, rng), Matrix(k, 1), lambda};
}

void SoftmaxParams::validate() const {
  if (classes() < 2) throw ShapeError("softmax head needs at least 2 classes");
  if (input_width() == 0) throw ShapeError("softmax head has zero input width");
  if (b.rows() != classes() || b.cols() != 1) {
    throw ShapeError("softmax bias " + b.shape() + " does not match weights " + w.shape());
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("head lambda must be >= 0");
}

std::array<Matrix*, 2> tensors(SoftmaxParams& p) { return {&p.w, &p.b}; }
std::array<const Matrix*, 2> tensors(const SoftmaxParams& p) { return {&p.w, &p.b}; }
std::array<Matrix*, 2> tensors(SoftmaxGradients& g) { return {&g.d_w, &g.d_b}; }
std::array<const Matrix*, 2> tensors(const SoftmaxGradients& g) { return {&g.d_w, &g.d_b}; }

Matrix softmax(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto in = z.row(r);
    auto dst = out.row(r);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      dst[c] = std::exp(in[c] - peak);
      total += dst[c];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

Matrix logits(const SoftmaxParams& p, const Matrix& features) {
  if (features.cols() != p.input_width()) {
    throw ShapeError("softmax: features have " + std::to_string(features.cols()) +
                     " columns, head expects " + std::to_string(p.input_width()));
  }
  return add_row_bias(matmul_nt(features, p.w), p.b);
}

double sm_loss(const SoftmaxParams& p, const Matrix& features, const Matrix& labels) {
  check_batch(p, features, labels);
  const Matrix probs = softmax(logits(p, features));
  double ce = 0.0;
  auto pr = probs.data();
  auto lb = labels.data();
  for (std::size_t i = 0; i < pr.size(); ++i) {
    if (lb[i] != 0.0) ce -= lb[i] * std::log(std::max(pr[i], kProbabilityFloor));
  }
  return ce / static_cast<double>(features.rows()) + 0.5 * p.lambda * frobenius_sq(p.w);
}

SoftmaxLossAndGradients sm_loss_and_gradients(const SoftmaxParams& p, const Matrix& features,
                                              const Matrix& labels) {
  check_batch(p, features, labels);
  const auto batch = static_cast<double>(features.rows());
  const Matrix probs = softmax(logits(p, features));

  SoftmaxLossAndGradients out;
  double ce = 0.0;
  Matrix delta(probs.rows(), probs.cols());
  auto pr = probs.data();
  auto lb = labels.data();
  auto d = delta.data();
  for (std::size_t i = 0; i < pr.size(); ++i) {
    if (lb[i] != 0.0) ce -= lb[i] * std::log(std::max(pr[i], kProbabilityFloor));
    d[i] = (pr[i] - lb[i]) / batch;
  }
  out.loss = ce / batch + 0.5 * p.lambda * frobenius_sq(p.w);
  out.grads.d_w = matmul_tn(delta, features);
  subtract_scaled(out.grads.d_w, -p.lambda, p.w);
  out.grads.d_b = column_sums(delta);
  out.grads.d_features = matmul(delta, p.w);
  return out;
}

SoftmaxGradients sm_gradients(const SoftmaxParams& p, const Matrix& features,
                              const Matrix& labels) {
  return sm_loss_and_gradients(p, features, labels).grads;
}

std::vector<std::size_t> argmax_rows(const Matrix& m) {
  std::vector<std::size_t> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    // max_element returns the first maximum.
    out[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes) {
  Matrix out(labels.size(), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) {
      throw ShapeError("label " + std::to_string(labels[i]) + " out of range for " +
                       std::to_string(classes) + " classes");
    }
    out(i, labels[i]) = 1.0;
  }
  return out;
}

}  // namespace sae
