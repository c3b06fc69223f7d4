#include "sae/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sae/error.hpp"
#include "sae/rng.hpp"

namespace sae {

namespace {

constexpr double kActivationClamp = 1e-10;

void check_input(const AutoencoderParams& p, const Matrix& x, const char* op) {
  if (x.cols() != p.input_width()) {
    throw ShapeError(std::string(op) + ": input has " + std::to_string(x.cols()) +
                     " columns, layer expects " + std::to_string(p.input_width()));
  }
  if (x.rows() == 0) throw ShapeError(std::string(op) + ": empty batch");
}

double kl_divergence(double p, double q) {
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

}  // namespace

void SparsityConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("sparsity rho must lie in (0, 1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("sparsity beta must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be >= 0");
}

AutoencoderParams AutoencoderParams::zeros(std::size_t n, std::size_t m) {
  return {Matrix(m, n), Matrix(m, 1), Matrix(n, m), Matrix(n, 1)};
}

AutoencoderParams AutoencoderParams::glorot(std::size_t n, std::size_t m, Rng& rng) {
  AutoencoderParams p;
  p.w_enc = glorot_init(m, n, rng);
  p.b_hidden = Matrix(m, 1);
  p.w_dec = glorot_init(n, m, rng);
  p.b_out = Matrix(n, 1);
  return p;
}

void AutoencoderParams::validate() const {
  const std::size_t n = input_width();
  const std::size_t m = hidden_width();
  if (n == 0 || m == 0) throw ShapeError("autoencoder has a zero dimension");
  if (b_hidden.rows() != m || b_hidden.cols() != 1 || w_dec.rows() != n ||
      w_dec.cols() != m || b_out.rows() != n || b_out.cols() != 1) {
    throw ShapeError("autoencoder arrays inconsistent: w_enc " + w_enc.shape() + ", b_hidden " +
                     b_hidden.shape() + ", w_dec " + w_dec.shape() + ", b_out " +
                     b_out.shape());
  }
}

std::array<Matrix*, 4> tensors(AutoencoderParams& p) {
  return {&p.w_enc, &p.b_hidden, &p.w_dec, &p.b_out};
}
std::array<const Matrix*, 4> tensors(const AutoencoderParams& p) {
  return {&p.w_enc, &p.b_hidden, &p.w_dec, &p.b_out};
}
std::array<Matrix*, 4> tensors(LayerGradients& g) {
  return {&g.d_w_enc, &g.d_b_hidden, &g.d_w_dec, &g.d_b_out};
}
std::array<const Matrix*, 4> tensors(const LayerGradients& g) {
  return {&g.d_w_enc, &g.d_b_hidden, &g.d_w_dec, &g.d_b_out};
}

// Branch on the sign so exp never overflows; the result is kept strictly
// inside (0, 1) even where it would round to an endpoint.
double sigmoid(double v) noexcept {
  constexpr double kTop = 1.0 - 0x1.0p-53;
  constexpr double kBottom = std::numeric_limits<double>::denorm_min();
  if (v >= 0.0) return std::min(1.0 / (1.0 + std::exp(-v)), kTop);
  const double e = std::exp(v);
  return std::max(e / (1.0 + e), kBottom);
}

Matrix sigmoid(const Matrix& v) {
  return map_scalar(v, [](double x) { return sigmoid(x); });
}

Matrix encode(const AutoencoderParams& p, const Matrix& x) {
  if (x.cols() != p.input_width()) {
    throw ShapeError("encode: input has " + std::to_string(x.cols()) +
                     " columns, layer expects " + std::to_string(p.input_width()));
  }
  return sigmoid(add_row_bias(matmul_nt(x, p.w_enc), p.b_hidden));
}

Matrix decode(const AutoencoderParams& p, const Matrix& h) {
  if (h.cols() != p.hidden_width()) {
    throw ShapeError("decode: input has " + std::to_string(h.cols()) +
                     " columns, layer expects " + std::to_string(p.hidden_width()));
  }
  return sigmoid(add_row_bias(matmul_nt(h, p.w_dec), p.b_out));
}

double ae_loss(const AutoencoderParams& p, const Matrix& x, const SparsityConfig& cfg) {
  check_input(p, x, "ae_loss");
  const Matrix h = encode(p, x);
  const Matrix y = decode(p, h);
  const auto batch = static_cast<double>(x.rows());

  const double reconstruction = 0.5 * frobenius_sq(sub(y, x)) / batch;
  const double decay = 0.5 * cfg.lambda * (frobenius_sq(p.w_enc) + frobenius_sq(p.w_dec));
  double sparsity = 0.0;
  if (cfg.beta != 0.0) {
    const Matrix mean_act = column_sums(h);
    for (double s : mean_act.data()) {
      const double q = std::clamp(s / batch, kActivationClamp, 1.0 - kActivationClamp);
      sparsity += kl_divergence(cfg.rho, q);
    }
    sparsity *= cfg.beta;
  }
  return reconstruction + decay + sparsity;
}

LossAndGradients ae_loss_and_gradients(const AutoencoderParams& p, const Matrix& x,
                                       const SparsityConfig& cfg) {
  check_input(p, x, "ae_gradients");
  const Matrix h = encode(p, x);
  const Matrix y = decode(p, h);
  const auto batch = static_cast<double>(x.rows());
  const std::size_t m = p.hidden_width();

  LossAndGradients out;
  const Matrix residual = sub(y, x);
  out.loss = 0.5 * frobenius_sq(residual) / batch +
             0.5 * cfg.lambda * (frobenius_sq(p.w_enc) + frobenius_sq(p.w_dec));

  // Output pre-activation sensitivity.
  Matrix delta_out(y.rows(), y.cols());
  {
    auto r = residual.data();
    auto yy = y.data();
    auto d = delta_out.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = r[i] * yy[i] * (1.0 - yy[i]) / batch;
  }
  out.grads.d_w_dec = matmul_tn(delta_out, h);
  subtract_scaled(out.grads.d_w_dec, -cfg.lambda, p.w_dec);
  out.grads.d_b_out = column_sums(delta_out);

  Matrix d_hidden = matmul(delta_out, p.w_dec);
  if (cfg.beta != 0.0) {
    const Matrix act_sum = column_sums(h);
    std::vector<double> sparsity_term(m);
    double penalty = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double q = std::clamp(act_sum(j, 0) / batch, kActivationClamp, 1.0 - kActivationClamp);
      penalty += kl_divergence(cfg.rho, q);
      sparsity_term[j] = cfg.beta * (-cfg.rho / q + (1.0 - cfg.rho) / (1.0 - q)) / batch;
    }
    out.loss += cfg.beta * penalty;
    for (std::size_t r = 0; r < d_hidden.rows(); ++r) {
      auto row = d_hidden.row(r);
      for (std::size_t j = 0; j < m; ++j) row[j] += sparsity_term[j];
    }
  }

  Matrix delta_hidden = std::move(d_hidden);
  {
    auto hh = h.data();
    auto d = delta_hidden.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= hh[i] * (1.0 - hh[i]);
  }
  out.grads.d_w_enc = matmul_tn(delta_hidden, x);
  subtract_scaled(out.grads.d_w_enc, -cfg.lambda, p.w_enc);
  out.grads.d_b_hidden = column_sums(delta_hidden);
  return out;
}

LayerGradients ae_gradients(const AutoencoderParams& p, const Matrix& x,
                            const SparsityConfig& cfg) {
  return ae_loss_and_gradients(p, x, cfg).grads;
}

double reconstruction_mse(const AutoencoderParams& p, const Matrix& x) {
  check_input(p, x, "reconstruction_mse");
  const Matrix y = decode(p, encode(p, x));
  return frobenius_sq(sub(y, x)) / static_cast<double>(x.size());
}

}  // namespace sae
