#include "sae/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sae/error.hpp"
#include "sae/rng.hpp"

namespace sae {

std::vector<Matrix> finite_diff(const std::function<double()>& loss,
                                std::span<Matrix* const> params, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("finite_diff: epsilon must be > 0");
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (Matrix* p : params) {
    Matrix g(p->rows(), p->cols());
    auto values = p->data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + epsilon;
      const double up = loss();
      values[i] = original - epsilon;
      const double down = loss();
      values[i] = original;
      g.data()[i] = (up - down) / (2.0 * epsilon);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

LayerGradients finite_diff_gradient(const std::function<double(const AutoencoderParams&)>& loss,
                                    AutoencoderParams params, double epsilon) {
  auto ptrs = tensors(params);
  auto g = finite_diff([&] { return loss(params); }, ptrs, epsilon);
  return {std::move(g[0]), std::move(g[1]), std::move(g[2]), std::move(g[3])};
}

double relative_error(double a, double b) noexcept {
  return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

double max_relative_error(std::span<const Matrix* const> a, std::span<const Matrix* const> b) {
  if (a.size() != b.size()) throw ShapeError("max_relative_error: tensor count mismatch");
  double worst = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (!a[t]->same_shape(*b[t])) {
      throw ShapeError("max_relative_error: " + a[t]->shape() + " vs " + b[t]->shape());
    }
    auto x = a[t]->data();
    auto y = b[t]->data();
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, relative_error(x[i], y[i]));
  }
  return worst;
}

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

Matrix random_one_hot(std::size_t rows, std::size_t classes, Rng& rng) {
  std::vector<std::size_t> labels(rows);
  for (auto& l : labels) l = static_cast<std::size_t>(rng.below(classes));
  return one_hot(labels, classes);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

template <class T, std::size_t N>
T pick_from(Rng& rng, const std::array<T, N>& choices) {
  return choices[rng.below(N)];
}

constexpr std::array<double, 3> kPenalties = {0.0, 0.001, 0.1};
constexpr std::array<double, 2> kTargets = {0.05, 0.5};

template <class A, class B>
double compare(const A& analytic, const B& numeric) {
  auto a = tensors(analytic);
  std::vector<const Matrix*> b;
  for (const Matrix& m : numeric) b.push_back(&m);
  std::vector<const Matrix*> av(a.begin(), a.end());
  return max_relative_error(av, b);
}

}  // namespace

GradCheckReport check_autoencoder_gradients(std::uint64_t seed, std::size_t configurations) {
  Rng rng(seed);
  GradCheckReport report{"autoencoder", configurations, 0.0};
  for (std::size_t c = 0; c < configurations; ++c) {
    const std::size_t n = pick(rng, 2, 8);
    const std::size_t m = pick(rng, 1, 6);
    const std::size_t batch = pick(rng, 1, 4);
    SparsityConfig cfg{pick_from(rng, kTargets), pick_from(rng, kPenalties),
                       pick_from(rng, kPenalties)};
    AutoencoderParams p = AutoencoderParams::glorot(n, m, rng);
    p.b_hidden = random_matrix(m, 1, -0.5, 0.5, rng);
    p.b_out = random_matrix(n, 1, -0.5, 0.5, rng);
    const Matrix x = random_matrix(batch, n, 0.0, 1.0, rng);

    const LayerGradients analytic = ae_gradients(p, x, cfg);
    auto ptrs = tensors(p);
    const auto numeric = finite_diff([&] { return ae_loss(p, x, cfg); }, ptrs, kGradCheckEpsilon);
    report.max_relative_error = std::max(report.max_relative_error, compare(analytic, numeric));
  }
  return report;
}

GradCheckReport check_softmax_gradients(std::uint64_t seed, std::size_t configurations) {
  Rng rng(seed);
  GradCheckReport report{"softmax", configurations, 0.0};
  for (std::size_t c = 0; c < configurations; ++c) {
    const std::size_t d = pick(rng, 1, 6);
    const std::size_t k = pick(rng, 2, 4);
    const std::size_t batch = pick(rng, 1, 4);
    SoftmaxParams p = SoftmaxParams::glorot(k, d, rng, pick_from(rng, kPenalties));
    p.b = random_matrix(k, 1, -0.5, 0.5, rng);
    Matrix features = random_matrix(batch, d, 0.0, 1.0, rng);
    const Matrix labels = random_one_hot(batch, k, rng);

    const SoftmaxGradients analytic = sm_gradients(p, features, labels);
    auto ptrs = tensors(p);
    auto numeric = finite_diff([&] { return sm_loss(p, features, labels); }, ptrs,
                               kGradCheckEpsilon);
    std::array<Matrix*, 1> fptr = {&features};
    auto numeric_features =
        finite_diff([&] { return sm_loss(p, features, labels); }, fptr, kGradCheckEpsilon);
    numeric.push_back(std::move(numeric_features[0]));

    std::vector<const Matrix*> a = {&analytic.d_w, &analytic.d_b, &analytic.d_features};
    std::vector<const Matrix*> b;
    for (const Matrix& g : numeric) b.push_back(&g);
    report.max_relative_error = std::max(report.max_relative_error, max_relative_error(a, b));
  }
  return report;
}

GradCheckReport check_stack_gradients(std::uint64_t seed, std::size_t configurations) {
  Rng rng(seed);
  GradCheckReport report{"stack", configurations, 0.0};
  for (std::size_t c = 0; c < configurations; ++c) {
    const std::size_t depth = pick(rng, 1, 3);
    std::vector<std::size_t> widths = {pick(rng, 2, 6)};
    for (std::size_t l = 0; l < depth; ++l) widths.push_back(pick(rng, 1, 5));
    const std::size_t k = pick(rng, 2, 4);
    const std::size_t batch = pick(rng, 1, 4);
    std::vector<SparsityConfig> sparsity;
    for (std::size_t l = 0; l < depth; ++l) {
      sparsity.push_back({pick_from(rng, kTargets), pick_from(rng, kPenalties),
                          pick_from(rng, kPenalties)});
    }
    StackedNetwork net =
        StackedNetwork::random(widths, k, sparsity, pick_from(rng, kPenalties), rng);
    for (auto& e : net.encoders) e.b_hidden = random_matrix(e.hidden_width(), 1, -0.5, 0.5, rng);
    const Matrix x = random_matrix(batch, widths.front(), 0.0, 1.0, rng);
    const Matrix labels = random_one_hot(batch, k, rng);

    const StackGradients analytic = stack_gradients(net, x, labels);
    auto ptrs = tensors(net);
    const auto numeric =
        finite_diff([&] { return stack_loss(net, x, labels); }, ptrs, kGradCheckEpsilon);
    report.max_relative_error = std::max(report.max_relative_error, compare(analytic, numeric));
  }
  return report;
}

}  // namespace sae
