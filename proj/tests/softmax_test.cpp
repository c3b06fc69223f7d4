#include <gtest/gtest.h>

#include <cmath>

#include "sae/error.hpp"
#include "sae/gradcheck.hpp"
#include "sae/rng.hpp"
#include "sae/softmax.hpp"
#include "test_util.hpp"

namespace sae {
namespace {

using test::random_matrix;

// Cross-entropy computed term by term, without the stabilized softmax.
double loop_loss(const SoftmaxParams& p, const Matrix& f, const Matrix& labels) {
  double total = 0.0;
  for (std::size_t s = 0; s < f.rows(); ++s) {
    std::vector<double> z(p.classes());
    double norm = 0.0;
    for (std::size_t c = 0; c < p.classes(); ++c) {
      z[c] = p.b(c, 0);
      for (std::size_t i = 0; i < p.input_width(); ++i) z[c] += p.w(c, i) * f(s, i);
      norm += std::exp(z[c]);
    }
    for (std::size_t c = 0; c < p.classes(); ++c) total -= labels(s, c) * std::log(std::exp(z[c]) / norm);
  }
  double decay = 0.0;
  for (double w : p.w.data()) decay += w * w;
  return total / static_cast<double>(f.rows()) + 0.5 * p.lambda * decay;
}

SoftmaxParams random_head(std::size_t k, std::size_t d, Rng& rng, double lambda) {
  SoftmaxParams p = SoftmaxParams::glorot(k, d, rng, lambda);
  p.b = random_matrix(k, 1, rng, -0.5, 0.5);
  return p;
}

TEST(SoftmaxTest, UniformOnEqualLogits) {
  const Matrix p = softmax(Matrix::from_rows({{0, 0}}));
  EXPECT_EQ(p(0, 0), 0.5);
  EXPECT_EQ(p(0, 1), 0.5);
}

TEST(SoftmaxTest, AnalyticCase) {
  const Matrix p = softmax(Matrix::from_rows({{std::log(1.0), std::log(3.0)}}));
  EXPECT_NEAR(p(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.75, 1e-15);
}

TEST(SoftmaxTest, ShiftInvariance) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix z = random_matrix(3, 4, rng, -5.0, 5.0);
    const Matrix shifted = map_scalar(z, [](double v) { return v + 100.0; });
    const Matrix a = softmax(z);
    const Matrix b = softmax(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-12);
  }
}

TEST(SoftmaxTest, RowsSumToOneAndArgmaxPreserved) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.below(3);
    const Matrix z = random_matrix(4, k, rng, -50.0, 50.0);
    const Matrix p = softmax(z);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double total = 0.0;
      for (double v : p.row(r)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        total += v;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
    EXPECT_EQ(argmax_rows(p), argmax_rows(z));
  }
}

TEST(SoftmaxTest, ExtremeLogitsStayFinite) {
  const Matrix p = softmax(Matrix::from_rows({{1e300, -1e300, 0}}));
  EXPECT_TRUE(all_finite(p));
  EXPECT_EQ(p(0, 0), 1.0);
}

TEST(ArgmaxTest, TiesGoToLowestIndex) {
  EXPECT_EQ(argmax_rows(Matrix::from_rows({{0.5, 0.5}, {0.2, 0.8}, {1, 1}})),
            (std::vector<std::size_t>{0, 1, 0}));
}

TEST(SmLossTest, CertainCorrectPredictionIsZero) {
  SoftmaxParams p{Matrix(2, 1), Matrix::from_rows({{800}, {-800}}), 0.0};
  EXPECT_EQ(sm_loss(p, Matrix(1, 1), Matrix::from_rows({{1, 0}})), 0.0);
}

TEST(SmLossTest, UniformTwoClassIsLn2) {
  SoftmaxParams p{Matrix(2, 3), Matrix(2, 1), 0.0};
  EXPECT_NEAR(sm_loss(p, Matrix(4, 3, 0.3), one_hot(std::vector<std::size_t>{0, 1, 1, 0}, 2)),
              std::log(2.0), 1e-9);
}

TEST(SmLossTest, ProbabilityFloorKeepsLossFinite) {
  SoftmaxParams p{Matrix(2, 1), Matrix::from_rows({{-800}, {800}}), 0.0};
  const double loss = sm_loss(p, Matrix(1, 1), Matrix::from_rows({{1, 0}}));
  EXPECT_NEAR(loss, -std::log(1e-12), 1e-9);
}

TEST(SmLossTest, MatchesScalarOracle) {
  Rng rng(3);
  for (double lambda : {0.0, 0.001, 0.1}) {
    const SoftmaxParams p = random_head(2, 3, rng, lambda);
    const Matrix f = random_matrix(2, 3, rng, 0.0, 1.0);
    const Matrix labels = one_hot(std::vector<std::size_t>{1, 0}, 2);
    EXPECT_NEAR(sm_loss(p, f, labels), loop_loss(p, f, labels), 1e-12);
  }
}

TEST(SmLossTest, ShapeErrors) {
  SoftmaxParams p{Matrix(2, 3), Matrix(2, 1), 0.0};
  EXPECT_THROW(sm_loss(p, Matrix(2, 4), Matrix(2, 2)), ShapeError);
  EXPECT_THROW(sm_loss(p, Matrix(2, 3), Matrix(3, 2)), ShapeError);
}

TEST(SmGradientsTest, PerfectPredictionsGiveZeroGradient) {
  SoftmaxParams p{Matrix(2, 2), Matrix::from_rows({{40}, {-40}}), 0.0};
  const SoftmaxGradients g = sm_gradients(p, Matrix(3, 2, 0.5), one_hot(std::vector<std::size_t>{0, 0, 0}, 2));
  for (double v : g.d_w.data()) EXPECT_NEAR(v, 0.0, 1e-9);
  for (double v : g.d_b.data()) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(SmGradientsTest, MatchesFiniteDifferences) {
  Rng rng(4);
  SoftmaxParams p = random_head(3, 4, rng, 0.01);
  Matrix f = random_matrix(5, 4, rng, 0.0, 1.0);
  const Matrix labels = one_hot(std::vector<std::size_t>{0, 2, 1, 1, 0}, 3);
  const SoftmaxGradients analytic = sm_gradients(p, f, labels);
  auto ptrs = tensors(p);
  const auto numeric = finite_diff([&] { return sm_loss(p, f, labels); }, ptrs, 1e-5);
  std::vector<const Matrix*> a = {&analytic.d_w, &analytic.d_b};
  std::vector<const Matrix*> b = {&numeric[0], &numeric[1]};
  EXPECT_LE(max_relative_error(a, b), 1e-6);
}

TEST(SmGradientsTest, FeatureGradientPredictsDirectionalChange) {
  Rng rng(5);
  const SoftmaxParams p = random_head(2, 3, rng, 0.0);
  const Matrix f = random_matrix(2, 3, rng, 0.0, 1.0);
  const Matrix labels = one_hot(std::vector<std::size_t>{1, 0}, 2);
  const SoftmaxGradients g = sm_gradients(p, f, labels);
  const double eps = 1e-5;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Matrix up = f, down = f;
    up.data()[i] += eps;
    down.data()[i] -= eps;
    const double predicted = g.d_features.data()[i] * 2 * eps;
    const double actual = sm_loss(p, up, labels) - sm_loss(p, down, labels);
    EXPECT_LE(relative_error(predicted, actual), 1e-6) << "feature " << i;
  }
}

TEST(SmGradientsTest, RandomizedSuiteWithinTolerance) {
  EXPECT_LE(check_softmax_gradients(77, 25).max_relative_error, kGradCheckTolerance);
}

TEST(SoftmaxParamsTest, Validation) {
  EXPECT_THROW((SoftmaxParams{Matrix(1, 3), Matrix(1, 1), 0.0}.validate()), ShapeError);
  EXPECT_THROW((SoftmaxParams{Matrix(2, 3), Matrix(3, 1), 0.0}.validate()), ShapeError);
  EXPECT_NO_THROW((SoftmaxParams{Matrix(2, 3), Matrix(2, 1), 0.0}.validate()));
}

TEST(OneHotTest, RejectsOutOfRangeLabel) {
  EXPECT_THROW(one_hot(std::vector<std::size_t>{0, 2}, 2), ShapeError);
}

}  // namespace
}  // namespace sae
