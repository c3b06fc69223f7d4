#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sae {

class Rng;

// Dense row-major matrix of doubles. Batches store one sample per row.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() & noexcept { return data_; }
  std::span<const double> data() const& noexcept { return data_; }
  std::span<double> row(std::size_t r) & { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const& { return {data_.data() + r * cols_, cols_}; }
  // Views into a temporary would dangle.
  void data() && = delete;
  void row(std::size_t) && = delete;

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape() const;

  // Value equality (IEEE ==). See bitwise_equal for the stricter check.
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ElementOp { add, sub, mul };

bool bitwise_equal(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a^T * b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix elementwise(const Matrix& a, const Matrix& b, ElementOp op);
inline Matrix add(const Matrix& a, const Matrix& b) { return elementwise(a, b, ElementOp::add); }
inline Matrix sub(const Matrix& a, const Matrix& b) { return elementwise(a, b, ElementOp::sub); }
inline Matrix hadamard(const Matrix& a, const Matrix& b) { return elementwise(a, b, ElementOp::mul); }

template <class F>
Matrix map_scalar(const Matrix& a, F&& f) {
  Matrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

Matrix scale(const Matrix& a, double factor);
// a -= factor * b, in place.
void subtract_scaled(Matrix& a, double factor, const Matrix& b);

// Adds the column vector bias (cols x 1) to every row of a.
Matrix add_row_bias(const Matrix& a, const Matrix& bias);
// Sums over rows; result is cols x 1.
Matrix column_sums(const Matrix& a);
double frobenius_sq(const Matrix& a);
double sum(const Matrix& a);

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> rows);

// Uniform on [-r, r) with r = sqrt(6 / (rows + cols)).
Matrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace sae
