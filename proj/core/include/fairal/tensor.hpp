#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairal {

/// Dense row-major tensor of 64-bit floats. Rank is usually 1 or 2; the
/// engine does no broadcasting beyond row-wise bias addition, so nothing
/// higher is ever needed.
class Tensor {
 public:
  Tensor() = default;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> shape);

  /// Tensor with explicit contents; values.size() must equal product(shape).
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor matrix(std::size_t rows, std::size_t cols) {
    return Tensor({rows, cols});
  }
  static Tensor vector(std::size_t n) { return Tensor({n}); }
  static Tensor scalar(double v) { return Tensor({1}, {v}); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  /// Row/column counts; a rank-1 tensor is treated as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;

  /// Throws ShapeError unless `size == product(shape)` holds (checked at
  /// construction; public for defensive call sites).
  static std::size_t checked_size(const std::vector<std::size_t>& shape);

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

/// Row-wise softmax with max-subtraction; input must be rank 2 (or rank 1,
/// treated as one row). Each output row sums to 1.
Tensor softmax_rows(const Tensor& logits);

}  // namespace fairal
