#include "fairal/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "fairal/errors.hpp"

namespace fairal {

std::size_t Tensor::checked_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), values_(checked_size(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (checked_size(shape_) != values_.size()) {
    throw ShapeError("tensor shape does not match value count");
  }
}

std::size_t Tensor::rows() const {
  if (rank() == 2) return shape_[0];
  if (rank() == 1) return 1;
  throw ShapeError("rows(): tensor is not rank 1 or 2");
}

std::size_t Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  throw ShapeError("cols(): tensor is not rank 1 or 2");
}

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

Tensor softmax_rows(const Tensor& logits) {
  std::size_t n = logits.rows();
  std::size_t c = logits.cols();
  Tensor out({n, c});
  for (std::size_t i = 0; i < n; ++i) {
    double m = logits.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, logits.at(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      double e = std::exp(logits.at(i, j) - m);
      out.at(i, j) = e;
      denom += e;
    }
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) /= denom;
  }
  return out;
}

}  // namespace fairal
