#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fairal/tensor.hpp"

namespace fairal {

/// Named trainable tensors with matching gradient and momentum buffers.
/// Iteration order is insertion order, which keeps optimizer updates and
/// serialization deterministic.
class ParameterSet {
 public:
  struct Param {
    std::string name;
    Tensor value;
    Tensor grad;      // same shape as value
    Tensor momentum;  // same shape as value
  };

  /// Registers a parameter; grad and momentum start at zero.
  void add(std::string name, Tensor init);

  std::size_t size() const { return params_.size(); }
  Param& operator[](std::size_t i) { return params_[i]; }
  const Param& operator[](std::size_t i) const { return params_[i]; }

  /// nullptr when absent.
  Param* find(std::string_view name);
  const Param* find(std::string_view name) const;

  /// Total number of scalar values across all parameters.
  std::size_t value_count() const;

  void zero_grad();

  bool values_equal(const ParameterSet& other) const;

 private:
  std::vector<Param> params_;
};

/// One SGD step with classical momentum over every parameter:
///   v <- momentum * v + grad;  p <- p - lr * v
/// Gradients are zeroed afterwards. Throws TrainingError on a non-finite
/// gradient.
void sgd_step(ParameterSet& params, double lr, double momentum);

/// Value-only snapshot used for exact weight resets.
std::vector<Tensor> snapshot_values(const ParameterSet& params);

/// Restores values from a snapshot taken on an identically-shaped set and
/// zeroes gradients and momentum buffers.
void restore_values(ParameterSet& params, const std::vector<Tensor>& snapshot);

}  // namespace fairal
