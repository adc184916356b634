#include "fairal/params.hpp"

#include <algorithm>
#include <cmath>

#include "fairal/errors.hpp"

namespace fairal {

void ParameterSet::add(std::string name, Tensor init) {
  if (find(name) != nullptr) {
    throw ConfigError("duplicate parameter name: " + name);
  }
  Param p;
  p.name = std::move(name);
  p.grad = Tensor(init.shape());
  p.momentum = Tensor(init.shape());
  p.value = std::move(init);
  params_.push_back(std::move(p));
}

ParameterSet::Param* ParameterSet::find(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const ParameterSet::Param* ParameterSet::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t ParameterSet::value_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) {
    std::fill(p.grad.values().begin(), p.grad.values().end(), 0.0);
  }
}

bool ParameterSet::values_equal(const ParameterSet& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = other.params_[i];
    if (a.name != b.name || !a.value.same_shape(b.value)) return false;
    if (!std::equal(a.value.values().begin(), a.value.values().end(),
                    b.value.values().begin())) {
      return false;
    }
  }
  return true;
}

void sgd_step(ParameterSet& params, double lr, double momentum) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      double g = p.grad[k];
      if (!std::isfinite(g)) {
        throw TrainingError("non-finite gradient in parameter " + p.name);
      }
      double v = momentum * p.momentum[k] + g;
      p.momentum[k] = v;
      p.value[k] -= lr * v;
    }
  }
  params.zero_grad();
}

std::vector<Tensor> snapshot_values(const ParameterSet& params) {
  std::vector<Tensor> snap;
  snap.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    snap.push_back(params[i].value);
  }
  return snap;
}

void restore_values(ParameterSet& params, const std::vector<Tensor>& snapshot) {
  if (snapshot.size() != params.size()) {
    throw ShapeError("snapshot size does not match parameter set");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (!p.value.same_shape(snapshot[i])) {
      throw ShapeError("snapshot shape mismatch for parameter " + p.name);
    }
    p.value = snapshot[i];
    std::fill(p.grad.values().begin(), p.grad.values().end(), 0.0);
    std::fill(p.momentum.values().begin(), p.momentum.values().end(), 0.0);
  }
}

}  // namespace fairal
