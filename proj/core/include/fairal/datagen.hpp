#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fairal/rng.hpp"
#include "fairal/tensor.hpp"

namespace fairal {

enum class BiasKind { kMinorityGroup, kSensitiveAttribute };

const char* bias_kind_name(BiasKind kind);
BiasKind parse_bias_kind(std::string_view name);

struct DatasetSpec {
  BiasKind bias_kind = BiasKind::kSensitiveAttribute;
  std::size_t n_train = 4000;  // biased pool block
  std::size_t n_test = 1000;   // balanced block, n_test/4 per (y, a) cell
  std::size_t feature_dim = 8;
  double class_separation = 2.0;
  double label_noise = 0.02;
  /// minority_group only: P(a = 1), independent of the class.
  double minority_fraction = 0.1;
  /// sensitive_attribute only: P(a = y).
  double correlation_strength = 0.9;
  /// Scale of the group-indicative component on feature axis 1.
  double group_signal = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Dataset {
  Tensor features;  // n x feature_dim
  std::vector<int> labels;
  std::vector<int> groups;
  DatasetSpec spec;

  std::size_t size() const { return labels.size(); }
};

/// Draws n_train samples from the biased process, then appends a balanced
/// block of exactly n_test/4 per (y, a) cell rejection-sampled from the same
/// process, so a balanced held-out set always exists even when the bias
/// starves a cell. Class means sit at +-class_separation/2 on axis 0, the
/// group signal at group_signal*(2a-1) on axis 1, with unit Gaussian noise
/// on every axis; labels flip with probability label_noise after group
/// assignment. Retries with an incremented sub-seed (10 attempts) if a class
/// or group ends up absent; throws DataError after that.
Dataset generate(const DatasetSpec& spec);

/// Labelled/unlabelled/test partition over dataset indices.
struct PoolState {
  std::vector<std::size_t> labelled;
  std::vector<std::size_t> unlabelled;
  std::vector<std::size_t> test;
};

/// Draws exactly n_test/4 test samples uniformly from each (y, a) cell, then
/// initial_labelled uniformly from the remainder; the rest is unlabelled.
/// Throws PartitionError naming the deficient cell when a quota cannot be
/// met. n_test must be divisible by 4.
PoolState split_pools(const Dataset& dataset, std::size_t n_test,
                      std::size_t initial_labelled, RngStream& rng);

/// CSV with header f0,...,f{d-1},y,a and one row per sample, full double
/// precision. Row order is the dataset order.
void write_dataset_csv(const Dataset& dataset, const std::string& path);

/// Reads a file written by write_dataset_csv. The spec echo carries only the
/// feature_dim; generation parameters are not stored in the CSV.
Dataset read_dataset_csv(const std::string& path);

}  // namespace fairal
