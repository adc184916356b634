#include "fairal/config_io.hpp"

#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "fairal/errors.hpp"

namespace fairal {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
}

// Strict field access: wrong types are config errors, and every handled key
// is recorded so unknown keys can be rejected afterwards.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string context)
      : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) {
      throw ConfigError("config: " + context_ + " must be a JSON object");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key, "a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    return to_count(j_.at(key), key);
  }

  std::uint64_t seed_value(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() ||
        (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(key, "a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "a boolean");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key, "a string");
    return v.get<std::string>();
  }

  std::vector<std::size_t> count_list(const std::string& key,
                                      std::vector<std::size_t> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(key, "an array of nonnegative integers");
    std::vector<std::size_t> out;
    for (const json& item : v) out.push_back(to_count(item, key));
    return out;
  }

  std::vector<std::uint64_t> seed_list(const std::string& key,
                                       std::vector<std::uint64_t> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(key, "an array of nonnegative integers");
    std::vector<std::uint64_t> out;
    for (const json& item : v) {
      if (!item.is_number_integer() ||
          (!item.is_number_unsigned() && item.get<std::int64_t>() < 0)) {
        fail(key, "an array of nonnegative integers");
      }
      out.push_back(item.get<std::uint64_t>());
    }
    return out;
  }

  const json* object(const std::string& key) {
    if (!has(key)) return nullptr;
    const json& v = j_.at(key);
    if (!v.is_object()) fail(key, "an object");
    return &v;
  }

  /// Call after reading every known key.
  void reject_unknown() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("config: unknown key \"" + item.key() + "\" in " +
                          context_);
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& key,
                         const std::string& expected) const {
    throw ConfigError("config: " + context_ + "." + key + " must be " +
                      expected);
  }

  std::size_t to_count(const json& v, const std::string& key) const {
    if (!v.is_number_integer() ||
        (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(key, "a nonnegative integer");
    }
    return v.get<std::size_t>();
  }

  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

DatasetSpec parse_dataset_spec(const json& j, const std::string& context) {
  ObjectReader r(j, context);
  DatasetSpec spec;
  if (r.has("bias_kind")) {
    spec.bias_kind = parse_bias_kind(r.text("bias_kind", ""));
  }
  spec.n_train = r.count("n_train", spec.n_train);
  spec.n_test = r.count("n_test", spec.n_test);
  spec.feature_dim = r.count("feature_dim", spec.feature_dim);
  spec.class_separation = r.number("class_separation", spec.class_separation);
  spec.label_noise = r.number("label_noise", spec.label_noise);
  spec.minority_fraction =
      r.number("minority_fraction", spec.minority_fraction);
  spec.correlation_strength =
      r.number("correlation_strength", spec.correlation_strength);
  spec.group_signal = r.number("group_signal", spec.group_signal);
  spec.seed = r.seed_value("seed", spec.seed);
  r.reject_unknown();
  return spec;
}

ModelConfig parse_model_config(const json& j, const std::string& context) {
  ObjectReader r(j, context);
  ModelConfig config;
  config.input_dim = r.count("input_dim", 0);  // 0: inherit feature_dim
  config.hidden_dims = r.count_list("hidden_dims", config.hidden_dims);
  config.num_classes = r.count("num_classes", config.num_classes);
  config.num_groups = r.count("num_groups", config.num_groups);
  config.dropout_rate = r.number("dropout_rate", config.dropout_rate);
  config.lambda = r.number("lambda", config.lambda);
  config.adversarial_head =
      r.boolean("adversarial_head", config.adversarial_head);
  config.lr = r.number("lr", config.lr);
  config.momentum = r.number("momentum", config.momentum);
  config.batch_size = r.count("batch_size", config.batch_size);
  config.epochs = r.count("epochs", config.epochs);
  r.reject_unknown();
  return config;
}

ExperimentConfig parse_experiment_config(const json& j,
                                         const std::string& context) {
  ObjectReader r(j, context);
  ExperimentConfig config;
  if (const json* dataset = r.object("dataset")) {
    config.dataset = parse_dataset_spec(*dataset, context + ".dataset");
  }
  if (const json* model = r.object("model")) {
    config.model = parse_model_config(*model, context + ".model");
  }
  if (r.has("strategy")) {
    config.strategy = parse_strategy(r.text("strategy", ""));
  }
  config.query_size = r.count("query_size", config.query_size);
  config.mc_passes = r.count("mc_passes", config.mc_passes);
  config.initial_labelled =
      r.count("initial_labelled", config.initial_labelled);
  config.budget_fraction = r.number("budget_fraction", config.budget_fraction);
  config.seeds = r.seed_list("seeds", config.seeds);
  config.output = r.text("output", config.output);
  r.reject_unknown();
  config.validate_and_resolve();
  return config;
}

}  // namespace

DatasetSpec load_dataset_spec_json(const std::string& path) {
  DatasetSpec spec = parse_dataset_spec(parse_file(path), "spec");
  spec.validate();
  return spec;
}

std::vector<ExperimentConfig> load_experiment_configs_json(
    const std::string& path) {
  json j = parse_file(path);
  std::vector<ExperimentConfig> configs;
  if (j.is_array()) {
    std::size_t i = 0;
    for (const json& item : j) {
      configs.push_back(
          parse_experiment_config(item, "config[" + std::to_string(i) + "]"));
      ++i;
    }
    if (configs.empty()) throw ConfigError("config: empty config array");
  } else {
    configs.push_back(parse_experiment_config(j, "config"));
  }
  return configs;
}

}  // namespace fairal
