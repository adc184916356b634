#include "fairal/datagen.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "fairal/errors.hpp"

namespace fairal {

const char* bias_kind_name(BiasKind kind) {
  return kind == BiasKind::kMinorityGroup ? "minority_group"
                                          : "sensitive_attribute";
}

BiasKind parse_bias_kind(std::string_view name) {
  if (name == "minority_group") return BiasKind::kMinorityGroup;
  if (name == "sensitive_attribute") return BiasKind::kSensitiveAttribute;
  throw ConfigError("unknown bias_kind: " + std::string(name));
}

void DatasetSpec::validate() const {
  if (n_train < 1) throw ConfigError("datagen: n_train must be >= 1");
  if (n_test % 4 != 0) {
    throw ConfigError("datagen: n_test must be divisible by 4");
  }
  if (feature_dim < 2) {
    throw ConfigError("datagen: feature_dim must be >= 2 "
                      "(class axis and group axis)");
  }
  if (!(class_separation > 0.0)) {
    throw ConfigError("datagen: class_separation must be > 0");
  }
  if (label_noise < 0.0 || label_noise >= 0.5) {
    throw ConfigError("datagen: label_noise must satisfy 0 <= p < 0.5");
  }
  if (!(minority_fraction > 0.0) || minority_fraction > 0.5) {
    throw ConfigError("datagen: minority_fraction must satisfy 0 < p <= 0.5");
  }
  if (correlation_strength < 0.5 || correlation_strength >= 1.0) {
    throw ConfigError(
        "datagen: correlation_strength must satisfy 0.5 <= rho < 1");
  }
}

namespace {

struct Sample {
  std::vector<double> x;
  int y;
  int a;
};

Sample draw_sample(const DatasetSpec& spec, RngStream& rng) {
  Sample s;
  int clean_y = rng.bernoulli(0.5) ? 1 : 0;
  if (spec.bias_kind == BiasKind::kMinorityGroup) {
    s.a = rng.bernoulli(spec.minority_fraction) ? 1 : 0;
  } else {
    s.a = rng.bernoulli(spec.correlation_strength) ? clean_y : 1 - clean_y;
  }
  s.x.resize(spec.feature_dim);
  for (double& v : s.x) v = rng.normal();
  s.x[0] += (clean_y == 1 ? 0.5 : -0.5) * spec.class_separation;
  s.x[1] += spec.group_signal * (2.0 * s.a - 1.0);
  s.y = rng.bernoulli(spec.label_noise) ? 1 - clean_y : clean_y;
  return s;
}

Dataset generate_attempt(const DatasetSpec& spec, std::uint64_t attempt) {
  RngStream rng = RngStream::named(spec.seed, "datagen", attempt);
  std::size_t total = spec.n_train + spec.n_test;
  Dataset ds;
  ds.spec = spec;
  ds.features = Tensor({total, spec.feature_dim});
  ds.labels.resize(total);
  ds.groups.resize(total);

  auto store = [&](std::size_t row, const Sample& s) {
    for (std::size_t c = 0; c < spec.feature_dim; ++c) {
      ds.features.at(row, c) = s.x[c];
    }
    ds.labels[row] = s.y;
    ds.groups[row] = s.a;
  };

  for (std::size_t i = 0; i < spec.n_train; ++i) {
    store(i, draw_sample(spec, rng));
  }

  // Balanced tail: keep drawing from the same process, filing each draw
  // under its realized (y, a) cell until every quota is met.
  std::size_t quota = spec.n_test / 4;
  std::array<std::size_t, 4> filled = {0, 0, 0, 0};
  std::size_t row = spec.n_train;
  std::size_t draws = 0;
  std::size_t max_draws = 10000 + 1000 * spec.n_test;
  while (row < total) {
    if (++draws > max_draws) {
      throw DataError("datagen: balanced block rejection sampling exceeded " +
                      std::to_string(max_draws) + " draws");
    }
    Sample s = draw_sample(spec, rng);
    std::size_t cell = static_cast<std::size_t>(2 * s.y + s.a);
    if (filled[cell] < quota) {
      ++filled[cell];
      store(row++, s);
    }
  }
  return ds;
}

bool has_both(const std::vector<int>& v) {
  bool seen0 = false, seen1 = false;
  for (int x : v) {
    if (x == 0) seen0 = true;
    if (x == 1) seen1 = true;
    if (seen0 && seen1) return true;
  }
  return false;
}

}  // namespace

Dataset generate(const DatasetSpec& spec) {
  spec.validate();
  for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
    Dataset ds = generate_attempt(spec, attempt);
    if (has_both(ds.labels) && has_both(ds.groups)) return ds;
  }
  throw DataError(
      "datagen: 10 attempts produced a degenerate dataset "
      "(a class or group never appeared)");
}

PoolState split_pools(const Dataset& dataset, std::size_t n_test,
                      std::size_t initial_labelled, RngStream& rng) {
  if (n_test % 4 != 0) {
    throw ConfigError("split_pools: n_test must be divisible by 4");
  }
  std::size_t n = dataset.size();
  std::size_t quota = n_test / 4;

  std::array<std::vector<std::size_t>, 4> cells;
  for (std::size_t i = 0; i < n; ++i) {
    cells[static_cast<std::size_t>(2 * dataset.labels[i] + dataset.groups[i])]
        .push_back(i);
  }

  std::vector<bool> is_test(n, false);
  PoolState state;
  state.test.reserve(n_test);
  for (std::size_t cell = 0; cell < 4; ++cell) {
    auto& members = cells[cell];
    if (members.size() < quota) {
      throw PartitionError(
          "split_pools: cell (y=" + std::to_string(cell / 2) +
          ", a=" + std::to_string(cell % 2) + ") has " +
          std::to_string(members.size()) + " samples, needs " +
          std::to_string(quota));
    }
    for (std::size_t i = 0; i < quota; ++i) {
      std::size_t j = i + rng.uniform_below(members.size() - i);
      std::swap(members[i], members[j]);
      state.test.push_back(members[i]);
      is_test[members[i]] = true;
    }
  }

  std::vector<std::size_t> rest;
  rest.reserve(n - n_test);
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_test[i]) rest.push_back(i);
  }
  if (rest.size() < initial_labelled) {
    throw PartitionError("split_pools: only " + std::to_string(rest.size()) +
                         " non-test samples for an initial labelled set of " +
                         std::to_string(initial_labelled));
  }

  std::vector<bool> is_labelled(n, false);
  for (std::size_t i = 0; i < initial_labelled; ++i) {
    std::size_t j = i + rng.uniform_below(rest.size() - i);
    std::swap(rest[i], rest[j]);
    state.labelled.push_back(rest[i]);
    is_labelled[rest[i]] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_test[i] && !is_labelled[i]) state.unlabelled.push_back(i);
  }
  return state;
}

void write_dataset_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("dataset csv: cannot open for write: " + path);
  for (std::size_t c = 0; c < dataset.spec.feature_dim; ++c) {
    out << 'f' << c << ',';
  }
  out << "y,a\n";
  char buf[64];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t c = 0; c < dataset.spec.feature_dim; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.features.at(i, c));
      out << buf << ',';
    }
    out << dataset.labels[i] << ',' << dataset.groups[i] << '\n';
  }
  if (!out) throw IoError("dataset csv: write failed: " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("dataset csv: cannot open for read: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset csv: empty file");

  std::size_t d = 0;
  {
    std::stringstream header(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(header, col, ',')) cols.push_back(col);
    if (cols.size() < 3 || cols[cols.size() - 2] != "y" ||
        cols[cols.size() - 1] != "a") {
      throw IoError("dataset csv: header must end in y,a");
    }
    d = cols.size() - 2;
    for (std::size_t c = 0; c < d; ++c) {
      if (cols[c] != "f" + std::to_string(c)) {
        throw IoError("dataset csv: expected column f" + std::to_string(c) +
                      ", found " + cols[c]);
      }
    }
  }

  std::vector<double> values;
  std::vector<int> labels, groups;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != d + 2) {
      throw IoError("dataset csv: line " + std::to_string(line_no) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(d + 2));
    }
    try {
      for (std::size_t c = 0; c < d; ++c) {
        values.push_back(std::stod(fields[c]));
      }
      int y = std::stoi(fields[d]);
      int a = std::stoi(fields[d + 1]);
      if ((y != 0 && y != 1) || (a != 0 && a != 1)) {
        throw IoError("dataset csv: line " + std::to_string(line_no) +
                      ": y and a must be 0 or 1");
      }
      labels.push_back(y);
      groups.push_back(a);
    } catch (const std::invalid_argument&) {
      throw IoError("dataset csv: line " + std::to_string(line_no) +
                    ": unparseable number");
    } catch (const std::out_of_range&) {
      throw IoError("dataset csv: line " + std::to_string(line_no) +
                    ": number out of range");
    }
  }

  Dataset ds;
  ds.spec.feature_dim = d;
  ds.spec.n_train = labels.size();
  ds.spec.n_test = 0;
  ds.features = Tensor({labels.size(), d}, std::move(values));
  ds.labels = std::move(labels);
  ds.groups = std::move(groups);
  return ds;
}

}  // namespace fairal
