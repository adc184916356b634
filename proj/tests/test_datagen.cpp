#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "fairal/datagen.hpp"
#include "fairal/errors.hpp"

using namespace fairal;

namespace {

DatasetSpec quick_spec() {
  DatasetSpec s;
  s.n_train = 2000;
  s.n_test = 400;
  s.feature_dim = 4;
  s.seed = 5;
  return s;
}

std::array<std::size_t, 4> cell_counts(const Dataset& d, std::size_t from,
                                       std::size_t to) {
  std::array<std::size_t, 4> counts = {0, 0, 0, 0};
  for (std::size_t i = from; i < to; ++i) {
    counts[static_cast<std::size_t>(2 * d.labels[i] + d.groups[i])]++;
  }
  return counts;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("spec validation rejects out-of-range parameters") {
  DatasetSpec s = quick_spec();
  s.n_test = 401;  // not divisible by 4
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick_spec();
  s.feature_dim = 1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick_spec();
  s.label_noise = 0.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick_spec();
  s.minority_fraction = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick_spec();
  s.correlation_strength = 0.4;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = quick_spec();
  s.class_separation = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("generation is deterministic in the seed") {
  DatasetSpec s = quick_spec();
  Dataset a = generate(s);
  Dataset b = generate(s);
  CHECK(a.labels == b.labels);
  CHECK(a.groups == b.groups);
  REQUIRE(a.features.size() == b.features.size());
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    CHECK(a.features[i] == b.features[i]);
  }

  s.seed = 6;
  Dataset c = generate(s);
  CHECK(a.labels != c.labels);
}

TEST_CASE("generated datasets have the documented layout") {
  DatasetSpec s = quick_spec();
  Dataset d = generate(s);
  CHECK(d.size() == s.n_train + s.n_test);
  CHECK(d.features.rows() == d.size());
  CHECK(d.features.cols() == s.feature_dim);
  for (int y : d.labels) CHECK((y == 0 || y == 1));
  for (int a : d.groups) CHECK((a == 0 || a == 1));

  // The trailing block is exactly balanced over (y, a) cells.
  auto tail = cell_counts(d, s.n_train, d.size());
  for (std::size_t c = 0; c < 4; ++c) CHECK(tail[c] == s.n_test / 4);
}

TEST_CASE("correlated bias ties the group to the label") {
  DatasetSpec s = quick_spec();
  s.bias_kind = BiasKind::kSensitiveAttribute;
  s.correlation_strength = 0.9;
  Dataset d = generate(s);

  // In the biased block a equals the clean label w.p. 0.9 and the observed
  // label keeps the clean one w.p. 0.98, so P(a == y) is about 0.884.
  std::size_t agree = 0;
  for (std::size_t i = 0; i < s.n_train; ++i) {
    if (d.labels[i] == d.groups[i]) ++agree;
  }
  double rate = static_cast<double>(agree) / static_cast<double>(s.n_train);
  CHECK(rate > 0.85);
  CHECK(rate < 0.92);
}

TEST_CASE("minority bias controls the group rate independently of labels") {
  DatasetSpec s = quick_spec();
  s.bias_kind = BiasKind::kMinorityGroup;
  s.minority_fraction = 0.1;
  s.n_train = 4000;
  Dataset d = generate(s);

  std::size_t minority = 0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < s.n_train; ++i) {
    if (d.groups[i] == 1) ++minority;
    if (d.labels[i] == d.groups[i]) ++agree;
  }
  double frac = static_cast<double>(minority) / static_cast<double>(s.n_train);
  CHECK(frac > 0.07);
  CHECK(frac < 0.13);
  // No label-group coupling: agreement stays near 1/2.
  double agree_rate =
      static_cast<double>(agree) / static_cast<double>(s.n_train);
  CHECK(agree_rate > 0.42);
  CHECK(agree_rate < 0.58);
}

TEST_CASE("feature geometry separates classes on axis 0 and groups on axis 1") {
  DatasetSpec s = quick_spec();
  s.n_train = 4000;
  Dataset d = generate(s);

  double sum0[2] = {0.0, 0.0}, sum1[2] = {0.0, 0.0};
  std::size_t ny[2] = {0, 0}, na[2] = {0, 0};
  for (std::size_t i = 0; i < d.size(); ++i) {
    sum0[d.labels[i]] += d.features.at(i, 0);
    ny[d.labels[i]]++;
    sum1[d.groups[i]] += d.features.at(i, 1);
    na[d.groups[i]]++;
  }
  // class_separation 2.0 puts the clean class means at -1 and +1; the 2%
  // label flips drag the observed-label means slightly inward.
  CHECK(sum0[0] / static_cast<double>(ny[0]) < -0.8);
  CHECK(sum0[1] / static_cast<double>(ny[1]) > 0.8);
  // group_signal 2.0 is exact per group (groups are never flipped).
  CHECK(sum1[0] / static_cast<double>(na[0]) < -1.8);
  CHECK(sum1[1] / static_cast<double>(na[1]) > 1.8);
}

TEST_CASE("pool split is balanced, disjoint and complete") {
  DatasetSpec s = quick_spec();
  Dataset d = generate(s);
  RngStream rng = RngStream::named(5, "split");
  PoolState pools = split_pools(d, s.n_test, 100, rng);

  CHECK(pools.test.size() == s.n_test);
  CHECK(pools.labelled.size() == 100);
  CHECK(pools.unlabelled.size() == d.size() - s.n_test - 100);

  std::array<std::size_t, 4> cells = {0, 0, 0, 0};
  for (std::size_t idx : pools.test) {
    cells[static_cast<std::size_t>(2 * d.labels[idx] + d.groups[idx])]++;
  }
  for (std::size_t c = 0; c < 4; ++c) CHECK(cells[c] == s.n_test / 4);

  std::vector<int> seen(d.size(), 0);
  for (std::size_t idx : pools.test) seen[idx]++;
  for (std::size_t idx : pools.labelled) seen[idx]++;
  for (std::size_t idx : pools.unlabelled) seen[idx]++;
  for (int s_count : seen) CHECK(s_count == 1);

  // Same stream, same split.
  RngStream replay = RngStream::named(5, "split");
  PoolState again = split_pools(d, s.n_test, 100, replay);
  CHECK(pools.test == again.test);
  CHECK(pools.labelled == again.labelled);
}

TEST_CASE("unmeetable test quotas name a partition failure") {
  Dataset d;
  d.features = Tensor::matrix(8, 2);
  d.spec.feature_dim = 2;
  for (int i = 0; i < 8; ++i) {
    d.labels.push_back(i % 2);
    d.groups.push_back(0);  // cell (y, 1) is empty
  }
  RngStream rng(1);
  CHECK_THROWS_AS(split_pools(d, 4, 2, rng), PartitionError);
}

TEST_CASE("dataset csv round trips bit-exactly") {
  DatasetSpec s = quick_spec();
  s.n_train = 50;
  s.n_test = 20;
  Dataset d = generate(s);
  std::string path = temp_path("fairal_test_dataset.csv");
  write_dataset_csv(d, path);

  Dataset back = read_dataset_csv(path);
  CHECK(back.size() == d.size());
  CHECK(back.labels == d.labels);
  CHECK(back.groups == d.groups);
  CHECK(back.spec.feature_dim == s.feature_dim);
  for (std::size_t i = 0; i < d.features.size(); ++i) {
    CHECK(back.features[i] == d.features[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("csv reader rejects a foreign header") {
  std::string path = temp_path("fairal_bad_header.csv");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("x0,x1,label,group\n0,0,0,0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_dataset_csv(path), IoError);
  std::remove(path.c_str());
}
