#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "awsgd/data.hpp"

using namespace awsgd;

namespace {
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = (std::filesystem::temp_directory_path() /
            ("awsgd_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++)))
               .string();
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};
}  // namespace

TEST_CASE("libsvm parsing basics") {
  TempFile f("+1 1:0.5 3:2\n-1 2:1.5\n");
  const Dataset ds = load_libsvm(f.path);
  REQUIRE(ds.size() == 2);
  CHECK(ds.d == 3);
  CHECK(ds.examples[0].features == Vec{0.5, 0.0, 2.0});
  CHECK(ds.examples[0].label == 1);
  CHECK(ds.examples[1].features == Vec{0.0, 1.5, 0.0});
  CHECK(ds.examples[1].label == -1);
  CHECK(ds.task.is_binary());
}

TEST_CASE("libsvm empty file") {
  TempFile f("");
  const Dataset ds = load_libsvm(f.path);
  CHECK(ds.size() == 0);
  CHECK(ds.d == 0);
}

TEST_CASE("libsvm malformed input reports the line") {
  TempFile bad_value("1 2:a\n");
  try {
    load_libsvm(bad_value.path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
  TempFile non_monotone("1 2:1 1:1\n");
  CHECK_THROWS_AS(load_libsvm(non_monotone.path), std::runtime_error);
}

TEST_CASE("libsvm label maps") {
  TempFile zero_one("0 1:1\n1 1:2\n");
  const Dataset a = load_libsvm(zero_one.path);
  CHECK(a.examples[0].label == -1);
  CHECK(a.examples[1].label == 1);
  TempFile one_two("1 1:1\n2 1:2\n");
  const Dataset b = load_libsvm(one_two.path);
  CHECK(b.examples[0].label == -1);
  CHECK(b.examples[1].label == 1);
}

TEST_CASE("libsvm round trip is bit exact") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Dataset ds;
  ds.d = 4;
  ds.task = TaskSpec::binary_task();
  for (int i = 0; i < 50; ++i) {
    Example ex;
    for (int j = 0; j < 4; ++j) ex.features.push_back(gauss(rng) * std::pow(10.0, j - 2));
    ex.label = i % 2 == 0 ? 1 : -1;
    ds.examples.push_back(std::move(ex));
  }
  TempFile f("");
  save_libsvm(ds, f.path);
  const Dataset back = load_libsvm(f.path);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.examples[i].label == ds.examples[i].label);
    for (int j = 0; j < 4; ++j)
      CHECK(back.examples[i].features[j] == ds.examples[i].features[j]);  // bitwise
  }
}

TEST_CASE("csv ingestion with a header row") {
  TempFile f("f1,label,f2\n0.5,1,2.0\n-0.25,-1,0.125\n");
  const Dataset ds = load_csv(f.path);
  REQUIRE(ds.size() == 2);
  CHECK(ds.d == 2);
  CHECK(ds.examples[0].features == Vec{0.5, 2.0});
  CHECK(ds.examples[0].label == 1);
  CHECK(ds.examples[1].label == -1);
  TempFile no_label("a,b\n1,2\n");
  CHECK_THROWS_AS(load_csv(no_label.path), std::runtime_error);
}

TEST_CASE("margin generator honors its own audit") {
  MarginSpec spec;
  spec.n = 400;
  spec.d = 6;
  spec.rho_star = 0.4;
  spec.R = 1.5;
  spec.seed = 11;
  const auto [ds, theta_star] = gen_margin_dataset(spec);
  REQUIRE(ds.size() == 400);
  CHECK(norm2(theta_star) == doctest::Approx(1.0));
  double min_margin = 1e9, max_norm = 0.0;
  for (const auto& ex : ds.examples) {
    min_margin = std::min(min_margin, ex.label * dot(ex.features, theta_star));
    max_norm = std::max(max_norm, norm2(ex.features));
  }
  CHECK(min_margin >= spec.rho_star);
  CHECK(max_norm <= spec.R + 1e-12);

  const auto [ds2, theta2] = gen_margin_dataset(spec);
  CHECK(theta2 == theta_star);
  for (std::size_t i = 0; i < ds.size(); ++i)
    CHECK(ds2.examples[i].features == ds.examples[i].features);

  spec.rho_star = 2.0;
  CHECK_THROWS_AS(gen_margin_dataset(spec), std::invalid_argument);
}

TEST_CASE("rbf featurization") {
  MarginSpec spec;
  spec.n = 200;
  spec.d = 4;
  spec.rho_star = 0.3;
  spec.R = 1.0;
  spec.seed = 5;
  const auto [ds, theta] = gen_margin_dataset(spec);
  const Dataset rbf = rbf_featurize(ds, 20, 0.0, 7);
  CHECK(rbf.d == 20);
  REQUIRE(rbf.size() == ds.size());
  for (const auto& ex : rbf.examples)
    for (double v : ex.features) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  CHECK_THROWS_AS(rbf_featurize(ds, 500, 0.0, 7), std::invalid_argument);

  // a landmark evaluates to one at itself, and to ~zero for huge gamma
  const Dataset sharp = rbf_featurize(ds, 20, 1e6, 7);
  int ones = 0;
  for (const auto& ex : sharp.examples) {
    for (double v : ex.features)
      if (v == doctest::Approx(1.0)) ++ones;
  }
  CHECK(ones >= 20);  // each landmark hits itself
}

TEST_CASE("shuffle split partitions deterministically") {
  Dataset ds;
  ds.d = 1;
  ds.task = TaskSpec::binary_task();
  for (int i = 0; i < 10; ++i) {
    Example ex;
    ex.features = {static_cast<double>(i)};
    ex.label = i % 2 == 0 ? 1 : -1;
    ds.examples.push_back(std::move(ex));
  }
  const auto [train0, test0] = shuffle_split(ds, 0.0, 3);
  CHECK(train0.size() == 10);
  CHECK(test0.size() == 0);

  const auto [train, test] = shuffle_split(ds, 0.3, 3);
  CHECK(train.size() == 7);
  CHECK(test.size() == 3);
  const auto [train2, test2] = shuffle_split(ds, 0.3, 3);
  for (std::size_t i = 0; i < train.size(); ++i)
    CHECK(train.examples[i].features == train2.examples[i].features);

  std::multiset<double> seen;
  for (const auto& ex : train.examples) seen.insert(ex.features[0]);
  for (const auto& ex : test.examples) seen.insert(ex.features[0]);
  CHECK(seen.size() == 10);
  CHECK(*seen.begin() == 0.0);
  CHECK(*seen.rbegin() == 9.0);
}

TEST_CASE("tictactoe endgame enumeration") {
  const Dataset ds = gen_tictactoe();
  CHECK(ds.size() == 958);
  CHECK(ds.d == 27);
  std::size_t wins = 0;
  for (const auto& ex : ds.examples) {
    double sum = 0.0;
    for (double v : ex.features) sum += v;
    CHECK(sum == doctest::Approx(9.0));  // one-hot per cell
    if (ex.label == 1) ++wins;
  }
  CHECK(wins == 626);  // boards where x has a three-in-a-row
}
