#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "awsgd/estimators.hpp"

using namespace awsgd;

TEST_CASE("beta parameterization") {
  const auto [s1, s2] = beta_params_for_mean(0.5, 100.0);
  CHECK(s1 == doctest::Approx(49.75));
  CHECK(s2 == doctest::Approx(49.75));
  const auto [t1, t2] = beta_params_for_mean(0.3, 1.0);
  CHECK(t1 == doctest::Approx(0.09));
  CHECK(t2 == doctest::Approx(0.21));
  CHECK(t1 / (t1 + t2) == doctest::Approx(0.3));
  CHECK_THROWS_AS(beta_params_for_mean(0.5, 0.4), std::invalid_argument);
}

TEST_CASE("oracle passes the true loss through") {
  EstimatorState est(EstimatorKind::oracle(), 1);
  CHECK(est.estimate(Vec{1.0}, 0.5, 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(est.estimate(Vec{1.0}, 0.5, std::nullopt), std::invalid_argument);
}

TEST_CASE("beta noise is unbiased with the stated variance") {
  const std::size_t n = 100000;
  for (double mean : {0.1, 0.3, 0.5, 0.9}) {
    EstimatorState est(EstimatorKind::beta_noise(100.0), 7);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = est.estimate(Vec{0.0}, 0.5, mean);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
      sum_sq += v * v;
    }
    const double emp_mean = sum / n;
    const double emp_var = sum_sq / n - emp_mean * emp_mean;
    const double se = std::sqrt(emp_var / n);
    CHECK(std::abs(emp_mean - mean) <= 3.0 * se);
    const double want = mean * (1.0 - mean) / (100.0 + mean);
    CHECK(emp_var == doctest::Approx(want).epsilon(0.10));
  }
}

TEST_CASE("beta noise variance at the documented alpha=100 point") {
  EstimatorState est(EstimatorKind::beta_noise(100.0), 11);
  const std::size_t n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = est.estimate(Vec{0.0}, 0.5, 0.3);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(var == doctest::Approx(0.3 * 0.7 / 100.3).epsilon(0.10));
}

TEST_CASE("beta noise variance decreases with alpha") {
  std::map<double, double> vars;
  for (double alpha : {1.0, 2.5, 100.0}) {
    EstimatorState est(EstimatorKind::beta_noise(alpha), 13);
    const std::size_t n = 50000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = est.estimate(Vec{0.0}, 0.5, 0.4);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    vars[alpha] = sum_sq / n - mean * mean;
  }
  CHECK(vars[1.0] > vars[2.5]);
  CHECK(vars[2.5] > vars[100.0]);
}

TEST_CASE("beta noise deterministic edges") {
  EstimatorState est(EstimatorKind::beta_noise(100.0), 17);
  CHECK(est.estimate(Vec{0.0}, 0.5, 0.0) == 0.0);
  CHECK(est.estimate(Vec{0.0}, 0.5, 1.0) == 1.0);
}

TEST_CASE("knn nearest neighbor recall and warm-up fallback") {
  EstimatorState est(EstimatorKind::knn(1), 19);
  CHECK(est.estimate(Vec{1.0, 2.0}, 0.5, std::nullopt) == doctest::Approx(0.5));
  est.observe(Vec{1.0, 2.0}, 0.5, 0.7);
  CHECK(est.steps_seen() == 1);
  CHECK(est.estimate(Vec{1.0, 2.0}, 0.5, std::nullopt) == doctest::Approx(0.7));
  CHECK_THROWS_AS(est.estimate(Vec{1.0, 2.0}, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("forest warm-up and constant-target fit") {
  EstimatorKind kind = EstimatorKind::forest(5, 3);
  EstimatorState est(kind, 23);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec x{unif(rng), unif(rng)};
    if (est.steps_seen() < 3)
      CHECK(est.estimate(x, 0.5, std::nullopt) == doctest::Approx(0.5));
    est.observe(x, 0.5, 0.25);
  }
  for (int i = 0; i < 10; ++i)
    CHECK(est.estimate(Vec{unif(rng), unif(rng)}, unif(rng), std::nullopt) ==
          doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("forest predictions stay within [0,1] and track structure") {
  EstimatorState est(EstimatorKind::forest(25, 1), 31);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 120; ++i) {
    const double x = unif(rng);
    est.observe(Vec{x}, 0.0, x < 0.5 ? 0.2 : 0.8);
  }
  double low = est.estimate(Vec{0.1}, 0.0, std::nullopt);
  double high = est.estimate(Vec{0.9}, 0.0, std::nullopt);
  CHECK(low >= 0.0);
  CHECK(high <= 1.0);
  CHECK(low < 0.4);
  CHECK(high > 0.6);
}

TEST_CASE("forest fits are deterministic under a fixed seed") {
  const auto build = [] {
    EstimatorState est(EstimatorKind::forest(10, 1), 4242);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 60; ++i) {
      const double x = unif(rng), y = unif(rng);
      est.observe(Vec{x, y}, 0.3, std::min(1.0, x * y + 0.1));
    }
    Vec preds;
    for (double q = 0.05; q < 1.0; q += 0.1)
      preds.push_back(est.estimate(Vec{q, 1.0 - q}, 0.3, std::nullopt));
    return preds;
  };
  CHECK(build() == build());
}
