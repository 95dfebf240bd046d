#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "awsgd/model.hpp"

using namespace awsgd;

namespace {
Example make_example(Vec x, int label) {
  Example ex;
  ex.features = std::move(x);
  ex.label = label;
  return ex;
}
}  // namespace

TEST_CASE("binary margin is y x'theta") {
  ModelParams params{{1.0, 0.0}, TaskSpec::binary_task()};
  CHECK(margin(params, make_example({2.0, 3.0}, 1)) == doctest::Approx(2.0));
  CHECK(margin(params, make_example({2.0, 3.0}, -1)) == doctest::Approx(-2.0));
}

TEST_CASE("multiclass margin is own score minus best other") {
  ModelParams params{{1.0, 2.0, 0.0}, TaskSpec::multiclass_task(3)};
  CHECK(margin(params, make_example({1.0}, 1)) == doctest::Approx(1.0));
  CHECK(margin(params, make_example({1.0}, 0)) == doctest::Approx(-1.0));
}

TEST_CASE("margin rejects dimension mismatch") {
  ModelParams params{{1.0, 0.0}, TaskSpec::binary_task()};
  CHECK_THROWS_AS(margin(params, make_example({1.0}, 1)), std::invalid_argument);
}

TEST_CASE("predict_prob matches the logistic function") {
  ModelParams params{{1.0}, TaskSpec::binary_task()};
  CHECK(predict_prob(params, Vec{0.0}) == doctest::Approx(0.5));
  CHECK(predict_prob(params, Vec{std::log(3.0)}) == doctest::Approx(0.75));
  CHECK(predict_prob(params, Vec{800.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isfinite(predict_prob(params, Vec{-800.0})));
}

TEST_CASE("predict_prob symmetry sigma(-u) + sigma(u) = 1") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double u = gauss(rng);
    CHECK(sigmoid(u) + sigmoid(-u) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("projection onto the l2 ball") {
  ProjectionBall ball;
  ball.radius = 10.0;
  ModelParams params{{3.0, 4.0}, TaskSpec::binary_task()};
  CHECK(project(params, ball).theta == Vec{3.0, 4.0});
  ball.radius = 5.0;
  CHECK(project(params, ball).theta == Vec{3.0, 4.0});
  ball.radius = 1.0;
  const ModelParams shrunk = project(params, ball);
  CHECK(shrunk.theta[0] == doctest::Approx(0.6));
  CHECK(shrunk.theta[1] == doctest::Approx(0.8));
}

TEST_CASE("projection is idempotent and non-expansive") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 2.0);
  ProjectionBall ball;
  ball.center = {0.5, -0.25, 1.0};
  ball.radius = 0.8;
  for (int i = 0; i < 100; ++i) {
    ModelParams u{{gauss(rng), gauss(rng), gauss(rng)}, TaskSpec::binary_task()};
    ModelParams v{{gauss(rng), gauss(rng), gauss(rng)}, TaskSpec::binary_task()};
    const ModelParams pu = project(u, ball);
    const ModelParams pv = project(v, ball);
    CHECK(project(pu, ball).theta == pu.theta);  // exact fixed point
    Vec duv = u.theta, dp = pu.theta;
    axpy(-1.0, v.theta, duv);
    axpy(-1.0, pv.theta, dp);
    CHECK(norm2(dp) <= norm2(duv) + 1e-12);
    Vec centered = pu.theta;
    axpy(-1.0, ball.center, centered);
    CHECK(norm2(centered) <= ball.radius + 1e-12);
  }
}

TEST_CASE("running average reproduces the arithmetic mean") {
  Vec avg{0.0};
  running_average(avg, 1, Vec{2.0});
  CHECK(avg[0] == doctest::Approx(1.0));
  running_average(avg, 2, Vec{4.0});
  CHECK(avg[0] == doctest::Approx(2.0));

  Vec constant{5.0};
  running_average(constant, 1, Vec{5.0});
  CHECK(constant[0] == doctest::Approx(5.0));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec run_avg{0.0, 0.0};
  double s0 = 0.0, s1 = 0.0;
  std::size_t t = 0;
  for (int i = 0; i < 500; ++i) {
    const Vec next{gauss(rng), gauss(rng)};
    if (t == 0) {
      run_avg = next;
    } else {
      running_average(run_avg, t, next);
    }
    ++t;
    s0 += next[0];
    s1 += next[1];
  }
  CHECK(run_avg[0] == doctest::Approx(s0 / 500.0).epsilon(1e-10));
  CHECK(run_avg[1] == doctest::Approx(s1 / 500.0).epsilon(1e-10));
}

TEST_CASE("multiclass margin with mirrored blocks equals the binary margin") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Vec theta_b{gauss(rng), gauss(rng), gauss(rng)};
    Vec stacked(6);
    for (int j = 0; j < 3; ++j) {
      stacked[j] = theta_b[j];
      stacked[3 + j] = -theta_b[j];
    }
    ModelParams multi{stacked, TaskSpec::multiclass_task(2)};
    Vec doubled = theta_b;
    scale(doubled, 2.0);
    ModelParams binary{doubled, TaskSpec::binary_task()};
    const Vec x{gauss(rng), gauss(rng), gauss(rng)};
    // class 0 plays the role of +1, class 1 of -1
    CHECK(margin(multi, make_example(x, 0)) ==
          doctest::Approx(margin(binary, make_example(x, 1))).epsilon(1e-12));
    CHECK(margin(multi, make_example(x, 1)) ==
          doctest::Approx(margin(binary, make_example(x, -1))).epsilon(1e-12));
  }
}
