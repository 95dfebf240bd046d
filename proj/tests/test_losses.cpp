#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "awsgd/losses.hpp"

using namespace awsgd;

namespace {

Example make_example(Vec x, int label) {
  Example ex;
  ex.features = std::move(x);
  ex.label = label;
  return ex;
}

std::vector<LossKind> smooth_kinds() {
  return {LossKind::squared_hinge(), LossKind::logistic(), LossKind::gen_smooth_hinge(1.0),
          LossKind::gen_smooth_hinge(2.0), LossKind::gen_smooth_hinge(8.0)};
}

}  // namespace

TEST_CASE("margin loss values at the pinned points") {
  CHECK(margin_loss(LossKind::squared_hinge(), 0.0) == doctest::Approx(0.5));
  CHECK(margin_loss(LossKind::gen_smooth_hinge(1.0), 0.0) == doctest::Approx(0.5));
  CHECK(margin_loss(LossKind::logistic(), 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(margin_loss(LossKind::zero_one(), 0.0) == 1.0);
  CHECK(margin_loss(LossKind::zero_one(), 0.1) == 0.0);
  CHECK(margin_loss(LossKind::abs_error(), 0.0) == doctest::Approx(0.5));
  CHECK(margin_loss(LossKind::hinge(), 2.0) == 0.0);
}

TEST_CASE("gradients at the pinned points") {
  ModelParams theta2{{0.0, 0.0}, TaskSpec::binary_task()};
  const Vec g = loss_gradient(LossKind::squared_hinge(), make_example({1.0, 0.0}, 1), theta2);
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(0.0));

  CHECK(margin_loss_derivative(LossKind::hinge(), 1.5) == 0.0);

  ModelParams theta1{{0.0}, TaskSpec::binary_task()};
  const Vec gl = loss_gradient(LossKind::logistic(), make_example({1.0}, 1), theta1);
  CHECK(gl[0] == doctest::Approx(-0.5));
}

TEST_CASE("finite differences confirm every smooth gradient") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = 1e-6;
  for (const LossKind& kind : smooth_kinds()) {
    for (int i = 0; i < 100; ++i) {
      Example ex = make_example({gauss(rng), gauss(rng), gauss(rng)}, i % 2 == 0 ? 1 : -1);
      ModelParams theta{{0.4 * gauss(rng), 0.4 * gauss(rng), 0.4 * gauss(rng)},
                        TaskSpec::binary_task()};
      const Vec grad = loss_gradient(kind, ex, theta);
      Vec fd(3);
      for (int j = 0; j < 3; ++j) {
        ModelParams up = theta, down = theta;
        up.theta[j] += h;
        down.theta[j] -= h;
        fd[j] = (loss_value(kind, ex, up) - loss_value(kind, ex, down)) / (2.0 * h);
      }
      Vec diff = fd;
      axpy(-1.0, grad, diff);
      CHECK(norm2(diff) <= 1e-5 * std::max(1.0, norm2(grad)));
    }
  }
}

TEST_CASE("finite differences confirm the multiclass cross-entropy gradient") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int k = 4, d = 3;
  const LossKind ce = LossKind::multi_cross_entropy(k);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    Example ex = make_example({gauss(rng), gauss(rng), gauss(rng)}, i % k);
    ModelParams theta = ModelParams::zeros(d, TaskSpec::multiclass_task(k));
    for (auto& v : theta.theta) v = 0.5 * gauss(rng);
    const Vec grad = loss_gradient(ce, ex, theta);
    for (std::size_t j = 0; j < theta.theta.size(); ++j) {
      ModelParams up = theta, down = theta;
      up.theta[j] += h;
      down.theta[j] -= h;
      const double fd = (loss_value(ce, ex, up) - loss_value(ce, ex, down)) / (2.0 * h);
      CHECK(fd == doctest::Approx(grad[j]).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("convexity in the margin for convex kinds") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (const LossKind& kind : {LossKind::squared_hinge(), LossKind::hinge(),
                               LossKind::logistic(), LossKind::gen_smooth_hinge(3.0)}) {
    for (int i = 0; i < 300; ++i) {
      const double u = gauss(rng), v = gauss(rng);
      CHECK(margin_loss(kind, 0.5 * (u + v)) <=
            0.5 * (margin_loss(kind, u) + margin_loss(kind, v)) + 1e-12);
    }
  }
}

TEST_CASE("generalized smooth hinge approaches the hinge as a grows") {
  for (double a : {1.0, 2.0, 5.0, 20.0}) {
    const LossKind kind = LossKind::gen_smooth_hinge(a);
    CHECK(std::abs(margin_loss(kind, -1.3) - 2.3) == doctest::Approx(1.0 / (a + 1.0)));
    CHECK(std::abs(margin_loss(kind, 0.0) - 1.0) == doctest::Approx(1.0 / (a + 1.0)));
    double sup_gap = 0.0;
    for (double u = -2.0; u <= 1.0; u += 0.001) {
      const double hinge = std::max(1.0 - u, 0.0);
      sup_gap = std::max(sup_gap, std::abs(margin_loss(kind, u) - hinge));
    }
    CHECK(sup_gap <= 1.0 / (a + 1.0) + 1e-12);
  }
}

TEST_CASE("psi at the pinned points and its scaling") {
  ModelParams theta{{0.0}, TaskSpec::binary_task()};
  const auto p = psi(LossKind::logistic(), make_example({1.0}, 1), theta);
  REQUIRE(p.has_value());
  CHECK(*p == doctest::Approx(0.25 / std::log(2.0)));

  // flat hinge region has zero gradient
  ModelParams far{{2.0}, TaskSpec::binary_task()};
  CHECK_FALSE(psi(LossKind::hinge(), make_example({1.0}, 1), far).has_value());

  ModelParams theta2{{0.3, -0.2}, TaskSpec::binary_task()};
  const Example ex = make_example({0.7, 0.4}, -1);
  Example ex2 = ex;
  scale(ex2.features, 2.0);
  ModelParams half = theta2;
  scale(half.theta, 0.5);  // same margin, doubled feature norm
  const auto p1 = psi(LossKind::logistic(), ex, theta2);
  const auto p2 = psi(LossKind::logistic(), ex2, half);
  REQUIRE(p1.has_value());
  REQUIRE(p2.has_value());
  CHECK(*p2 == doctest::Approx(4.0 * *p1).epsilon(1e-10));
}

TEST_CASE("psi equals h(u) ||x||^2 for the logistic loss") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Example ex = make_example({gauss(rng), gauss(rng)}, i % 2 == 0 ? 1 : -1);
    ModelParams theta{{gauss(rng), gauss(rng)}, TaskSpec::binary_task()};
    const auto p = psi(LossKind::logistic(), ex, theta);
    REQUIRE(p.has_value());
    const double u = margin(theta, ex);
    CHECK(*p == doctest::Approx(h_logistic(u) * norm2_sq(ex.features)).epsilon(1e-10));
  }
}

TEST_CASE("h at the pinned points and asymptotics") {
  CHECK(h_logistic(0.0) == doctest::Approx(1.0 / (4.0 * std::log(2.0))));
  CHECK(h_logistic(30.0) == doctest::Approx(sigmoid(-30.0)).epsilon(0.01));
  CHECK(h_logistic(-100.0) == doctest::Approx(0.01).epsilon(0.02));
  // continuity across the series switch
  CHECK(h_logistic(30.0 + 1e-9) == doctest::Approx(h_logistic(30.0 - 1e-9)).epsilon(1e-6));
}

TEST_CASE("h upper bounds at the pinned points") {
  const HBounds b0 = h_upper_bounds(0.0, 0.5);
  CHECK(b0.sigmoid_bound == doctest::Approx(0.5));
  CHECK(b0.entropy_bound == doctest::Approx(1.0 / std::log(2.0)));
  CHECK(h_logistic(0.0) <= b0.sigmoid_bound);

  const HBounds bm10 = h_upper_bounds(-10.0, 0.5);
  CHECK(bm10.entropy_bound == doctest::Approx(1.0 / (std::log(2.0) + 5.0)));
  CHECK(h_logistic(-10.0) <= bm10.entropy_bound);

  CHECK_THROWS_AS(h_upper_bounds(0.0, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(h_upper_bounds(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("lemma bounds hold on the fine grid") {
  for (double a : {0.05, 0.1, 0.25, 0.5}) {
    for (double u = -50.0; u <= 50.0 + 1e-9; u += 0.01) {
      const double h = h_logistic(u);
      const HBounds b = h_upper_bounds(u, a);
      CHECK(h <= b.sigmoid_bound + 1e-15);
      CHECK(h <= b.entropy_bound + 1e-15);
    }
  }
}

TEST_CASE("smoothness constants") {
  CHECK(smoothness_constant(LossKind::logistic(), 1.0) == doctest::Approx(0.25));
  CHECK(smoothness_constant(LossKind::squared_hinge(), 2.0) == doctest::Approx(4.0));
  CHECK(smoothness_constant(LossKind::gen_smooth_hinge(2.0), 1.0) == doctest::Approx(2.0));
  CHECK(smoothness_constant(LossKind::multi_cross_entropy(3), 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(smoothness_constant(LossKind::zero_one(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(smoothness_constant(LossKind::hinge(), 1.0), std::invalid_argument);
}

TEST_CASE("multiclass gradient norm sandwich") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int k = 5, d = 4;
  const LossKind ce = LossKind::multi_cross_entropy(k);
  for (int i = 0; i < 200; ++i) {
    Example ex;
    ex.features.resize(d);
    for (auto& v : ex.features) v = gauss(rng);
    ex.label = i % k;
    ModelParams theta = ModelParams::zeros(d, TaskSpec::multiclass_task(k));
    for (auto& v : theta.theta) v = gauss(rng);
    const double l = loss_value(ce, ex, theta);
    const double g2 = norm2_sq(loss_gradient(ce, ex, theta));
    const double x2 = norm2_sq(ex.features);
    const double core = (1.0 - std::exp(-l)) * (1.0 - std::exp(-l));
    CHECK(g2 >= x2 * core - 1e-9);
    CHECK(g2 <= 2.0 * x2 * core + 1e-9);
  }
}

TEST_CASE("training with sampling-only losses is rejected") {
  CHECK_FALSE(LossKind::zero_one().is_trainable());
  CHECK_FALSE(LossKind::abs_error().is_trainable());
  ModelParams theta{{1.0}, TaskSpec::binary_task()};
  CHECK(loss_gradient(LossKind::zero_one(), make_example({1.0}, -1), theta) == Vec{0.0});
  CHECK(loss_gradient(LossKind::abs_error(), make_example({1.0}, -1), theta) == Vec{0.0});
}
