#include <cmath>
#include <random>

#include "doctest.h"

#include "cmap/error.hpp"
#include "cmap/grad.hpp"
#include "gradcheck.hpp"

using namespace cmap;

TEST_CASE("GradTable lookup by name") {
  GradTable g(2, {"x", "d[0]"});
  g.at(1, 1) = 3.5;
  CHECK(g.get(1, "d[0]") == 3.5);
  CHECK(g.get(0, "x") == 0.0);
  CHECK_FALSE(g.index_of("nope").has_value());
  CHECK_THROWS_AS(g.get(0, "nope"), InvalidArgument);
}

TEST_CASE("straight_through keeps the forward value and the soft gradients") {
  GradTable g(1, {"x"});
  g.at(0, 0) = 2.0;
  const auto r = straight_through(1.0, 0.99, g);
  CHECK(r.value == 1.0);
  CHECK(r.backward_value == 0.99);
  CHECK(r.grads.get(0, "x") == 2.0);

  const auto same = straight_through(0.5, 0.5, g);
  CHECK(same.value == 0.5);
  CHECK(same.grads.get(0, "x") == 2.0);

  // A downstream squared error (v - t)^2 differentiates through grads only:
  // d/dx = 2 (value - t) * grads.
  const double t = 0.25;
  CHECK(2.0 * (r.value - t) * r.grads.get(0, "x") == doctest::Approx(3.0));
}

TEST_CASE("straight_through rejects shape mismatches") {
  CHECK_THROWS_AS(straight_through(1.0, 1.0, GradTable(2, {"x"})), ShapeMismatch);
  CHECK_THROWS_AS(straight_through(std::vector<double>{1, 2}, std::vector<double>{1}, GradTable(2, {"x"})),
                  ShapeMismatch);
  CHECK_THROWS_AS(straight_through(ComplexPoint{}, ComplexPoint{}, GradTable(1, {"x"})), ShapeMismatch);
  CHECK_NOTHROW(straight_through(std::vector<double>{1, 2}, std::vector<double>{1, 3}, GradTable(2, {"x"})));
}

TEST_CASE("finite_difference_check on simple functions") {
  ScalarFunction<double> square = [](std::span<const double> t) { return t[0] * t[0]; };
  const std::vector<double> at{3.0};
  const std::vector<double> grad{6.0};
  const auto r = finite_difference_check<double>(square, at, grad, 1e-5);
  CHECK(r.numeric[0] == doctest::Approx(6.0));
  CHECK(r.max_relative_error < 1e-9);

  ScalarFunction<double> constant = [](std::span<const double>) { return 4.0; };
  const std::vector<double> zero{0.0, 0.0};
  const auto c = finite_difference_check<double>(constant, zero, zero, 1e-5);
  CHECK(c.max_relative_error == 0.0);

  CHECK_THROWS_AS(finite_difference_check<double>(square, at, grad, 0.0), InvalidArgument);
  CHECK_THROWS_AS(finite_difference_check<double>(square, at, zero, 1e-5), ShapeMismatch);

  ScalarFunction<double> throwing = [](std::span<const double>) -> double { throw DegenerateInput("boom"); };
  CHECK_THROWS_AS(finite_difference_check<double>(throwing, at, grad, 1e-5), DegenerateInput);
}

TEST_CASE("finite_difference_check catches a wrong gradient") {
  ScalarFunction<double> cube = [](std::span<const double> t) { return t[0] * t[0] * t[0]; };
  const std::vector<double> at{2.0};
  const std::vector<double> wrong{11.0};
  CHECK(finite_difference_check<double>(cube, at, wrong, 1e-5).max_relative_error > 0.05);
}

TEST_CASE("MRC backward gradient at x = 0.5 with midpoint boundaries") {
  const auto levels = make_uniform_levels(4);
  const auto d = midpoint_boundaries(levels, 20.0);
  CHECK(gradcheck::mrc_max_rel_error(0.5, d, levels, 1e-5) < 1e-5);
}
