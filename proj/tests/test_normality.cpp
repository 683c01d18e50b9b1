#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "sagnac/normality.hpp"

using namespace sagnac;

// Reference statistics from an independent Shapiro-Wilk implementation.
TEST_SUITE("normality") {
  TEST_CASE("n = 3 exact") {
    const std::vector<double> x{1.0, 2.0, 4.0};
    const auto r = shapiro_wilk(x);
    CHECK(r.w == doctest::Approx(0.9642857142857142).epsilon(1e-10));
    CHECK(r.p_value == doctest::Approx(0.6368868450289689).epsilon(1e-6));
  }

  TEST_CASE("small sample") {
    const std::vector<double> x{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.0, 3.9, 3.1};
    const auto r = shapiro_wilk(x);
    CHECK(r.w == doctest::Approx(0.9690583634582997).epsilon(1e-4));
    CHECK(r.p_value == doctest::Approx(0.881979826757866).epsilon(5e-3));
  }

  TEST_CASE("skewed sample is rejected") {
    std::vector<double> x;
    for (int i = 0; i < 20; ++i) x.push_back(std::exp(0.15 * i));
    const auto r = shapiro_wilk(x);
    CHECK(r.w == doctest::Approx(0.8708913370755907).epsilon(1e-4));
    CHECK(r.p_value == doctest::Approx(0.012180972600207222).epsilon(5e-2));
  }

  TEST_CASE("uniform sample, large-n branch") {
    std::vector<double> x;
    for (int i = 0; i < 50; ++i) x.push_back(((i * 37) % 50) / 50.0);
    const auto r = shapiro_wilk(x);
    CHECK(r.w == doctest::Approx(0.9555826875589973).epsilon(1e-4));
    CHECK(r.p_value == doctest::Approx(0.058091862177350316).epsilon(5e-2));
  }

  TEST_CASE("order and scale invariance") {
    std::vector<double> x{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.0, 3.9, 3.1};
    const auto a = shapiro_wilk(x);
    for (double& v : x) v = 10.0 - 3.0 * v;
    const auto b = shapiro_wilk(x);
    CHECK(a.w == doctest::Approx(b.w).epsilon(1e-12));
    CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-10));
  }

  TEST_CASE("degenerate inputs") {
    const std::vector<double> same(10, 4.2);
    const auto r = shapiro_wilk(same);
    CHECK(r.w == 1.0);
    CHECK(r.p_value == 1.0);
    CHECK_THROWS_AS(shapiro_wilk(std::vector<double>{1.0, 2.0}), std::invalid_argument);
  }
}
