#include <cmath>

#include "doctest.h"
#include "vhi/errors.hpp"
#include "vhi/problem.hpp"

using vhi::check_smallness_constants;

TEST_CASE("passing instance: rate and dependence constant") {
  const auto rep = check_smallness_constants(2.0, 1.0, 0.5, 0.25, 1.0);
  CHECK(rep.pass);
  CHECK(rep.contraction_ok);
  CHECK(rep.coercivity_ok);
  CHECK(rep.q == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(rep.c == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(rep.failing.empty());
}

TEST_CASE("boundary case fails the strict inequality") {
  const auto rep = check_smallness_constants(1.0, 1.0, 1.0, 0.0, 1.0);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.contraction_ok);
  CHECK(rep.failing.find("m_A") != std::string::npos);
  CHECK(std::isinf(rep.c));
}

TEST_CASE("coercivity inequality is checked independently") {
  // contraction holds (2 > 0.1 + 0.5) but coercivity fails (1 <= 2*0.5)
  const auto rep = check_smallness_constants(2.0, 1.0, 0.1, 0.5, 1.0);
  CHECK(rep.contraction_ok);
  CHECK_FALSE(rep.coercivity_ok);
  CHECK_FALSE(rep.pass);
  CHECK(rep.failing.find("alpha_A") != std::string::npos);
}

TEST_CASE("missing constants are named") {
  CHECK_THROWS_WITH_AS(check_smallness_constants(std::nan(""), 1.0, 0.0, 0.0, 1.0),
                       doctest::Contains("m_A"), vhi::ConfigError);
  CHECK_THROWS_WITH_AS(check_smallness_constants(1.0, 1.0, std::nan(""), 0.0, 1.0),
                       doctest::Contains("alpha_phi"), vhi::ConfigError);
  CHECK_THROWS_AS(check_smallness_constants(0.0, 1.0, 0.0, 0.0, 1.0), vhi::ConfigError);
}

TEST_CASE("report carries the inputs it judged") {
  const auto rep = check_smallness_constants(3.0, 2.5, 0.25, 0.5, 1.5);
  CHECK(rep.m_A == 3.0);
  CHECK(rep.alpha_A == 2.5);
  CHECK(rep.alpha_phi == 0.25);
  CHECK(rep.m_J == 0.5);
  CHECK(rep.m_norm == 1.5);
  // coupling = 0.5 * 2.25 = 1.125; q = (0.25 + 1.125)/3; c = 1/(3 - 1.375)
  CHECK(rep.q == doctest::Approx((0.25 + 1.125) / 3.0).epsilon(1e-15));
  CHECK(rep.c == doctest::Approx(1.0 / (3.0 - 1.375)).epsilon(1e-15));
  CHECK(rep.pass == (3.0 > 1.375 && 2.5 > 2.25));
}
