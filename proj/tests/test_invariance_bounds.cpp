#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "sacbf/errors.hpp"
#include "sacbf/invariance_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace sacbf;

TEST_CASE("comparison bound examples") {
  CHECK(comparison_lower_bound(1.0, 2.0, 1.0, 0.0) == 1.0);
  CHECK(comparison_lower_bound(1.0, 1.0, 2.0, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(comparison_lower_bound(1.0, 2.0, 0.5, 2.0) == 0.0);
  CHECK(comparison_lower_bound(3.0, 2.0, 1.0, 0.1) == doctest::Approx(3.0 * std::exp(-0.2)).epsilon(1e-15));
  CHECK(comparison_lower_bound(0.0, 2.0, 1.5, 0.3) == 0.0);
  CHECK(comparison_lower_bound(0.0, 2.0, 0.5, 0.3) == 0.0);
}

TEST_CASE("comparison bound errors") {
  CHECK_THROWS_AS(comparison_lower_bound(-0.1, 1.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(comparison_lower_bound(1.0, 0.0, 1.0, 0.1), ContractViolation);
  CHECK_THROWS_AS(comparison_lower_bound(1.0, 1.0, 0.0, 0.1), ContractViolation);
  CHECK_THROWS_AS(comparison_lower_bound(1.0, 1.0, 1.0, -0.1), ContractViolation);
}

TEST_CASE("closed form matches numerical integration on the grid") {
  double worst = 0.0;
  for (double psi0 : {0.0, 0.1, 1.0, 10.0})
    for (double lambda : {0.5, 2.0})
      for (double eta : {0.5, 1.0, 1.5, 2.0})
        for (int i = 0; i <= 40; ++i) {
          const double dt = 2.0 * i / 40.0;
          const double closed = comparison_lower_bound(psi0, lambda, eta, dt);
          const double numeric = oracle::comparison_decay(psi0, lambda, eta, dt);
          worst = std::max(worst, std::abs(closed - numeric));
          CHECK(closed >= 0.0);
        }
  CHECK(worst <= 1e-6);
}

TEST_CASE("monotone in dt and psi0") {
  for (double lambda : {0.5, 2.0})
    for (double eta : {0.5, 0.8, 1.0, 1.5, 2.0}) {
      for (double psi0 : {0.0, 0.1, 1.0, 10.0}) {
        double prev = comparison_lower_bound(psi0, lambda, eta, 0.0);
        for (int i = 1; i <= 100; ++i) {
          const double now = comparison_lower_bound(psi0, lambda, eta, 0.02 * i);
          CHECK(now <= prev + 1e-15);
          prev = now;
        }
      }
      for (double dt : {0.0, 0.1, 1.0}) {
        double prev = comparison_lower_bound(0.0, lambda, eta, dt);
        for (int i = 1; i <= 50; ++i) {
          const double now = comparison_lower_bound(0.2 * i, lambda, eta, dt);
          CHECK(now >= prev - 1e-15);
          prev = now;
        }
      }
    }
}

TEST_CASE("continuous in eta across one") {
  for (double psi0 : {0.1, 1.0, 10.0})
    for (double lambda : {0.5, 2.0})
      for (double dt : {0.05, 0.5, 2.0}) {
        const double at_one = comparison_lower_bound(psi0, lambda, 1.0, dt);
        CHECK(std::abs(comparison_lower_bound(psi0, lambda, 1.0 + 1e-6, dt) - at_one) <= 1e-4);
        CHECK(std::abs(comparison_lower_bound(psi0, lambda, 1.0 - 1e-6, dt) - at_one) <= 1e-4);
        CHECK(comparison_lower_bound(psi0, lambda, 1.0 + 1e-13, dt) == at_one);
      }
}
