#include <cmath>
#include <initializer_list>

#include "doctest.h"

#include "clocksim/special_functions.hpp"

using namespace clocksim;
using namespace clocksim::special;

TEST_CASE("log_gamma matches high-precision references") {
  CHECK(log_gamma(0.1) == doctest::Approx(2.25271265173420596).epsilon(1e-13));
  CHECK(log_gamma(1.5) == doctest::Approx(-0.1207822376352452223).epsilon(1e-12));
  CHECK(log_gamma(5.5) == doctest::Approx(3.957813967618716294).epsilon(1e-13));
  CHECK(log_gamma(123.456) ==
        doctest::Approx(469.6055471299294687).epsilon(1e-14));
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(log_gamma(0.5) ==
        doctest::Approx(0.5 * std::log(std::acos(-1.0))).epsilon(1e-14));
}

TEST_CASE("gamma_fn on small integers and halves") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(4.0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) ==
        doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-14));
  CHECK(gamma_fn(2.5) == doctest::Approx(1.3293403881791370205).epsilon(1e-14));
}

TEST_CASE("digamma matches high-precision references") {
  CHECK(digamma(0.1) == doctest::Approx(-10.4237549404110768).epsilon(1e-13));
  CHECK(digamma(1.5) == doctest::Approx(0.03648997397857652056).epsilon(1e-11));
  CHECK(digamma(5.5) == doctest::Approx(1.611093148581751124).epsilon(1e-13));
  CHECK(digamma(123.456) == doctest::Approx(4.811829323828985387).epsilon(1e-14));
  CHECK(digamma(1.0) == doctest::Approx(-kEulerGamma).epsilon(1e-13));
  // psi(x+1) = psi(x) + 1/x
  for (double x : {0.3, 0.9, 2.7, 11.0}) {
    CHECK(digamma(x + 1.0) ==
          doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-12));
  }
}

TEST_CASE("signed log gamma handles negative arguments by reflection") {
  // Gamma(-0.5) = -2 sqrt(pi)
  const auto g = log_gamma_signed(-0.5);
  CHECK(g.sign == -1);
  CHECK(g.log_abs ==
        doctest::Approx(std::log(2.0 * std::sqrt(std::acos(-1.0))))
            .epsilon(1e-13));
  // Gamma(-1.5) = 4 sqrt(pi) / 3
  const auto g2 = log_gamma_signed(-1.5);
  CHECK(g2.sign == 1);
  CHECK(g2.log_abs ==
        doctest::Approx(std::log(4.0 * std::sqrt(std::acos(-1.0)) / 3.0))
            .epsilon(1e-12));
  // Positive arguments agree with log_gamma.
  const auto g3 = log_gamma_signed(3.7);
  CHECK(g3.sign == 1);
  CHECK(g3.log_abs == doctest::Approx(log_gamma(3.7)).epsilon(1e-14));
}
