#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nphkit/optim.hpp"
#include "nphkit/pwexp.hpp"

using nphkit::PiecewiseExpSpec;

TEST_CASE("single-interval spec is the exponential distribution") {
  PiecewiseExpSpec s({0.0}, {0.1});
  CHECK(s.survival(0.0) == doctest::Approx(1.0));
  CHECK(s.survival(10.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(s.cum_hazard(7.0) == doctest::Approx(0.7).epsilon(1e-12));
  // RMST of exp(rate) on [0,t] is (1-e^{-rate t})/rate
  CHECK(s.rmst(20.0) ==
        doctest::Approx((1.0 - std::exp(-2.0)) / 0.1).epsilon(1e-12));
  CHECK(s.quantile(0.5) == doctest::Approx(std::log(2.0) / 0.1).epsilon(1e-12));
  CHECK(s.median() == doctest::Approx(std::log(2.0) / 0.1).epsilon(1e-12));
}

TEST_CASE("two-interval survival: hand cumulative hazard") {
  // knots {0,8}, rates {0.028, 0.033}, t=10:
  // Lambda = 0.028*8 + 0.033*2 = 0.290
  PiecewiseExpSpec s({0.0, 8.0}, {0.028, 0.033});
  CHECK(s.cum_hazard(10.0) == doctest::Approx(0.290).epsilon(1e-12));
  CHECK(s.survival(10.0) == doctest::Approx(std::exp(-0.290)).epsilon(1e-12));
}

TEST_CASE("quantile: hand inverse cumulative hazard") {
  // knots {0,5}, rates {0.2,0.05}, u=0.8: Lambda(5)=1 < ln 5,
  // t = 5 + (ln 5 - 1)/0.05
  PiecewiseExpSpec s({0.0, 5.0}, {0.2, 0.05});
  double want = 5.0 + (std::log(5.0) - 1.0) / 0.05;
  CHECK(s.quantile(0.8) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("quantile round-trips the survival function to 1e-10") {
  PiecewiseExpSpec s({0.0, 8.0, 20.0, 30.0}, {0.028, 0.033, 0.050, 0.015});
  for (double u : {0.001, 0.05, 0.25, 0.5, 0.75, 0.9, 0.99, 0.9999}) {
    double t = s.quantile(u);
    CHECK(1.0 - s.survival(t) == doctest::Approx(u).epsilon(1e-10));
  }
}

TEST_CASE("rmst agrees with quadrature of the survival function") {
  PiecewiseExpSpec s({0.0, 4.0, 8.0, 12.0, 16.0},
                     {0.106, 0.100, 0.075, 0.144, 0.144});
  for (double t : {3.0, 10.0, 42.0}) {
    double quad = nphkit::adaptive_simpson(
        [&](double u) { return s.survival(u); }, 0.0, t, 1e-10);
    CHECK(s.rmst(t) == doctest::Approx(quad).epsilon(1e-8));
  }
}

TEST_CASE("rmst is exact at interval boundaries") {
  PiecewiseExpSpec s({0.0, 2.0}, {0.5, 0.25});
  // closed form: int_0^2 e^{-0.5u} du + S(2) int_0^t' e^{-0.25 v} dv
  double part1 = (1.0 - std::exp(-1.0)) / 0.5;
  double part2 = std::exp(-1.0) * (1.0 - std::exp(-0.25 * 3.0)) / 0.25;
  CHECK(s.rmst(5.0) == doctest::Approx(part1 + part2).epsilon(1e-12));
}

TEST_CASE("zero-rate tail: quantile can be infinite, rmst still finite") {
  PiecewiseExpSpec s({0.0, 1.0}, {1.0, 0.0});
  // S(t) = e^{-1} for all t >= 1
  CHECK(s.survival(100.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(std::isinf(s.quantile(0.9)));
  CHECK(s.rmst(3.0) ==
        doctest::Approx((1.0 - std::exp(-1.0)) + 2.0 * std::exp(-1.0)));
}

TEST_CASE("constructor validates its arguments") {
  CHECK_THROWS_AS(PiecewiseExpSpec({1.0}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseExpSpec({0.0, 5.0}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseExpSpec({0.0}, {-0.1}), std::invalid_argument);
  CHECK_NOTHROW(PiecewiseExpSpec({0.0}, {0.0}));
  CHECK_THROWS_AS(PiecewiseExpSpec({0.0, 3.0, 2.0}, {0.1, 0.1, 0.1}),
                  std::invalid_argument);
  PiecewiseExpSpec ok({0.0, 5.0}, {0.2, 0.05});
  CHECK_THROWS_AS(ok.quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ok.quantile(1.0), std::invalid_argument);
}
