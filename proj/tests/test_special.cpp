#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nphkit/special.hpp"

using namespace nphkit::special;

TEST_CASE("normal CDF, survival, quantile") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(norm_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(norm_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  CHECK(norm_sf(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  for (double p : {1e-10, 1e-4, 0.1, 0.5, 0.9, 0.9999, 1.0 - 1e-10}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("incomplete gamma: closed forms and round trips") {
  // P(1,x) = 1 - e^{-x}
  for (double x : {0.1, 1.0, 5.0}) {
    CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
  }
  // P(0.5, x) = erf(sqrt(x))
  CHECK(gamma_p(0.5, 2.0) == doctest::Approx(std::erf(std::sqrt(2.0))).epsilon(1e-13));
  CHECK(gamma_p(3.0, 0.0) == doctest::Approx(0.0));
  CHECK(gamma_q(3.0, 0.0) == doctest::Approx(1.0));
  for (double a : {0.3, 1.0, 4.5, 120.0}) {
    for (double p : {0.001, 0.1, 0.5, 0.9, 0.999}) {
      double x = gamma_p_inv(a, p);
      CHECK(gamma_p(a, x) == doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("incomplete beta: identities and round trips") {
  CHECK(beta_inc(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-13));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  CHECK(beta_inc(2.5, 1.5, 0.3) ==
        doctest::Approx(1.0 - beta_inc(1.5, 2.5, 0.7)).epsilon(1e-12));
  // I_x(1,b) = 1-(1-x)^b
  CHECK(beta_inc(1.0, 3.0, 0.2) ==
        doctest::Approx(1.0 - std::pow(0.8, 3.0)).epsilon(1e-13));
  for (double a : {0.4, 1.0, 3.0, 40.0}) {
    for (double b : {0.7, 2.0, 15.0}) {
      for (double p : {0.01, 0.3, 0.5, 0.8, 0.99}) {
        double x = beta_inc_inv(a, b, p);
        CHECK(beta_inc(a, b, x) == doctest::Approx(p).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("chi-square upper tail") {
  CHECK(chisq_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chisq_sf(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(chisq_sf(5.991464547107979, 2.0) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("bivariate normal: closed forms") {
  // P(X<=0, Y<=0) = 1/4 + asin(r)/(2 pi)
  for (double r : {-0.9, -0.5, 0.0, 0.3, 0.8, 0.99}) {
    double want = 0.25 + std::asin(r) / (2.0 * M_PI);
    CHECK(bvn_cdf(0.0, 0.0, r) == doctest::Approx(want).epsilon(1e-10));
  }
  // independence factorizes
  CHECK(bvn_cdf(0.7, -1.2, 0.0) ==
        doctest::Approx(norm_cdf(0.7) * norm_cdf(-1.2)).epsilon(1e-12));
  // perfect correlation: min of the marginals
  CHECK(bvn_cdf(0.5, 1.5, 1.0) == doctest::Approx(norm_cdf(0.5)).epsilon(1e-12));
}

TEST_CASE("trivariate box: identity correlation is a product") {
  std::array<double, 9> ident{1, 0, 0, 0, 1, 0, 0, 0, 1};
  double z = 1.959963984540054;
  double m = 2.0 * norm_cdf(z) - 1.0;  // 0.95
  CHECK(mvn3_box(ident, z) == doctest::Approx(m * m * m).epsilon(1e-6));
  CHECK(mvn3_box(ident, 2.0) ==
        doctest::Approx(std::pow(2.0 * norm_cdf(2.0) - 1.0, 3)).epsilon(1e-6));
}

TEST_CASE("trivariate box: exchangeable rho=0.5 against Monte Carlo") {
  // 4e7-draw Monte Carlo oracle (frozen): 0.874573 (se 5.2e-5) at
  // z = 1.959964 and 0.375593 at z = 1.
  std::array<double, 9> c{1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1};
  CHECK(mvn3_box(c, 1.959963984540054) == doctest::Approx(0.874573).epsilon(4e-4));
  CHECK(mvn3_box(c, 1.0) == doctest::Approx(0.375593).epsilon(6e-4));
}

TEST_CASE("trivariate box: perfect correlation collapses to one margin") {
  std::array<double, 9> c{1, 1, 1, 1, 1, 1, 1, 1, 1};
  double z = 1.5;
  CHECK(mvn3_box(c, z) == doctest::Approx(2.0 * norm_cdf(z) - 1.0).epsilon(1e-6));
}

TEST_CASE("trivariate box rejects invalid input") {
  std::array<double, 9> bad{1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1};
  CHECK_THROWS_AS(mvn3_box(bad, 1.0), std::invalid_argument);
  std::array<double, 9> ident{1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK_THROWS_AS(mvn3_box(ident, -1.0), std::invalid_argument);
}
