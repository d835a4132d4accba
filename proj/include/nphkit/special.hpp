#pragma once

#include <array>

// Double-precision special functions used across the statistical code.
// All functions are pure and thread-safe.

namespace nphkit::special {

// Standard normal CDF, survival function, and quantile.
double norm_cdf(double x);
double norm_sf(double x);
double norm_quantile(double p);

// Regularized incomplete gamma P(a,x) (lower) and Q(a,x) (upper),
// a > 0, x >= 0. Inverse solves P(a,x) = p for x.
double gamma_p(double a, double x);
double gamma_q(double a, double x);
double gamma_p_inv(double a, double p);

// Regularized incomplete beta I_x(a,b) and its inverse in x.
double beta_inc(double a, double b, double x);
double beta_inc_inv(double a, double b, double p);

// Upper tail of the chi-square distribution.
double chisq_sf(double x, double df);

// P(X > h, Y > k) for standard bivariate normal with correlation r.
double bvn_upper(double h, double k, double r);
// P(X <= h, Y <= k).
double bvn_cdf(double h, double k, double r);

// P(|Z_1| <= z, |Z_2| <= z, |Z_3| <= z) for a trivariate standard
// normal with the given correlation matrix (row-major, unit diagonal).
// Deterministic; absolute accuracy well below 1e-4. Throws on a
// non-positive-semidefinite matrix.
double mvn3_box(const std::array<double, 9>& correlation, double z);

}  // namespace nphkit::special
