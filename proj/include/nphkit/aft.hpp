#pragma once

#include <vector>

#include "nphkit/data.hpp"

namespace nphkit {

// Generalized Gamma GG(beta, sigma, tau). tau = 0 is the log-normal
// limit, tau = 1 Weibull, tau = sigma = 1 exponential.
struct GGParams {
  double beta = 0.0;
  double sigma = 1.0;
  double tau = 1.0;
};

double gg_log_density(double t, const GGParams& params);
double gg_density(double t, const GGParams& params);
double gg_survival(double t, const GGParams& params);
double gg_quantile(double u, const GGParams& params);

// Generalized F in the stable (beta, sigma, q, p) parameterization,
// p >= 0; p = 0 with q = tau is the GG boundary, (q=0, p=1) is
// log-logistic.
struct GFParams {
  double beta = 0.0;
  double sigma = 1.0;
  double q = 0.0;
  double p = 1.0;
};

// Derived (m1, m2, delta) for the classical parameterization.
struct GFShapes {
  double m1 = 0.0;
  double m2 = 0.0;
  double delta = 0.0;
};
GFShapes gf_shapes(const GFParams& params);

double gf_log_density(double t, const GFParams& params);
double gf_density(double t, const GFParams& params);
double gf_survival(double t, const GFParams& params);
double gf_quantile(double u, const GFParams& params);

enum class AFTFamily { kGeneralizedGamma, kGeneralizedF };

// AFT fit with location beta = beta0 + beta1 * arm. Free parameters are
// (beta0, beta1, log sigma, tau) for GG and (beta0, beta1, log sigma,
// q, log p) for GF; covariance is over that free vector.
struct AFTFit {
  AFTFamily family = AFTFamily::kGeneralizedGamma;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double sigma = 1.0;
  double tau = 0.0;   // GG shape
  double q = 0.0;     // GF shapes
  double p = 0.0;
  double loglik = 0.0;
  bool converged = false;
  bool hessian_pd = false;
  int n_iter = 0;
  double var_beta1 = 0.0;
  double wald_W = 0.0;
  double wald_p = 1.0;
  std::vector<double> covariance;  // row-major over free parameters
  int n_free = 0;
};

// Right-censored maximum likelihood with a deterministic multi-start
// shape grid; quasi-Newton (BFGS) with central-difference gradients.
// Requires two arms and >= 5 events.
AFTFit aft_fit(const SurvivalDataset& data, AFTFamily family);

// Model-implied curve for one arm of a fit.
class AFTSurvival {
 public:
  AFTSurvival(const AFTFit& fit, int arm);
  double survival(double t) const;
  double median() const;
  // Adaptive quadrature of the parametric survival to 1e-8.
  double rmst(double t_star) const;

 private:
  AFTFamily family_;
  GGParams gg_;
  GFParams gf_;
};

}  // namespace nphkit
