#pragma once

#include "nphkit/data.hpp"

namespace nphkit {

struct RMSTEstimate {
  double mu = 0.0;
  double var = 0.0;
};

struct RMSTResult {
  double t_star = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double delta = 0.0;     // mu1 - mu0
  double se_delta = 0.0;
  double Z = 0.0;
  double p_two_sided = 1.0;
};

// Restricted mean survival time for one arm: area under the KM curve on
// [0, t_star], with the Greenwood-type plug-in variance.
RMSTEstimate rmst_estimate(const SurvivalDataset& arm_data, double t_star);

// Truncation-time rule: the earlier of the per-arm maximum *event*
// times (censoring times ignored). Throws if an arm has no events.
double select_t_star(const SurvivalDataset& data);

// Two-arm difference test at t_star = select_t_star(data).
RMSTResult rmst_difference_test(const SurvivalDataset& data);

}  // namespace nphkit
