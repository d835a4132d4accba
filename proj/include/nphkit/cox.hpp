#pragma once

#include <utility>
#include <vector>

#include "nphkit/data.hpp"

namespace nphkit {

// Cox model fit for the single arm indicator, Breslow ties.
struct CoxFit {
  double beta = 0.0;
  double var_beta = 0.0;
  double loglik = 0.0;
  int n_iter = 0;
  bool converged = false;
  // Breslow baseline cumulative hazard: increments at event times.
  std::vector<double> baseline_times;
  std::vector<double> baseline_cumhaz;
};

struct SchoenfeldRow {
  double time = 0.0;
  double residual = 0.0;
  double scaled = 0.0;
};

struct SchoenfeldResiduals {
  std::vector<SchoenfeldRow> rows;
};

enum class TimeTransform { kIdentity, kKM, kRank, kLog };

enum class PHTestKind { kGrambschTherneau, kSchoenfeldGlobal };

struct PHTestResult {
  double statistic = 0.0;
  int df = 1;
  double p = 1.0;
  PHTestKind kind = PHTestKind::kGrambschTherneau;
};

// Newton-Raphson with step-halving on the Breslow partial likelihood;
// start beta = 0, |score| < 1e-8 or 25 iterations. Monotone-likelihood
// data is flagged via converged = false.
CoxFit cox_fit(const SurvivalDataset& data);
CoxFit cox_fit(const EventTable& table);

// One row per event (ties expanded). Scaled residual is the
// Grambsch-Therneau form beta + d * var_beta * r.
SchoenfeldResiduals schoenfeld_residuals(const CoxFit& fit,
                                         const SurvivalDataset& data);

// Score-type test of residuals against g(time); chi-square, df = 1.
// Default transform is the KM transform.
PHTestResult grambsch_therneau_test(const CoxFit& fit,
                                    const SurvivalDataset& data,
                                    TimeTransform transform = TimeTransform::kKM);

// Global residual-vs-time correlation test (identity transform).
PHTestResult schoenfeld_global_test(const CoxFit& fit,
                                    const SurvivalDataset& data);

// Predicted survival step curve S(t | arm) = exp(-Lambda0(t) e^{beta*arm}).
class CoxSurvival {
 public:
  CoxSurvival(const CoxFit& fit, int arm);
  double survival(double t) const;
  // Area under the predicted step curve on [0, t_star].
  double rmst(double t_star) const;
  // First time the curve falls to <= 0.5; negative if never reached.
  double median() const;

 private:
  std::vector<double> times_;
  std::vector<double> surv_;
};

}  // namespace nphkit
