#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nphkit/sim.hpp"

namespace nphkit {

// Exact truth for a scenario at one time, from the piecewise
// exponential specs (censoring-free).
struct TrueTheta {
  double rmst_diff = 0.0;
  double surv_diff = 0.0;
  double median0 = 0.0;
  double median1 = 0.0;
};

TrueTheta true_theta(const Scenario& scenario, double t);

struct PowerSummary {
  double rejection = 0.0;
  double se = 0.0;
  long n_success = 0;
  long n_fail = 0;
};

PowerSummary power_summary(const std::vector<RepResult>& results, Method m,
                           double alpha);

// Median (and mean) bias over replications at each grid point for one
// model; absent if no replication produced a usable fit.
struct BiasCurve {
  std::vector<double> median_bias;
  std::vector<double> mean_bias;
  long n_used = 0;
};

struct MedianSurvivalBias {
  double bias0 = 0.0;
  double bias1 = 0.0;
  long n_used0 = 0;
  long n_used1 = 0;
  long n_not_reached0 = 0;
  long n_not_reached1 = 0;
};

struct ModelBiasReport {
  std::string model;  // "cox", "gg", "gf"
  std::optional<BiasCurve> rmst_diff;
  std::optional<BiasCurve> surv_diff;
  std::optional<MedianSurvivalBias> median_survival;
};

struct MethodPowerRow {
  Method method;
  PowerSummary summary;
};

struct ScenarioReport {
  std::string scenario;
  long n_reps = 0;
  std::uint64_t base_seed = 0;
  double alpha = 0.05;
  std::vector<double> grid_times;
  std::vector<MethodPowerRow> power;
  std::vector<ModelBiasReport> bias;

  std::string to_json() const;
  std::string to_csv() const;
};

// Full aggregation of a finished plan.
ScenarioReport summarize(const ReplicationPlan& plan,
                         const std::vector<RepResult>& results);

}  // namespace nphkit
