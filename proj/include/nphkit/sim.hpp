#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nphkit/data.hpp"
#include "nphkit/logrank.hpp"
#include "nphkit/pwexp.hpp"

namespace nphkit {

enum class Method { kLogrank, kMaxCombo, kRMSTDiff, kGG, kGF };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct Scenario {
  std::string name;
  PiecewiseExpSpec arm0;
  PiecewiseExpSpec arm1;
  long n0 = 0;
  long n1 = 0;
  double followup = 0.0;              // administrative censoring horizon
  double random_censor_rate = 0.0;    // exponential rate, 0 = none
  // Width of the staggered-entry window: each subject's administrative
  // censoring time is uniform on [followup - censor_window, followup]
  // (0 = everyone observed for the full horizon).
  double censor_window = 0.0;
  double alpha = 0.05;
};

// Table-3 case studies (first, inovate, gog0218), the exponential-0.1
// null, and the three cancel-out scenarios (cancel1..3).
std::vector<Scenario> builtin_scenarios();
Scenario scenario_by_name(const std::string& name);

// One simulated trial; deterministic given the seed. Event times by
// inversion of the piecewise cumulative hazard; observed time is the
// minimum of event, random-censoring, and administrative times.
SurvivalDataset simulate_trial(const Scenario& scenario, std::uint64_t seed);

// Seed for replication `index` of a plan; splitmix-style mixing so the
// stream is order-independent.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index);

struct ReplicationPlan {
  Scenario scenario;
  long n_reps = 1;
  std::uint64_t base_seed = 0;
  std::vector<Method> methods;
  bool collect_bias = false;          // Cox/GG/GF grid estimates
  ComboCovariance maxcombo_cov = ComboCovariance::kEstimated;
  int workers = 0;                    // 0 = hardware concurrency
};

struct MethodOutcome {
  bool run = false;
  bool ok = false;
  double p = 1.0;
};

// Grid estimates from one fitted model in one replication. Medians use
// NaN for "not reached".
struct ModelBias {
  bool ok = false;
  std::vector<double> rmst_diff;
  std::vector<double> surv_diff;
  double median0 = 0.0;
  double median1 = 0.0;
};

struct RepResult {
  long index = 0;
  MethodOutcome logrank, maxcombo_m, rmst_diff, gg, gf;
  ModelBias cox_bias, gg_bias, gf_bias;

  const MethodOutcome& outcome(Method m) const;
  MethodOutcome& outcome(Method m);
};

// 30 grid times equally spaced on (0, followup].
std::vector<double> bias_grid(double followup);

// Runs every replication; the returned vector is in index order and is
// identical for identical (base_seed, scenario, methods) regardless of
// worker count. Per-replication failures are flagged, never dropped.
std::vector<RepResult> run_plan(const ReplicationPlan& plan);

}  // namespace nphkit
