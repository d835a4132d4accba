#pragma once

#include <array>
#include <vector>

#include "nphkit/data.hpp"
#include "nphkit/km.hpp"

namespace nphkit {

// Fleming-Harrington G(rho,gamma) weight: w(t) = S(t-)^rho (1-S(t-))^gamma.
struct FHWeight {
  double rho = 0.0;
  double gamma = 0.0;
};

struct WLRResult {
  double U = 0.0;   // weighted observed - expected sum
  double se = 0.0;
  double Z = 0.0;   // U / se
  double p_two_sided = 1.0;
};

enum class WeightTiming {
  kLeftLimit,  // predictable weights S(t-), default
  kAtTime,     // S(t) evaluated at the event time itself
};

enum class ComboCovariance {
  kEstimated,  // correlations from the weighted variance/covariance sums
  kIdentity,   // treat the component statistics as independent
};

struct MaxComboResult {
  std::array<FHWeight, 3> weights;
  std::array<double, 3> component_Z{};
  std::array<double, 9> correlation{};  // row-major 3x3, unit diagonal
  double Z_max = 0.0;                   // max_k |Z_k|
  double p_two_sided = 1.0;
};

// Weight values at the given event times from the pooled KM curve.
std::vector<double> fh_weight_values(const KMCurve& pooled,
                                     const std::vector<double>& event_times,
                                     const FHWeight& w,
                                     WeightTiming timing = WeightTiming::kLeftLimit);

// Weighted log-rank test. Throws std::invalid_argument on single-arm or
// event-free data and std::runtime_error on a degenerate (zero
// variance) statistic.
WLRResult weighted_logrank(const SurvivalDataset& data, const FHWeight& w,
                           WeightTiming timing = WeightTiming::kLeftLimit);

// Same test evaluated on a prebuilt event table (hot path for simulation).
WLRResult weighted_logrank(const EventTable& table, const FHWeight& w,
                           WeightTiming timing = WeightTiming::kLeftLimit);

// MaxCombo over the G(1,0), G(0,1), G(1,1) components (Table-1 order).
MaxComboResult maxcombo(const SurvivalDataset& data,
                        ComboCovariance cov = ComboCovariance::kEstimated,
                        WeightTiming timing = WeightTiming::kLeftLimit);
MaxComboResult maxcombo(const EventTable& table,
                        ComboCovariance cov = ComboCovariance::kEstimated,
                        WeightTiming timing = WeightTiming::kLeftLimit);

}  // namespace nphkit
