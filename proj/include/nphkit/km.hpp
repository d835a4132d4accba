#pragma once

#include <vector>

#include "nphkit/data.hpp"

namespace nphkit {

// Kaplan-Meier product-limit curve. Right-continuous step function with
// S(0) = 1; steps occur only at event times.
class KMCurve {
 public:
  struct Step {
    double time = 0.0;
    double survival = 1.0;
    long at_risk = 0;
  };

  KMCurve() = default;
  explicit KMCurve(std::vector<Step> steps) : steps_(std::move(steps)) {}

  const std::vector<Step>& steps() const { return steps_; }

  // S(t), right-continuous.
  double survival(double t) const;
  // Left limit S(t-).
  double survival_before(double t) const;
  // Area under the step curve on [0, t_star], exact.
  double area(double t_star) const;
  // First time the curve falls to <= 0.5, or a negative value if the
  // median is never reached.
  double median() const;

 private:
  std::vector<Step> steps_;
};

// Product-limit estimate from subject-level data (single arm or pooled
// across arms). Throws on empty input.
KMCurve km_estimate(const SurvivalDataset& data);

// KM curve computed from an already-built event table plus the total
// sample size backing it.
KMCurve km_from_event_table(const EventTable& table, long n_total);

}  // namespace nphkit
