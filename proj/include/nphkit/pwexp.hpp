#pragma once

#include <vector>

namespace nphkit {

// Piecewise-exponential distribution: constant hazard within each
// interval, last interval unbounded. knots[0] must be 0 and
// rates.size() == knots.size(). rates[j] applies on
// [knots[j], knots[j+1]) (last on [knots.back(), inf)).
class PiecewiseExpSpec {
 public:
  PiecewiseExpSpec() : knots_{0.0}, rates_{0.0} {}  // degenerate: no events
  PiecewiseExpSpec(std::vector<double> knots, std::vector<double> rates);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& rates() const { return rates_; }

  // Cumulative hazard, piecewise linear in t.
  double cum_hazard(double t) const;
  // S(t) = exp(-Lambda(t)).
  double survival(double t) const;
  // Exact integral of S on [0, t_star].
  double rmst(double t_star) const;
  // Smallest t with 1 - S(t) >= u, u in (0,1). Exact inverse of the
  // cumulative hazard.
  double quantile(double u) const;
  double median() const { return quantile(0.5); }

 private:
  std::vector<double> knots_;
  std::vector<double> rates_;
};

}  // namespace nphkit
