#include "nphkit/pwexp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nphkit {

PiecewiseExpSpec::PiecewiseExpSpec(std::vector<double> knots,
                                   std::vector<double> rates)
    : knots_(std::move(knots)), rates_(std::move(rates)) {
  if (knots_.empty() || knots_.front() != 0.0) {
    throw std::invalid_argument("PiecewiseExpSpec: first knot must be 0");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw std::invalid_argument("PiecewiseExpSpec: knots must be strictly increasing");
    }
  }
  if (rates_.size() != knots_.size()) {
    throw std::invalid_argument("PiecewiseExpSpec: need one rate per interval");
  }
  for (double r : rates_) {
    if (!(r >= 0.0)) {
      throw std::invalid_argument("PiecewiseExpSpec: rates must be >= 0");
    }
  }
}

double PiecewiseExpSpec::cum_hazard(double t) const {
  if (t < 0.0) throw std::invalid_argument("cum_hazard: t must be >= 0");
  double h = 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    double lo = knots_[j];
    if (t <= lo) break;
    double hi = (j + 1 < knots_.size()) ? knots_[j + 1] : t;
    h += rates_[j] * (std::min(t, hi) - lo);
  }
  return h;
}

double PiecewiseExpSpec::survival(double t) const {
  return std::exp(-cum_hazard(t));
}

double PiecewiseExpSpec::rmst(double t_star) const {
  if (!(t_star > 0.0)) return 0.0;
  double area = 0.0;
  double s = 1.0;  // S at the start of the current interval
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    double lo = knots_[j];
    if (t_star <= lo) break;
    double hi = (j + 1 < knots_.size()) ? std::min(knots_[j + 1], t_star) : t_star;
    double lam = rates_[j];
    double len = hi - lo;
    area += lam > 0.0 ? s * -std::expm1(-lam * len) / lam : s * len;
    s *= std::exp(-lam * len);
  }
  return area;
}

double PiecewiseExpSpec::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("pwexp quantile: u must lie in (0,1)");
  }
  double target = -std::log1p(-u);  // cumulative hazard at the quantile
  double h = 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    double lo = knots_[j];
    double lam = rates_[j];
    bool last = j + 1 == knots_.size();
    if (target <= h) return lo;
    double len = last ? 0.0 : knots_[j + 1] - lo;
    double h_next = last ? target : h + lam * len;
    if (last || h_next >= target) {
      // a zero-hazard tail never reaches the target
      if (!(lam > 0.0)) return std::numeric_limits<double>::infinity();
      return lo + (target - h) / lam;
    }
    h = h_next;
  }
  return std::numeric_limits<double>::infinity();  // unreachable
}

}  // namespace nphkit
