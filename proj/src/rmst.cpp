#include "nphkit/rmst.hpp"

#include <cmath>
#include <stdexcept>

#include "nphkit/km.hpp"
#include "nphkit/special.hpp"

namespace nphkit {

RMSTEstimate rmst_estimate(const SurvivalDataset& arm_data, double t_star) {
  if (!(t_star > 0.0)) {
    throw std::invalid_argument("rmst_estimate: t_star must be > 0");
  }
  if (arm_data.empty()) {
    throw std::invalid_argument("rmst_estimate: empty arm");
  }
  EventTable table = build_event_table_pooled(arm_data);
  KMCurve curve = km_from_event_table(table, static_cast<long>(arm_data.size()));

  RMSTEstimate est;
  est.mu = curve.area(t_star);
  // Greenwood-type plug-in: sum of A(t_s)^2 dN / (Y (Y - dN)) over event
  // times up to t_star, A(t_s) the remaining area to t_star.
  for (const auto& row : table.rows) {
    if (row.time > t_star) break;
    if (row.events == row.at_risk) continue;  // curve hits 0, no variance term
    double a = est.mu - curve.area(row.time);
    double y = static_cast<double>(row.at_risk);
    double dn = static_cast<double>(row.events);
    est.var += a * a * dn / (y * (y - dn));
  }
  return est;
}

double select_t_star(const SurvivalDataset& data) {
  double max0 = -1.0, max1 = -1.0;
  for (const auto& r : data.records()) {
    if (!r.event) continue;
    if (r.arm == 1) {
      max1 = std::max(max1, r.time);
    } else {
      max0 = std::max(max0, r.time);
    }
  }
  if (max0 < 0.0 || max1 < 0.0) {
    throw std::invalid_argument("select_t_star: each arm needs at least one event");
  }
  return std::min(max0, max1);
}

RMSTResult rmst_difference_test(const SurvivalDataset& data) {
  if (!data.has_two_arms()) {
    throw std::invalid_argument("rmst_difference_test: two arms required");
  }
  RMSTResult res;
  res.t_star = select_t_star(data);
  RMSTEstimate e0 = rmst_estimate(data.arm_subset(0), res.t_star);
  RMSTEstimate e1 = rmst_estimate(data.arm_subset(1), res.t_star);
  res.mu0 = e0.mu;
  res.mu1 = e1.mu;
  res.delta = e1.mu - e0.mu;
  res.se_delta = std::sqrt(e0.var + e1.var);
  if (!(res.se_delta > 0.0)) {
    throw std::runtime_error("rmst_difference_test: degenerate variance");
  }
  res.Z = res.delta / res.se_delta;
  res.p_two_sided = 2.0 * special::norm_sf(std::fabs(res.Z));
  return res;
}

}  // namespace nphkit
