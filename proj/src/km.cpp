#include "nphkit/km.hpp"

#include <algorithm>
#include <stdexcept>

namespace nphkit {

double KMCurve::survival(double t) const {
  double s = 1.0;
  for (const auto& st : steps_) {
    if (st.time > t) break;
    s = st.survival;
  }
  return s;
}

double KMCurve::survival_before(double t) const {
  double s = 1.0;
  for (const auto& st : steps_) {
    if (st.time >= t) break;
    s = st.survival;
  }
  return s;
}

double KMCurve::area(double t_star) const {
  if (t_star <= 0.0) return 0.0;
  double a = 0.0;
  double prev_t = 0.0;
  double prev_s = 1.0;
  for (const auto& st : steps_) {
    if (st.time >= t_star) break;
    a += prev_s * (st.time - prev_t);
    prev_t = st.time;
    prev_s = st.survival;
  }
  a += prev_s * (t_star - prev_t);
  return a;
}

double KMCurve::median() const {
  for (const auto& st : steps_) {
    if (st.survival <= 0.5) return st.time;
  }
  return -1.0;
}

KMCurve km_from_event_table(const EventTable& table, long n_total) {
  std::vector<KMCurve::Step> steps;
  steps.reserve(table.rows.size());
  double s = 1.0;
  (void)n_total;
  for (const auto& row : table.rows) {
    s *= 1.0 - static_cast<double>(row.events) / static_cast<double>(row.at_risk);
    steps.push_back({row.time, s, row.at_risk});
  }
  return KMCurve(std::move(steps));
}

KMCurve km_estimate(const SurvivalDataset& data) {
  if (data.empty()) throw std::invalid_argument("km_estimate: empty dataset");
  EventTable table = build_event_table_pooled(data);
  return km_from_event_table(table, static_cast<long>(data.size()));
}

}  // namespace nphkit
