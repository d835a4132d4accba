#include "nphkit/logrank.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nphkit/special.hpp"

namespace nphkit {

namespace {

// Pooled KM values used for the weight at each event row: S(t-) by
// default, or S(t) when right-limit weights are requested.
std::vector<double> pooled_km_values(const EventTable& table, WeightTiming timing) {
  std::vector<double> s(table.rows.size());
  double surv = 1.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    double after = surv * (1.0 - static_cast<double>(row.events) /
                                     static_cast<double>(row.at_risk));
    s[i] = (timing == WeightTiming::kLeftLimit) ? surv : after;
    surv = after;
  }
  return s;
}

double fh_weight(double s, const FHWeight& w) {
  double v = 1.0;
  if (w.rho != 0.0) v *= std::pow(s, w.rho);
  if (w.gamma != 0.0) v *= std::pow(1.0 - s, w.gamma);
  return v;
}

struct RowCore {
  double oe = 0.0;   // dN1 - (Y1/Y) dN
  double var = 0.0;  // hypergeometric variance factor
};

RowCore row_core(const EventRow& row) {
  RowCore c;
  double y = static_cast<double>(row.at_risk);
  double y1 = static_cast<double>(row.at_risk1);
  double y0 = static_cast<double>(row.at_risk0);
  double dn = static_cast<double>(row.events);
  c.oe = static_cast<double>(row.events1) - (y1 / y) * dn;
  if (row.at_risk > 1) {
    c.var = (y1 * y0 / (y * y)) * ((y - dn) / (y - 1.0)) * dn;
  }
  return c;
}

}  // namespace

std::vector<double> fh_weight_values(const KMCurve& pooled,
                                     const std::vector<double>& event_times,
                                     const FHWeight& w, WeightTiming timing) {
  std::vector<double> out;
  out.reserve(event_times.size());
  for (double t : event_times) {
    double s = (timing == WeightTiming::kLeftLimit) ? pooled.survival_before(t)
                                                    : pooled.survival(t);
    out.push_back(fh_weight(s, w));
  }
  return out;
}

WLRResult weighted_logrank(const EventTable& table, const FHWeight& w,
                           WeightTiming timing) {
  if (table.rows.empty()) {
    throw std::invalid_argument("weighted_logrank: no event times");
  }
  std::vector<double> s = pooled_km_values(table, timing);
  double u = 0.0, v = 0.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    RowCore c = row_core(table.rows[i]);
    double wt = fh_weight(s[i], w);
    u += wt * c.oe;
    v += wt * wt * c.var;
  }
  if (!(v > 0.0)) {
    throw std::runtime_error("weighted_logrank: degenerate statistic (zero variance)");
  }
  WLRResult r;
  r.U = u;
  r.se = std::sqrt(v);
  r.Z = u / r.se;
  r.p_two_sided = 2.0 * special::norm_sf(std::fabs(r.Z));
  return r;
}

WLRResult weighted_logrank(const SurvivalDataset& data, const FHWeight& w,
                           WeightTiming timing) {
  return weighted_logrank(build_event_table(data), w, timing);
}

MaxComboResult maxcombo(const EventTable& table, ComboCovariance cov,
                        WeightTiming timing) {
  if (table.rows.empty()) {
    throw std::invalid_argument("maxcombo: no event times");
  }
  MaxComboResult res;
  res.weights = {FHWeight{1.0, 0.0}, FHWeight{0.0, 1.0}, FHWeight{1.0, 1.0}};
  std::vector<double> s = pooled_km_values(table, timing);

  double u[3] = {0, 0, 0};
  double cv[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    RowCore c = row_core(table.rows[i]);
    double wt[3];
    for (int k = 0; k < 3; ++k) wt[k] = fh_weight(s[i], res.weights[k]);
    for (int k = 0; k < 3; ++k) {
      u[k] += wt[k] * c.oe;
      for (int l = k; l < 3; ++l) cv[k][l] += wt[k] * wt[l] * c.var;
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (!(cv[k][k] > 0.0)) {
      throw std::runtime_error(
          "maxcombo: degenerate variance for component (rho,gamma)=(" +
          std::to_string(res.weights[k].rho) + "," +
          std::to_string(res.weights[k].gamma) + ")");
    }
  }
  res.Z_max = 0.0;
  for (int k = 0; k < 3; ++k) {
    res.component_Z[k] = u[k] / std::sqrt(cv[k][k]);
    res.Z_max = std::max(res.Z_max, std::fabs(res.component_Z[k]));
  }
  std::array<double, 9> corr{};
  for (int k = 0; k < 3; ++k) {
    corr[static_cast<std::size_t>(4 * k)] = 1.0;
    for (int l = k + 1; l < 3; ++l) {
      double rho = (cov == ComboCovariance::kIdentity)
                       ? 0.0
                       : cv[k][l] / std::sqrt(cv[k][k] * cv[l][l]);
      corr[static_cast<std::size_t>(3 * k + l)] = rho;
      corr[static_cast<std::size_t>(3 * l + k)] = rho;
    }
  }
  res.correlation = corr;
  res.p_two_sided =
      res.Z_max > 0.0 ? 1.0 - special::mvn3_box(corr, res.Z_max) : 1.0;
  return res;
}

MaxComboResult maxcombo(const SurvivalDataset& data, ComboCovariance cov,
                        WeightTiming timing) {
  return maxcombo(build_event_table(data), cov, timing);
}

}  // namespace nphkit
