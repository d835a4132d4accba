#include "nphkit/cox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nphkit/km.hpp"
#include "nphkit/special.hpp"

namespace nphkit {

namespace {

double breslow_loglik(const EventTable& table, double beta) {
  double eb = std::exp(beta);
  double ll = 0.0;
  for (const auto& row : table.rows) {
    double s0 = static_cast<double>(row.at_risk0) +
                static_cast<double>(row.at_risk1) * eb;
    ll += beta * static_cast<double>(row.events1) -
          static_cast<double>(row.events) * std::log(s0);
  }
  return ll;
}

void score_info(const EventTable& table, double beta, double* score,
                double* info) {
  double eb = std::exp(beta);
  double u = 0.0, i = 0.0;
  for (const auto& row : table.rows) {
    double y0 = static_cast<double>(row.at_risk0);
    double y1e = static_cast<double>(row.at_risk1) * eb;
    double s0 = y0 + y1e;
    double xbar = y1e / s0;
    double dn = static_cast<double>(row.events);
    u += static_cast<double>(row.events1) - dn * xbar;
    i += dn * xbar * (1.0 - xbar);
  }
  *score = u;
  *info = i;
}

}  // namespace

CoxFit cox_fit(const EventTable& table) {
  if (table.rows.empty()) {
    throw std::invalid_argument("cox_fit: no events");
  }
  CoxFit fit;
  double beta = 0.0;
  double ll = breslow_loglik(table, 0.0);
  const double tol = 1e-8;
  const int max_iter = 25;
  bool ok = false;
  for (int it = 0; it < max_iter; ++it) {
    double u, info;
    score_info(table, beta, &u, &info);
    fit.n_iter = it;
    if (std::fabs(u) < tol) {
      ok = info > 0.0;
      break;
    }
    if (!(info > 0.0)) break;
    double step = u / info;
    // step-halving keeps the likelihood monotone
    double next = beta + step;
    double ll_next = breslow_loglik(table, next);
    int halvings = 0;
    while (!(ll_next >= ll - 1e-12) && halvings < 30) {
      step *= 0.5;
      next = beta + step;
      ll_next = breslow_loglik(table, next);
      ++halvings;
    }
    beta = next;
    ll = ll_next;
    if (std::fabs(beta) > 15.0) break;  // monotone likelihood
  }
  double u, info;
  score_info(table, beta, &u, &info);
  fit.beta = beta;
  fit.loglik = breslow_loglik(table, beta);
  fit.converged = ok || (std::fabs(u) < tol && info > 0.0);
  fit.var_beta = info > 0.0 ? 1.0 / info : 0.0;

  double eb = std::exp(beta);
  double cum = 0.0;
  fit.baseline_times.reserve(table.rows.size());
  fit.baseline_cumhaz.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    double s0 = static_cast<double>(row.at_risk0) +
                static_cast<double>(row.at_risk1) * eb;
    cum += static_cast<double>(row.events) / s0;
    fit.baseline_times.push_back(row.time);
    fit.baseline_cumhaz.push_back(cum);
  }
  return fit;
}

CoxFit cox_fit(const SurvivalDataset& data) {
  return cox_fit(build_event_table(data));
}

SchoenfeldResiduals schoenfeld_residuals(const CoxFit& fit,
                                         const SurvivalDataset& data) {
  if (!fit.converged) {
    throw std::invalid_argument("schoenfeld_residuals: fit did not converge");
  }
  EventTable table = build_event_table(data);
  double eb = std::exp(fit.beta);
  long d = 0;
  for (const auto& row : table.rows) d += row.events;
  double scale = static_cast<double>(d) * fit.var_beta;

  SchoenfeldResiduals out;
  for (const auto& row : table.rows) {
    double y1e = static_cast<double>(row.at_risk1) * eb;
    double xbar = y1e / (static_cast<double>(row.at_risk0) + y1e);
    for (long j = 0; j < row.events0; ++j) {
      double r = 0.0 - xbar;
      out.rows.push_back({row.time, r, fit.beta + scale * r});
    }
    for (long j = 0; j < row.events1; ++j) {
      double r = 1.0 - xbar;
      out.rows.push_back({row.time, r, fit.beta + scale * r});
    }
  }
  return out;
}

namespace {

PHTestResult residual_time_test(const CoxFit& fit, const SurvivalDataset& data,
                                TimeTransform transform, PHTestKind kind) {
  EventTable table = build_event_table(data);
  long d = 0;
  for (const auto& row : table.rows) d += row.events;
  if (d < 2) {
    throw std::invalid_argument("PH test: need at least two events");
  }
  KMCurve pooled = km_from_event_table(table, 0);

  // g value and unscaled residuals per event
  std::vector<double> g, r;
  g.reserve(static_cast<std::size_t>(d));
  r.reserve(static_cast<std::size_t>(d));
  double eb = std::exp(fit.beta);
  long rank = 0;
  for (const auto& row : table.rows) {
    double gv;
    switch (transform) {
      case TimeTransform::kIdentity: gv = row.time; break;
      case TimeTransform::kKM: gv = 1.0 - pooled.survival_before(row.time); break;
      case TimeTransform::kRank: gv = static_cast<double>(rank); break;
      case TimeTransform::kLog: gv = std::log(row.time); break;
      default: gv = row.time; break;
    }
    rank += row.events;
    double y1e = static_cast<double>(row.at_risk1) * eb;
    double xbar = y1e / (static_cast<double>(row.at_risk0) + y1e);
    for (long j = 0; j < row.events0; ++j) {
      g.push_back(gv);
      r.push_back(-xbar);
    }
    for (long j = 0; j < row.events1; ++j) {
      g.push_back(gv);
      r.push_back(1.0 - xbar);
    }
  }
  double gbar = 0.0;
  for (double v : g) gbar += v;
  gbar /= static_cast<double>(d);
  double num = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num += (g[i] - gbar) * r[i];
    ss += (g[i] - gbar) * (g[i] - gbar);
  }
  if (!(ss > 0.0)) {
    throw std::runtime_error("PH test: time transform is constant (all events tied)");
  }
  double ibar = 1.0 / (fit.var_beta * static_cast<double>(d));  // I / d
  PHTestResult res;
  res.kind = kind;
  res.df = 1;
  res.statistic = num * num / (ss * ibar);
  res.p = special::chisq_sf(res.statistic, 1.0);
  return res;
}

}  // namespace

PHTestResult grambsch_therneau_test(const CoxFit& fit,
                                    const SurvivalDataset& data,
                                    TimeTransform transform) {
  return residual_time_test(fit, data, transform, PHTestKind::kGrambschTherneau);
}

PHTestResult schoenfeld_global_test(const CoxFit& fit,
                                    const SurvivalDataset& data) {
  return residual_time_test(fit, data, TimeTransform::kIdentity,
                            PHTestKind::kSchoenfeldGlobal);
}

CoxSurvival::CoxSurvival(const CoxFit& fit, int arm) {
  double mult = std::exp(fit.beta * arm);
  times_ = fit.baseline_times;
  surv_.reserve(times_.size());
  for (double ch : fit.baseline_cumhaz) {
    surv_.push_back(std::exp(-ch * mult));
  }
}

double CoxSurvival::survival(double t) const {
  double s = 1.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] > t) break;
    s = surv_[i];
  }
  return s;
}

double CoxSurvival::rmst(double t_star) const {
  if (t_star <= 0.0) return 0.0;
  double a = 0.0, prev_t = 0.0, prev_s = 1.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] >= t_star) break;
    a += prev_s * (times_[i] - prev_t);
    prev_t = times_[i];
    prev_s = surv_[i];
  }
  a += prev_s * (t_star - prev_t);
  return a;
}

double CoxSurvival::median() const {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (surv_[i] <= 0.5) return times_[i];
  }
  return -1.0;
}

}  // namespace nphkit
