#include "nphkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace nphkit {

TrueTheta true_theta(const Scenario& scenario, double t) {
  TrueTheta th;
  th.rmst_diff = scenario.arm1.rmst(t) - scenario.arm0.rmst(t);
  th.surv_diff = scenario.arm1.survival(t) - scenario.arm0.survival(t);
  th.median0 = scenario.arm0.median();
  th.median1 = scenario.arm1.median();
  return th;
}

PowerSummary power_summary(const std::vector<RepResult>& results, Method m,
                           double alpha) {
  PowerSummary s;
  long rejected = 0;
  for (const auto& rep : results) {
    const MethodOutcome& o = rep.outcome(m);
    if (!o.run) continue;
    if (!o.ok) {
      ++s.n_fail;
      continue;
    }
    ++s.n_success;
    if (o.p < alpha) ++rejected;
  }
  if (s.n_success > 0) {
    s.rejection = static_cast<double>(rejected) / static_cast<double>(s.n_success);
    s.se = std::sqrt(s.rejection * (1.0 - s.rejection) /
                     static_cast<double>(s.n_success));
  }
  return s;
}

namespace {

double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const ModelBias& pick_bias(const RepResult& rep, const std::string& model) {
  if (model == "cox") return rep.cox_bias;
  if (model == "gg") return rep.gg_bias;
  return rep.gf_bias;
}

std::optional<BiasCurve> curve_for(const std::vector<RepResult>& results,
                                   const std::string& model, bool rmst_kind,
                                   const std::vector<double>& truth) {
  BiasCurve out;
  out.median_bias.assign(truth.size(), 0.0);
  out.mean_bias.assign(truth.size(), 0.0);
  std::vector<std::vector<double>> per_point(truth.size());
  for (const auto& rep : results) {
    const ModelBias& mb = pick_bias(rep, model);
    if (!mb.ok) continue;
    const auto& est = rmst_kind ? mb.rmst_diff : mb.surv_diff;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      per_point[i].push_back(est[i] - truth[i]);
    }
  }
  if (per_point.empty() || per_point[0].empty()) return std::nullopt;
  out.n_used = static_cast<long>(per_point[0].size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    double sum = 0.0;
    for (double v : per_point[i]) sum += v;
    out.mean_bias[i] = sum / static_cast<double>(per_point[i].size());
    out.median_bias[i] = median_of(per_point[i]);
  }
  return out;
}

std::optional<MedianSurvivalBias> mst_bias_for(
    const std::vector<RepResult>& results, const std::string& model,
    double true0, double true1) {
  std::vector<double> b0, b1;
  long nr0 = 0, nr1 = 0;
  bool any = false;
  for (const auto& rep : results) {
    const ModelBias& mb = pick_bias(rep, model);
    if (!mb.ok) continue;
    any = true;
    if (std::isnan(mb.median0)) {
      ++nr0;
    } else {
      b0.push_back(mb.median0 - true0);
    }
    if (std::isnan(mb.median1)) {
      ++nr1;
    } else {
      b1.push_back(mb.median1 - true1);
    }
  }
  if (!any) return std::nullopt;
  MedianSurvivalBias out;
  out.n_used0 = static_cast<long>(b0.size());
  out.n_used1 = static_cast<long>(b1.size());
  out.n_not_reached0 = nr0;
  out.n_not_reached1 = nr1;
  if (!b0.empty()) out.bias0 = median_of(b0);
  if (!b1.empty()) out.bias1 = median_of(b1);
  return out;
}

}  // namespace

ScenarioReport summarize(const ReplicationPlan& plan,
                         const std::vector<RepResult>& results) {
  ScenarioReport rep;
  rep.scenario = plan.scenario.name;
  rep.n_reps = plan.n_reps;
  rep.base_seed = plan.base_seed;
  rep.alpha = plan.scenario.alpha;
  for (Method m : plan.methods) {
    rep.power.push_back({m, power_summary(results, m, plan.scenario.alpha)});
  }
  if (plan.collect_bias) {
    rep.grid_times = bias_grid(plan.scenario.followup);
    std::vector<double> rmst_truth(rep.grid_times.size());
    std::vector<double> surv_truth(rep.grid_times.size());
    for (std::size_t i = 0; i < rep.grid_times.size(); ++i) {
      TrueTheta th = true_theta(plan.scenario, rep.grid_times[i]);
      rmst_truth[i] = th.rmst_diff;
      surv_truth[i] = th.surv_diff;
    }
    double med0 = plan.scenario.arm0.median();
    double med1 = plan.scenario.arm1.median();
    for (const std::string model : {"cox", "gg", "gf"}) {
      ModelBiasReport mbr;
      mbr.model = model;
      mbr.rmst_diff = curve_for(results, model, true, rmst_truth);
      mbr.surv_diff = curve_for(results, model, false, surv_truth);
      mbr.median_survival = mst_bias_for(results, model, med0, med1);
      rep.bias.push_back(std::move(mbr));
    }
  }
  return rep;
}

std::string ScenarioReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["n_reps"] = n_reps;
  j["base_seed"] = base_seed;
  j["alpha"] = alpha;
  nlohmann::json jp = nlohmann::json::object();
  for (const auto& row : power) {
    jp[method_name(row.method)] = {{"rejection", row.summary.rejection},
                                   {"se", row.summary.se},
                                   {"n_success", row.summary.n_success},
                                   {"n_fail", row.summary.n_fail}};
  }
  j["power"] = jp;
  if (!grid_times.empty()) {
    j["grid_times"] = grid_times;
    nlohmann::json jb = nlohmann::json::object();
    for (const auto& mb : bias) {
      nlohmann::json jm = nlohmann::json::object();
      auto put_curve = [&jm](const char* key,
                             const std::optional<BiasCurve>& c) {
        if (!c) return;
        jm[key] = {{"median_bias", c->median_bias},
                   {"mean_bias", c->mean_bias},
                   {"n_used", c->n_used}};
      };
      put_curve("rmst_diff", mb.rmst_diff);
      put_curve("surv_diff", mb.surv_diff);
      if (mb.median_survival) {
        const auto& ms = *mb.median_survival;
        jm["median_survival"] = {{"bias0", ms.bias0},
                                 {"bias1", ms.bias1},
                                 {"n_used0", ms.n_used0},
                                 {"n_used1", ms.n_used1},
                                 {"n_not_reached0", ms.n_not_reached0},
                                 {"n_not_reached1", ms.n_not_reached1}};
      }
      if (!jm.empty()) jb[mb.model] = jm;
    }
    j["bias"] = jb;
  }
  return j.dump(2);
}

std::string ScenarioReport::to_csv() const {
  // tidy layout: scenario,method_or_model,metric,grid_time,value
  std::ostringstream out;
  out.precision(10);
  out << "scenario,source,metric,grid_time,value\n";
  for (const auto& row : power) {
    out << scenario << ',' << method_name(row.method) << ",rejection,,"
        << row.summary.rejection << '\n';
    out << scenario << ',' << method_name(row.method) << ",rejection_se,,"
        << row.summary.se << '\n';
    out << scenario << ',' << method_name(row.method) << ",n_fail,,"
        << row.summary.n_fail << '\n';
  }
  for (const auto& mb : bias) {
    auto put_curve = [&](const char* metric, const std::optional<BiasCurve>& c) {
      if (!c) return;
      for (std::size_t i = 0; i < grid_times.size(); ++i) {
        out << scenario << ',' << mb.model << ',' << metric << "_median_bias,"
            << grid_times[i] << ',' << c->median_bias[i] << '\n';
      }
    };
    put_curve("rmst_diff", mb.rmst_diff);
    put_curve("surv_diff", mb.surv_diff);
    if (mb.median_survival) {
      out << scenario << ',' << mb.model << ",median_survival_bias0,,"
          << mb.median_survival->bias0 << '\n';
      out << scenario << ',' << mb.model << ",median_survival_bias1,,"
          << mb.median_survival->bias1 << '\n';
    }
  }
  return out.str();
}

}  // namespace nphkit
