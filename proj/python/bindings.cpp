#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nphkit/aft.hpp"
#include "nphkit/cox.hpp"
#include "nphkit/data.hpp"
#include "nphkit/km.hpp"
#include "nphkit/logrank.hpp"
#include "nphkit/metrics.hpp"
#include "nphkit/pwexp.hpp"
#include "nphkit/rmst.hpp"
#include "nphkit/sim.hpp"

namespace py = pybind11;
using namespace nphkit;

namespace {

SurvivalDataset dataset_from_rows(
    const std::vector<std::tuple<double, bool, int>>& rows) {
  std::vector<Record> recs;
  recs.reserve(rows.size());
  for (const auto& [t, e, a] : rows) recs.push_back({t, e, a});
  return SurvivalDataset(std::move(recs));
}

}  // namespace

PYBIND11_MODULE(_nphkit, m) {
  m.doc() = "time-to-event tests, parametric models, and trial simulation";

  py::class_<SurvivalDataset>(m, "Dataset")
      .def(py::init(&dataset_from_rows), py::arg("rows"),
           "rows: iterable of (time, event, arm)")
      .def("__len__", &SurvivalDataset::size)
      .def("n_events", &SurvivalDataset::n_events)
      .def("rows", [](const SurvivalDataset& d) {
        std::vector<std::tuple<double, bool, int>> out;
        out.reserve(d.size());
        for (const auto& r : d.records()) out.emplace_back(r.time, r.event, r.arm);
        return out;
      });
  m.def("read_ipd_csv", &read_ipd_csv, py::arg("path"));
  m.def("write_ipd_csv", &write_ipd_csv, py::arg("data"), py::arg("path"));

  py::class_<KMCurve>(m, "KMCurve")
      .def("survival", &KMCurve::survival)
      .def("survival_before", &KMCurve::survival_before)
      .def("area", &KMCurve::area)
      .def("median", &KMCurve::median)
      .def("steps", [](const KMCurve& c) {
        std::vector<std::tuple<double, double, long>> out;
        for (const auto& s : c.steps())
          out.emplace_back(s.time, s.survival, s.at_risk);
        return out;
      });
  m.def("km_estimate", &km_estimate, py::arg("data"));

  m.def(
      "weighted_logrank",
      [](const SurvivalDataset& d, double rho, double gamma) {
        auto r = weighted_logrank(d, FHWeight{rho, gamma});
        return py::dict(py::arg("U") = r.U, py::arg("se") = r.se,
                        py::arg("Z") = r.Z, py::arg("p") = r.p_two_sided);
      },
      py::arg("data"), py::arg("rho") = 0.0, py::arg("gamma") = 0.0);

  m.def(
      "maxcombo",
      [](const SurvivalDataset& d, bool identity_cov) {
        auto r = maxcombo(d, identity_cov ? ComboCovariance::kIdentity
                                          : ComboCovariance::kEstimated);
        return py::dict(py::arg("component_Z") = r.component_Z,
                        py::arg("Z_max") = r.Z_max,
                        py::arg("p") = r.p_two_sided);
      },
      py::arg("data"), py::arg("identity_cov") = false);

  m.def("rmst_difference_test", [](const SurvivalDataset& d) {
    auto r = rmst_difference_test(d);
    return py::dict(py::arg("t_star") = r.t_star, py::arg("mu0") = r.mu0,
                    py::arg("mu1") = r.mu1, py::arg("delta") = r.delta,
                    py::arg("se") = r.se_delta, py::arg("Z") = r.Z,
                    py::arg("p") = r.p_two_sided);
  });

  py::class_<CoxFit>(m, "CoxFit")
      .def_readonly("beta", &CoxFit::beta)
      .def_readonly("var_beta", &CoxFit::var_beta)
      .def_readonly("loglik", &CoxFit::loglik)
      .def_readonly("converged", &CoxFit::converged);
  m.def("cox_fit",
        [](const SurvivalDataset& d) { return cox_fit(d); });
  m.def("grambsch_therneau_test", [](const CoxFit& fit, const SurvivalDataset& d) {
    auto r = grambsch_therneau_test(fit, d);
    return py::dict(py::arg("statistic") = r.statistic, py::arg("df") = r.df,
                    py::arg("p") = r.p);
  });
  m.def("schoenfeld_global_test", [](const CoxFit& fit, const SurvivalDataset& d) {
    auto r = schoenfeld_global_test(fit, d);
    return py::dict(py::arg("statistic") = r.statistic, py::arg("df") = r.df,
                    py::arg("p") = r.p);
  });

  py::class_<AFTFit>(m, "AFTFit")
      .def_readonly("beta0", &AFTFit::beta0)
      .def_readonly("beta1", &AFTFit::beta1)
      .def_readonly("sigma", &AFTFit::sigma)
      .def_readonly("tau", &AFTFit::tau)
      .def_readonly("q", &AFTFit::q)
      .def_readonly("p", &AFTFit::p)
      .def_readonly("loglik", &AFTFit::loglik)
      .def_readonly("converged", &AFTFit::converged)
      .def_readonly("var_beta1", &AFTFit::var_beta1)
      .def_readonly("wald_W", &AFTFit::wald_W)
      .def_readonly("wald_p", &AFTFit::wald_p);
  m.def(
      "aft_fit",
      [](const SurvivalDataset& d, const std::string& family) {
        AFTFamily f;
        if (family == "gg") {
          f = AFTFamily::kGeneralizedGamma;
        } else if (family == "gf") {
          f = AFTFamily::kGeneralizedF;
        } else {
          throw std::invalid_argument("family must be 'gg' or 'gf'");
        }
        return aft_fit(d, f);
      },
      py::arg("data"), py::arg("family"));

  py::class_<PiecewiseExpSpec>(m, "PiecewiseExp")
      .def(py::init<std::vector<double>, std::vector<double>>(),
           py::arg("knots"), py::arg("rates"))
      .def("survival", &PiecewiseExpSpec::survival)
      .def("cum_hazard", &PiecewiseExpSpec::cum_hazard)
      .def("rmst", &PiecewiseExpSpec::rmst)
      .def("quantile", &PiecewiseExpSpec::quantile)
      .def("median", &PiecewiseExpSpec::median);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("n0", &Scenario::n0)
      .def_readonly("n1", &Scenario::n1)
      .def_readonly("followup", &Scenario::followup)
      .def_readonly("random_censor_rate", &Scenario::random_censor_rate)
      .def_readonly("censor_window", &Scenario::censor_window)
      .def_readonly("alpha", &Scenario::alpha)
      .def_property_readonly("arm0", [](const Scenario& s) { return s.arm0; })
      .def_property_readonly("arm1", [](const Scenario& s) { return s.arm1; });
  m.def("builtin_scenarios", [] {
    std::vector<std::string> names;
    for (const auto& s : builtin_scenarios()) names.push_back(s.name);
    return names;
  });
  m.def("scenario_by_name", &scenario_by_name, py::arg("name"));
  m.def("simulate_trial", &simulate_trial, py::arg("scenario"), py::arg("seed"));

  m.def(
      "simulate_power",
      [](const std::string& scenario, long reps, std::uint64_t seed,
         const std::vector<std::string>& methods, int workers) {
        ReplicationPlan plan;
        plan.scenario = scenario_by_name(scenario);
        plan.n_reps = reps;
        plan.base_seed = seed;
        plan.workers = workers;
        if (methods.empty()) {
          plan.methods = {Method::kLogrank, Method::kMaxCombo,
                          Method::kRMSTDiff};
        } else {
          for (const auto& name : methods)
            plan.methods.push_back(method_from_name(name));
        }
        auto results = run_plan(plan);
        py::dict out;
        for (Method mth : plan.methods) {
          auto s = power_summary(results, mth, plan.scenario.alpha);
          out[method_name(mth)] =
              py::dict(py::arg("rejection") = s.rejection, py::arg("se") = s.se,
                       py::arg("n_success") = s.n_success,
                       py::arg("n_fail") = s.n_fail);
        }
        return out;
      },
      py::arg("scenario"), py::arg("reps"), py::arg("seed") = 1,
      py::arg("methods") = std::vector<std::string>{}, py::arg("workers") = 0);
}
