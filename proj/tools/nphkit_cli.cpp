#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "nphkit/aft.hpp"
#include "nphkit/cox.hpp"
#include "nphkit/data.hpp"
#include "nphkit/km.hpp"
#include "nphkit/logrank.hpp"
#include "nphkit/metrics.hpp"
#include "nphkit/rmst.hpp"
#include "nphkit/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitComputation = 3;

using nlohmann::json;

nphkit::PiecewiseExpSpec spec_from_json(const json& j) {
  return nphkit::PiecewiseExpSpec(j.at("knots").get<std::vector<double>>(),
                                  j.at("rates").get<std::vector<double>>());
}

nphkit::Scenario scenario_from_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario config: " + path);
  json j = json::parse(in);
  nphkit::Scenario s{j.at("name").get<std::string>(),
                     spec_from_json(j.at("arm0")),
                     spec_from_json(j.at("arm1")),
                     j.at("n0").get<long>(),
                     j.at("n1").get<long>(),
                     j.at("followup").get<double>(),
                     j.value("random_censor_rate", 0.0),
                     j.value("censor_window", 0.0),
                     j.value("alpha", 0.05)};
  return s;
}

json scenario_to_json(const nphkit::Scenario& s) {
  return json{{"name", s.name},
              {"arm0", {{"knots", s.arm0.knots()}, {"rates", s.arm0.rates()}}},
              {"arm1", {{"knots", s.arm1.knots()}, {"rates", s.arm1.rates()}}},
              {"n0", s.n0},
              {"n1", s.n1},
              {"followup", s.followup},
              {"random_censor_rate", s.random_censor_rate},
              {"censor_window", s.censor_window},
              {"alpha", s.alpha}};
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::endl;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output: " + path);
  out << content << std::endl;
}

int cmd_analyze(const std::string& input, const std::string& output,
                bool csv_mode) {
  nphkit::SurvivalDataset data;
  try {
    data = nphkit::read_ipd_csv(input);
    if (!data.has_two_arms()) {
      throw std::runtime_error(input + ": two arms required for analysis");
    }
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }

  json report;
  report["input"] = input;
  report["n"] = data.size();
  report["n_events"] = data.n_events();
  int failures = 0;

  json tests = json::object();
  auto record_test = [&](const char* name, auto&& fn) {
    try {
      tests[name] = fn();
    } catch (const std::exception& e) {
      tests[name] = {{"error", e.what()}};
      ++failures;
    }
  };
  record_test("logrank", [&] {
    auto r = nphkit::weighted_logrank(data, nphkit::FHWeight{0.0, 0.0});
    return json{{"U", r.U}, {"se", r.se}, {"Z", r.Z}, {"p", r.p_two_sided}};
  });
  record_test("maxcombo", [&] {
    auto r = nphkit::maxcombo(data);
    return json{{"component_Z", r.component_Z},
                {"Z_max", r.Z_max},
                {"p", r.p_two_sided}};
  });
  record_test("rmst_diff", [&] {
    auto r = nphkit::rmst_difference_test(data);
    return json{{"t_star", r.t_star}, {"mu0", r.mu0},   {"mu1", r.mu1},
                {"delta", r.delta},   {"se", r.se_delta}, {"Z", r.Z},
                {"p", r.p_two_sided}};
  });

  json models = json::object();
  nphkit::CoxFit cox;
  bool have_cox = false;
  try {
    cox = nphkit::cox_fit(data);
    have_cox = cox.converged;
    models["cox"] = {{"beta", cox.beta},
                     {"se", std::sqrt(cox.var_beta)},
                     {"hr", std::exp(cox.beta)},
                     {"loglik", cox.loglik},
                     {"converged", cox.converged}};
    if (!cox.converged) ++failures;
  } catch (const std::exception& e) {
    models["cox"] = {{"error", e.what()}};
    ++failures;
  }
  if (have_cox) {
    record_test("grambsch_therneau", [&] {
      auto r = nphkit::grambsch_therneau_test(cox, data);
      return json{{"statistic", r.statistic}, {"df", r.df}, {"p", r.p}};
    });
    record_test("schoenfeld_global", [&] {
      auto r = nphkit::schoenfeld_global_test(cox, data);
      return json{{"statistic", r.statistic}, {"df", r.df}, {"p", r.p}};
    });
  }
  for (auto family : {nphkit::AFTFamily::kGeneralizedGamma,
                      nphkit::AFTFamily::kGeneralizedF}) {
    const char* name =
        family == nphkit::AFTFamily::kGeneralizedGamma ? "gg" : "gf";
    try {
      auto fit = nphkit::aft_fit(data, family);
      json jm = {{"beta0", fit.beta0},
                 {"beta1", fit.beta1},
                 {"af", std::exp(-fit.beta1)},
                 {"sigma", fit.sigma},
                 {"loglik", fit.loglik},
                 {"converged", fit.converged},
                 {"wald_W", fit.wald_W},
                 {"wald_p", fit.wald_p}};
      if (family == nphkit::AFTFamily::kGeneralizedGamma) {
        jm["tau"] = fit.tau;
      } else {
        jm["q"] = fit.q;
        jm["p_shape"] = fit.p;
      }
      if (fit.hessian_pd && fit.var_beta1 > 0.0) {
        jm["se_beta1"] = std::sqrt(fit.var_beta1);
      }
      models[name] = jm;
      if (!fit.converged) ++failures;
      tests[std::string(name) + "_wald"] = {{"W", fit.wald_W},
                                            {"p", fit.wald_p}};
    } catch (const std::exception& e) {
      models[name] = {{"error", e.what()}};
      ++failures;
    }
  }
  report["tests"] = tests;
  report["models"] = models;

  try {
    if (csv_mode) {
      std::ostringstream csv;
      csv.precision(10);
      csv << "section,name,field,value\n";
      for (auto& [name, obj] : tests.items()) {
        for (auto& [k, v] : obj.items()) {
          csv << "test," << name << ',' << k << ',' << v.dump() << '\n';
        }
      }
      for (auto& [name, obj] : models.items()) {
        for (auto& [k, v] : obj.items()) {
          csv << "model," << name << ',' << k << ',' << v.dump() << '\n';
        }
      }
      write_output(output, csv.str());
    } else {
      write_output(output, report.dump(2));
    }
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitInput;
  }
  return failures > 0 ? kExitComputation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nphkit: time-to-event testing and simulation under non-proportional hazards"};
  app.require_subcommand(1);

  // analyze
  std::string an_input, an_output;
  bool an_csv = false;
  auto* analyze = app.add_subcommand("analyze", "Run the full test battery on an IPD CSV");
  analyze->add_option("input", an_input, "IPD CSV with header time,event,arm")->required();
  analyze->add_option("-o,--output", an_output, "output path (default stdout)");
  analyze->add_flag("--csv", an_csv, "emit tidy CSV instead of JSON");

  // simulate
  std::string sim_scenario, sim_config, sim_output;
  long sim_reps = 2000;
  std::uint64_t sim_seed = 1;
  double sim_alpha = -1.0;
  std::vector<std::string> sim_methods;
  bool sim_csv = false, sim_bias = false, sim_identity = false;
  int sim_workers = 0;
  auto* simulate = app.add_subcommand("simulate", "Simulate a scenario and summarize power");
  simulate->add_option("--scenario", sim_scenario, "builtin scenario name");
  simulate->add_option("--config", sim_config, "scenario config JSON path");
  simulate->add_option("--reps", sim_reps, "number of replications")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "base seed");
  simulate->add_option("--alpha", sim_alpha, "significance level override");
  simulate->add_option("--methods", sim_methods,
                       "subset of logrank,maxcombo,rmst_diff,gg,gf")->delimiter(',');
  simulate->add_option("-o,--output", sim_output, "report output path");
  simulate->add_flag("--csv", sim_csv, "write tidy CSV instead of JSON");
  simulate->add_flag("--bias", sim_bias, "collect Cox/GG/GF bias grids");
  simulate->add_flag("--identity-cov", sim_identity,
                     "identity covariance for the MaxCombo null");
  simulate->add_option("--workers", sim_workers, "worker threads (0 = auto)");

  // scenarios
  auto* scen = app.add_subcommand("scenarios", "Print the builtin scenario parameterizations");

  // report
  std::string rep_input, rep_output;
  auto* report_cmd = app.add_subcommand("report", "Convert a report JSON to tidy CSV");
  report_cmd->add_option("input", rep_input, "report JSON path")->required();
  report_cmd->add_option("-o,--output", rep_output, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      return cmd_analyze(an_input, an_output, an_csv);
    }
    if (*simulate) {
      nphkit::ReplicationPlan plan;
      try {
        if (!sim_config.empty()) {
          plan.scenario = scenario_from_config(sim_config);
        } else if (!sim_scenario.empty()) {
          plan.scenario = nphkit::scenario_by_name(sim_scenario);
        } else {
          std::cerr << "input error: --scenario or --config is required\n";
          return kExitInput;
        }
      } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
      }
      if (sim_alpha > 0.0) {
        if (sim_alpha > 0.5) {
          std::cerr << "input error: alpha must lie in (0, 0.5]\n";
          return kExitInput;
        }
        plan.scenario.alpha = sim_alpha;
      }
      plan.n_reps = sim_reps;
      plan.base_seed = sim_seed;
      plan.collect_bias = sim_bias;
      plan.maxcombo_cov = sim_identity ? nphkit::ComboCovariance::kIdentity
                                       : nphkit::ComboCovariance::kEstimated;
      if (sim_methods.empty()) {
        plan.methods = {nphkit::Method::kLogrank, nphkit::Method::kMaxCombo,
                        nphkit::Method::kRMSTDiff, nphkit::Method::kGG,
                        nphkit::Method::kGF};
      } else {
        for (const auto& m : sim_methods) {
          try {
            plan.methods.push_back(nphkit::method_from_name(m));
          } catch (const std::exception& e) {
            std::cerr << "input error: " << e.what() << "\n";
            return kExitInput;
          }
        }
      }
      plan.workers = sim_workers;
      if (const char* env = std::getenv("NPHKIT_WORKERS")) {
        plan.workers = std::atoi(env);
      }
      auto results = nphkit::run_plan(plan);
      auto report = nphkit::summarize(plan, results);
      std::cout << "scenario " << report.scenario << "  reps=" << report.n_reps
                << "  seed=" << report.base_seed << "  alpha=" << report.alpha
                << "\n";
      for (const auto& row : report.power) {
        std::printf("  %-10s rejection=%.4f  se=%.4f  failures=%ld\n",
                    nphkit::method_name(row.method), row.summary.rejection,
                    row.summary.se, row.summary.n_fail);
      }
      write_output(sim_output, sim_csv ? report.to_csv() : report.to_json());
      return kExitOk;
    }
    if (*scen) {
      json j = json::array();
      for (const auto& s : nphkit::builtin_scenarios()) {
        j.push_back(scenario_to_json(s));
      }
      std::cout << j.dump(2) << std::endl;
      return kExitOk;
    }
    if (*report_cmd) {
      std::ifstream in(rep_input);
      if (!in) {
        std::cerr << "input error: cannot open " << rep_input << "\n";
        return kExitInput;
      }
      json j;
      try {
        j = json::parse(in);
      } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
      }
      std::ostringstream csv;
      csv.precision(10);
      csv << "scenario,source,metric,grid_time,value\n";
      std::string scenario = j.value("scenario", "");
      const json power = j.value("power", json::object());
      for (const auto& [name, obj] : power.items()) {
        csv << scenario << ',' << name << ",rejection,,"
            << obj.value("rejection", 0.0) << '\n';
        csv << scenario << ',' << name << ",rejection_se,,"
            << obj.value("se", 0.0) << '\n';
        csv << scenario << ',' << name << ",n_fail,,"
            << obj.value("n_fail", 0L) << '\n';
      }
      auto grid = j.value("grid_times", std::vector<double>{});
      const json bias = j.value("bias", json::object());
      for (const auto& [model, obj] : bias.items()) {
        for (const char* metric : {"rmst_diff", "surv_diff"}) {
          if (!obj.contains(metric)) continue;
          auto mb = obj[metric]["median_bias"].get<std::vector<double>>();
          for (std::size_t i = 0; i < mb.size() && i < grid.size(); ++i) {
            csv << scenario << ',' << model << ',' << metric
                << "_median_bias," << grid[i] << ',' << mb[i] << '\n';
          }
        }
        if (obj.contains("median_survival")) {
          csv << scenario << ',' << model << ",median_survival_bias0,,"
              << obj["median_survival"].value("bias0", 0.0) << '\n';
          csv << scenario << ',' << model << ",median_survival_bias1,,"
              << obj["median_survival"].value("bias1", 0.0) << '\n';
        }
      }
      write_output(rep_output, csv.str());
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitOk;
}
