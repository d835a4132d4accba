#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nphkit/cox.hpp"
#include "nphkit/km.hpp"
#include "nphkit/sim.hpp"

using nphkit::Record;
using nphkit::SurvivalDataset;

namespace {

SurvivalDataset make(std::initializer_list<Record> rs) {
  return SurvivalDataset(std::vector<Record>(rs));
}

// fixed 10-subject dataset with no ties, used for frozen oracle values
SurvivalDataset oracle_data() {
  return make({{1, true, 0}, {4, true, 0}, {6, false, 0}, {8, true, 0},
               {10, false, 0}, {2, true, 1}, {5, false, 1}, {7, true, 1},
               {9, true, 1}, {12, false, 1}});
}

}  // namespace

TEST_CASE("cox fit: frozen Newton solution of the partial likelihood") {
  // oracle: independent Newton on the explicit risk-set sums:
  // beta = -0.219193688982, var = 0.677793385202, ll = -10.638216121452
  auto fit = nphkit::cox_fit(oracle_data());
  CHECK(fit.converged);
  CHECK(fit.beta == doctest::Approx(-0.219193688982).epsilon(1e-7));
  CHECK(fit.var_beta == doctest::Approx(0.677793385202).epsilon(1e-7));
  CHECK(fit.loglik == doctest::Approx(-10.638216121452).epsilon(1e-9));
}

TEST_CASE("cox fit: arm swap negates beta") {
  auto a = nphkit::cox_fit(oracle_data());
  auto b = nphkit::cox_fit(oracle_data().swap_arms());
  CHECK(b.beta == doctest::Approx(-a.beta).epsilon(1e-9));
  CHECK(b.var_beta == doctest::Approx(a.var_beta).epsilon(1e-9));
}

TEST_CASE("cox fit: null data gives beta near zero") {
  auto data = nphkit::simulate_trial(nphkit::scenario_by_name("null"), 3);
  auto fit = nphkit::cox_fit(data);
  CHECK(fit.converged);
  CHECK(std::fabs(fit.beta) < 0.5);
}

TEST_CASE("cox fit: monotone likelihood is flagged, not returned as truth") {
  // every arm1 event precedes every arm0 time -> beta diverges
  auto data = make({{1, true, 1}, {2, true, 1}, {3, true, 1},
                    {10, true, 0}, {11, true, 0}, {12, true, 0}});
  auto fit = nphkit::cox_fit(data);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("schoenfeld residuals: frozen risk-set means, one row per event") {
  // residuals at beta-hat (same oracle fit), event order 1,2,4,7,8,9
  auto data = oracle_data();
  auto fit = nphkit::cox_fit(data);
  auto res = nphkit::schoenfeld_residuals(fit, data);
  REQUIRE(res.rows.size() == 6);
  const double want[6] = {-0.4454199318839357, 0.49901253570079485,
                          -0.4454199318839357, 0.4535663268997888,
                          -0.4454199318839357, 0.3836809330512235};
  const double times[6] = {1, 2, 4, 7, 8, 9};
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    CHECK(res.rows[i].time == doctest::Approx(times[i]));
    CHECK(res.rows[i].residual == doctest::Approx(want[i]).epsilon(1e-8));
    sum += res.rows[i].residual;
  }
  // score equation: residuals sum to ~0 at the MLE
  CHECK(sum == doctest::Approx(0.0).scale(1).epsilon(1e-7));
  // scaled form is beta + d * var * r
  CHECK(res.rows[0].scaled ==
        doctest::Approx(fit.beta + 6.0 * fit.var_beta * want[0]).epsilon(1e-7));
}

TEST_CASE("PH tests: sane p-values under the null, small under crossing") {
  auto null_data = nphkit::simulate_trial(nphkit::scenario_by_name("null"), 21);
  auto nf = nphkit::cox_fit(null_data);
  auto gt = nphkit::grambsch_therneau_test(nf, null_data);
  auto sg = nphkit::schoenfeld_global_test(nf, null_data);
  CHECK(gt.df == 1);
  CHECK(gt.p > 0.0);
  CHECK(gt.p <= 1.0);
  CHECK(sg.p > 0.0);
  CHECK(sg.p <= 1.0);

  auto cross = nphkit::simulate_trial(nphkit::scenario_by_name("cancel3"), 4);
  auto cf = nphkit::cox_fit(cross);
  CHECK(nphkit::grambsch_therneau_test(cf, cross).p < 1e-4);
  CHECK(nphkit::schoenfeld_global_test(cf, cross).p < 1e-3);
}

TEST_CASE("PH test transforms give different but finite statistics") {
  auto data = nphkit::simulate_trial(nphkit::scenario_by_name("first"), 8);
  auto fit = nphkit::cox_fit(data);
  for (auto tr : {nphkit::TimeTransform::kIdentity, nphkit::TimeTransform::kKM,
                  nphkit::TimeTransform::kRank, nphkit::TimeTransform::kLog}) {
    auto r = nphkit::grambsch_therneau_test(fit, data, tr);
    CHECK(std::isfinite(r.statistic));
    CHECK(r.statistic >= 0.0);
  }
}

TEST_CASE("cox survival: baseline equals KM-like step with beta effects") {
  auto data = nphkit::simulate_trial(nphkit::scenario_by_name("first"), 14);
  auto fit = nphkit::cox_fit(data);
  nphkit::CoxSurvival s0(fit, 0), s1(fit, 1);
  CHECK(s0.survival(0.0) == doctest::Approx(1.0));
  // relation S1 = S0^{exp(beta)}
  for (double t : {5.0, 20.0, 40.0}) {
    CHECK(s1.survival(t) ==
          doctest::Approx(std::pow(s0.survival(t), std::exp(fit.beta)))
              .epsilon(1e-10));
    CHECK(s0.survival(t) <= s0.survival(t - 1.0) + 1e-15);
  }
  // rmst of a step curve is bounded by t* and decreasing-step consistent
  CHECK(s0.rmst(40.0) > 0.0);
  CHECK(s0.rmst(40.0) <= 40.0);
  CHECK(s0.rmst(40.0) >= 40.0 * s0.survival(40.0) - 1e-12);
}
