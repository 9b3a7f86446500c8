#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "ftap/errors.hpp"
#include "ftap/valuation.hpp"

using namespace ftap;

namespace {

ValuationRequest annuity_certain_request() {
  ValuationRequest req;
  req.contract = Contract::risk_free(TimeFunction::constant(1.0), 0.0);
  req.foi = ForceOfInterest::constant(0.05);
  req.horizon = 10.0;
  return req;
}

ValuationRequest de_moivre_wl_request(double delta = 0.05) {
  ValuationRequest req;
  req.contract = Contract::whole_life(TimeFunction::constant(1.0));
  req.foi = ForceOfInterest::constant(delta);
  req.survival = SurvivalModel::de_moivre(40.0);
  req.issue_age = 30.0;  // ten years of remaining lifespan
  return req;
}

}  // namespace

TEST_CASE("time functions evaluate by piece and by polynomial") {
  const TimeFunction step = TimeFunction::piecewise({2.0, 5.0}, {1.0, 3.0, 7.0});
  CHECK(step(0.0) == doctest::Approx(1.0));
  CHECK(step(1.999) == doctest::Approx(1.0));
  CHECK(step(2.0) == doctest::Approx(3.0));  // breakpoint belongs to the right piece
  CHECK(step(4.9) == doctest::Approx(3.0));
  CHECK(step(5.0) == doctest::Approx(7.0));
  CHECK(step(100.0) == doctest::Approx(7.0));

  const TimeFunction poly = TimeFunction::polynomial({1.0, -2.0, 0.5});
  CHECK(poly(0.0) == doctest::Approx(1.0));
  CHECK(poly(2.0) == doctest::Approx(1.0 - 4.0 + 2.0));
  CHECK(poly(3.0) == doctest::Approx(1.0 - 6.0 + 4.5));

  CHECK_THROWS_AS(TimeFunction::piecewise({1.0}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeFunction::piecewise({3.0, 1.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeFunction::polynomial({}), std::invalid_argument);
  CHECK_THROWS_AS(step.constant_value(), std::invalid_argument);
}

TEST_CASE("force of interest integrates exactly across pieces") {
  const ForceOfInterest flat = ForceOfInterest::constant(0.05);
  CHECK(flat.integral(0.0, 10.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(flat.integral(10.0, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));

  const ForceOfInterest steps = ForceOfInterest::piecewise({5.0}, {0.03, 0.05});
  CHECK(steps.rate(4.999) == doctest::Approx(0.03));
  CHECK(steps.rate(5.0) == doctest::Approx(0.05));
  CHECK(steps.integral(0.0, 10.0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(steps.integral(3.0, 6.0) == doctest::Approx(0.03 * 2.0 + 0.05 * 1.0).epsilon(1e-15));

  const ForceOfInterest curve = ForceOfInterest::curve([](double t) { return 0.01 * t; });
  CHECK(curve.integral(0.0, 4.0) == doctest::Approx(0.08).epsilon(1e-10));
}

TEST_CASE("annuity-certain: both routes hit the closed form") {
  const ValuationRequest req = annuity_certain_request();
  const ValuationResult quad = value_risk_free(req);
  CHECK(quad.price_zero() == doctest::Approx(7.8693868057473315).epsilon(1e-10));
  CHECK(quad.price_at(4.0) == doctest::Approx(5.183635586365642).epsilon(1e-10));
  CHECK(quad.horizon() == doctest::Approx(10.0));

  const ValuationResult ode = value_risk_free_ode(req, 1.0 / 64.0);
  CHECK(ode.price_zero() == doctest::Approx(7.8693868057473315).epsilon(1e-9));
  CHECK(ode.price_at(4.0) == doctest::Approx(5.183635586365642).epsilon(1e-9));
  CHECK(ode.method_agreement() <= 1e-7);
  CHECK(ode.work() == 640);
}

TEST_CASE("zero-coupon bond under a piecewise force of interest") {
  ValuationRequest req;
  req.contract = Contract::risk_free(TimeFunction::constant(0.0), 1.0);
  req.foi = ForceOfInterest::piecewise({5.0}, {0.03, 0.05});
  req.horizon = 10.0;
  const ValuationResult quad = value_risk_free(req);
  CHECK(quad.price_zero() == doctest::Approx(0.67032004603563933).epsilon(1e-12));
  CHECK(quad.price_at(5.0) == doctest::Approx(0.77880078307140488).epsilon(1e-12));

  const ValuationResult ode = value_risk_free_ode(req, 1.0 / 128.0);
  CHECK(ode.price_zero() == doctest::Approx(0.67032004603563933).epsilon(1e-9));
}

TEST_CASE("whole life under uniform death follows the analytic reserve path") {
  const ValuationRequest req = de_moivre_wl_request();
  const ValuationResult quad = value_whole_life_quadrature(req);
  CHECK(quad.price_zero() == doctest::Approx(0.78693868057473315).epsilon(1e-10));
  CHECK(quad.price_at(3.7) == doctest::Approx(0.85781309755854984).epsilon(1e-10));

  const ValuationResult ode = value_whole_life_ode(req, 1.0 / 256.0);
  CHECK(ode.price_zero() == doctest::Approx(0.78693868057473315).epsilon(1e-8));
  CHECK(ode.price_at(3.7) == doctest::Approx(0.85781309755854984).epsilon(1e-8));
  CHECK(ode.method_agreement() <= 1e-6);

  // The reserve climbs toward the certain payout near the limiting age.
  const std::vector<double>& prices = ode.prices();
  CHECK(prices[prices.size() - 2] > 0.99);
}

TEST_CASE("zero-interest annuity under uniform death has a linear reserve") {
  ValuationRequest req;
  req.contract = Contract::continuous_annuity(TimeFunction::constant(1.0));
  req.foi = ForceOfInterest::constant(0.0);
  req.survival = SurvivalModel::de_moivre(40.0);
  req.issue_age = 30.0;

  const ValuationResult quad = value_annuity_quadrature(req);
  CHECK(quad.price_zero() == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(quad.price_at(4.0) == doctest::Approx(3.0).epsilon(1e-10));

  const ValuationResult ode = value_annuity_ode(req, 1.0 / 128.0);
  CHECK(ode.price_zero() == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(ode.price_at(7.5) == doctest::Approx(1.25).epsilon(1e-8));
}

TEST_CASE("constant-force insurance and annuity have closed-form values") {
  const SurvivalModel m = SurvivalModel::constant_force(0.04);
  CHECK(A_bar(m, 30.0, 0.06) == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(a_bar(m, 30.0, 0.06) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("protection and annuity values satisfy the budget identity") {
  // A + delta * a = 1 for any law: the unit is either spent on the
  // death benefit or streams as interest until death.
  const SurvivalModel models[] = {
      SurvivalModel::constant_force(0.04),
      SurvivalModel::de_moivre(100.0),
      SurvivalModel::gompertz(0.0003, 1.07),
  };
  for (const SurvivalModel& m : models) {
    for (double delta : {0.0, 0.01, 0.05, 0.1}) {
      const double lhs = A_bar(m, 30.0, delta) + delta * a_bar(m, 30.0, delta);
      CHECK(lhs == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("net premium rate reproduces the constant-force shortcut") {
  const SurvivalModel m = SurvivalModel::constant_force(0.04);
  const double rho = solve_net_premium_rate(m, 30.0, 0.06, TimeFunction::constant(1.0));
  CHECK(rho == doctest::Approx(0.04).epsilon(1e-8));

  const SurvivalModel dm = SurvivalModel::de_moivre(40.0);
  const double rho_dm = solve_net_premium_rate(dm, 30.0, 0.05, TimeFunction::constant(1.0));
  CHECK(rho_dm == doctest::Approx(0.18467422493615948).epsilon(1e-8));
}

TEST_CASE("valuations satisfy their own recursion across interior dates") {
  const ValuationResult rf = value_risk_free(annuity_certain_request());
  CHECK(check_recursion(rf, 1.2, 3.4, 7.9) <= 1e-8);

  const ValuationResult wl = value_whole_life_quadrature(de_moivre_wl_request());
  CHECK(check_recursion(wl, 1.2, 3.4, 7.9) <= 1e-8);

  const ValuationResult wl_ode = value_whole_life_ode(de_moivre_wl_request(), 1.0 / 256.0);
  CHECK(check_recursion(wl_ode, 1.2, 3.4, 7.9) <= 1e-7);

  CHECK_THROWS_AS(check_recursion(rf, 3.0, 2.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(check_recursion(rf, 1.0, 2.0, 50.0), std::invalid_argument);
}

TEST_CASE("open-ended laws are truncated where survival dies out") {
  ValuationRequest req;
  req.contract = Contract::continuous_annuity(TimeFunction::constant(1.0));
  req.foi = ForceOfInterest::constant(0.06);
  req.survival = SurvivalModel::constant_force(0.04);
  req.issue_age = 30.0;
  const double h = resolved_horizon(req);
  // Survival 1e-12 at t = ln(1e12) / 0.04.
  CHECK(h == doctest::Approx(std::log(1e12) / 0.04).epsilon(1e-6));

  // Immortal cohorts cannot pick their own horizon.
  req.survival = SurvivalModel::constant_force(0.0);
  CHECK_THROWS_AS(resolved_horizon(req), std::invalid_argument);
  req.horizon = 50.0;
  CHECK(resolved_horizon(req) == doctest::Approx(50.0));
}

TEST_CASE("horizon bookkeeping rejects unusable requests") {
  ValuationRequest rf;
  rf.contract = Contract::risk_free(TimeFunction::constant(1.0), 0.0);
  CHECK_THROWS_AS(resolved_horizon(rf), std::invalid_argument);  // no horizon
  rf.horizon = -2.0;
  CHECK_THROWS_AS(resolved_horizon(rf), std::invalid_argument);

  ValuationRequest wl;
  wl.contract = Contract::whole_life(TimeFunction::constant(1.0));
  CHECK_THROWS_AS(resolved_horizon(wl), std::invalid_argument);  // no survival model
  wl.survival = SurvivalModel::de_moivre(40.0);
  wl.issue_age = 45.0;
  CHECK_THROWS_AS(resolved_horizon(wl), DeadCohort);

  // Contract/valuer mismatches are caught before any work happens.
  CHECK_THROWS_AS(value_risk_free(de_moivre_wl_request()), std::invalid_argument);
  CHECK_THROWS_AS(value_whole_life_quadrature(annuity_certain_request()), std::invalid_argument);
}

TEST_CASE("a stiff mortality law at a coarse grid is refused, not mispriced") {
  ValuationRequest req;
  req.contract = Contract::whole_life(TimeFunction::constant(1.0));
  req.foi = ForceOfInterest::constant(0.0);
  req.survival = SurvivalModel::constant_force(100.0);
  req.issue_age = 30.0;
  CHECK_THROWS_AS(value_whole_life_ode(req, 1.0 / 16.0), StepTooLarge);
  // A grid resolving the decay scale values the same contract fine.
  const ValuationResult fine = value_whole_life_ode(req, 1.0 / 2048.0);
  CHECK(fine.price_zero() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("life-table whole life agrees across routes and ages") {
  LifeTable t;
  t.ages = {65, 66, 67, 68, 69, 70};
  t.survivors = {100000.0, 98000.0, 95000.0, 90000.0, 80000.0, 0.0};
  const SurvivalModel m = SurvivalModel::from_life_table(t);

  ValuationRequest req;
  req.contract = Contract::whole_life(TimeFunction::constant(1.0));
  req.foi = ForceOfInterest::constant(0.04);
  req.survival = m;
  req.issue_age = 65.0;

  const ValuationResult quad = value_whole_life_quadrature(req);
  const ValuationResult ode = value_whole_life_ode(req, 1.0 / 256.0);
  CHECK(ode.price_zero() == doctest::Approx(quad.price_zero()).epsilon(1e-7));
  CHECK(ode.method_agreement() <= 1e-6);
  CHECK(quad.price_at(2.5) == doctest::Approx(ode.price_at(2.5)).epsilon(1e-6));
  CHECK(check_recursion(quad, 0.5, 2.25, 4.5) <= 1e-8);
}

TEST_CASE("valuation config loader") {
  const std::string good = "tmp_val_good.json";
  {
    std::ofstream out(good);
    out << R"({
      "contract": {"kind": "whole_life", "benefit": {"kind": "constant", "value": 100000}},
      "foi": {"kind": "constant", "delta": 0.05},
      "mortality": {"kind": "de_moivre", "omega": 100},
      "issue_age": 30,
      "grid_step": 0.125
    })";
  }
  const ValuationRequest req = load_valuation_request(good);
  CHECK(req.contract.kind == ContractKind::whole_life);
  CHECK(req.contract.benefit(3.0) == doctest::Approx(100000.0));
  CHECK(req.foi.constant_value() == doctest::Approx(0.05));
  REQUIRE(req.survival.has_value());
  CHECK(req.survival->limiting_age() == doctest::Approx(100.0));
  CHECK(req.issue_age == doctest::Approx(30.0));
  CHECK(req.grid_step == doctest::Approx(0.125));
  CHECK_FALSE(req.horizon.has_value());

  const std::string shorthand = "tmp_val_short.json";
  {
    std::ofstream out(shorthand);
    out << R"({
      "contract": {"kind": "risk_free", "payment_rate": 1.0, "terminal_value": 2.5},
      "foi": 0.05,
      "horizon": 10
    })";
  }
  const ValuationRequest rf = load_valuation_request(shorthand);
  CHECK(rf.contract.kind == ContractKind::risk_free);
  CHECK(rf.contract.terminal_value == doctest::Approx(2.5));
  CHECK(rf.horizon.value() == doctest::Approx(10.0));

  const std::string piecewise = "tmp_val_piecewise.json";
  {
    std::ofstream out(piecewise);
    out << R"({
      "contract": {"kind": "continuous_annuity",
                   "payment_rate": {"kind": "piecewise_constant",
                                    "breakpoints": [5], "values": [1.0, 0.5]}},
      "foi": {"kind": "piecewise_constant", "breakpoints": [5], "values": [0.03, 0.05]},
      "mortality": {"kind": "gompertz", "b": 0.0003, "c": 1.07},
      "issue_age": 40
    })";
  }
  const ValuationRequest ann = load_valuation_request(piecewise);
  CHECK(ann.contract.payment_rate(6.0) == doctest::Approx(0.5));
  CHECK(ann.foi.rate(2.0) == doctest::Approx(0.03));
  CHECK(ann.survival->kind() == SurvivalModel::Kind::gompertz);

  const std::string bad_kind = "tmp_val_badkind.json";
  {
    std::ofstream out(bad_kind);
    out << R"({"contract": {"kind": "lottery"}, "foi": 0.0})";
  }
  CHECK_THROWS_WITH_AS(load_valuation_request(bad_kind), doctest::Contains("unknown kind"),
                       std::invalid_argument);

  const std::string no_foi = "tmp_val_nofoi.json";
  {
    std::ofstream out(no_foi);
    out << R"({"contract": {"kind": "risk_free", "payment_rate": 1.0}, "horizon": 5})";
  }
  CHECK_THROWS_WITH_AS(load_valuation_request(no_foi), doctest::Contains("foi"),
                       std::invalid_argument);

  const std::string mangled = "tmp_val_mangled.json";
  {
    std::ofstream out(mangled);
    out << "{oops";
  }
  CHECK_THROWS_WITH_AS(load_valuation_request(mangled), doctest::Contains("not valid JSON"),
                       std::invalid_argument);

  CHECK_THROWS_AS(load_valuation_request("tmp_val_missing.json"), std::invalid_argument);
}

TEST_CASE("life-table config resolves the table through its csv path") {
  const std::string csv = "tmp_val_table.csv";
  {
    std::ofstream out(csv);
    out << "age,lx\n65,1000\n66,900\n67,0\n";
  }
  const std::string cfg = "tmp_val_table.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "contract": {"kind": "continuous_annuity", "payment_rate": 1.0},
      "foi": 0.02,
      "mortality": {"kind": "life_table", "path": "tmp_val_table.csv"},
      "issue_age": 65
    })";
  }
  const ValuationRequest req = load_valuation_request(cfg);
  REQUIRE(req.survival.has_value());
  CHECK(req.survival->kind() == SurvivalModel::Kind::life_table);
  CHECK(req.survival->limiting_age() == doctest::Approx(67.0));
  const ValuationResult quad = value_annuity_quadrature(req);
  CHECK(quad.price_zero() > 0.0);
  CHECK(quad.price_zero() < 2.0);
}
