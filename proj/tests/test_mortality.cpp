#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "ftap/errors.hpp"
#include "ftap/mortality.hpp"

using namespace ftap;

namespace {

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

// 100000 -> 99000 -> 97000 -> 0 over ages 65..68.
LifeTable small_table() {
  LifeTable t;
  t.ages = {65, 66, 67, 68};
  t.survivors = {100000.0, 99000.0, 97000.0, 0.0};
  return t;
}

}  // namespace

TEST_CASE("constant force: exponential survival") {
  const SurvivalModel m = SurvivalModel::constant_force(0.04);
  CHECK(m.survival_probability(30.0, 10.0) == doctest::Approx(0.6703200460356393).epsilon(1e-15));
  CHECK(m.one_year_mortality(50.0) == doctest::Approx(0.039210560847676836).epsilon(1e-15));
  CHECK(m.force_of_mortality(80.0) == doctest::Approx(0.04));
  CHECK(m.death_density(30.0, 10.0) == doctest::Approx(0.04 * 0.6703200460356393).epsilon(1e-15));
  CHECK(std::isinf(m.limiting_age()));
  CHECK(m.hazard_breakpoints(30.0, 50.0).empty());
  CHECK_THROWS_AS(SurvivalModel::constant_force(-0.1), std::invalid_argument);
}

TEST_CASE("de Moivre: linear survival with a hard limiting age") {
  const SurvivalModel m = SurvivalModel::de_moivre(100.0);
  CHECK(m.survival_probability(30.0, 10.0) == doctest::Approx(0.8571428571428571).epsilon(1e-15));
  CHECK(m.force_of_mortality(30.0) == doctest::Approx(0.014285714285714285).epsilon(1e-15));
  CHECK(m.survival_probability(30.0, 70.0) == doctest::Approx(0.0));
  CHECK(m.survival_probability(30.0, 75.0) == doctest::Approx(0.0));
  CHECK(m.limiting_age() == doctest::Approx(100.0));

  // Death time is uniform on the remaining lifespan, including at the
  // far endpoint where hazard and survival trade off exactly.
  CHECK(m.death_density(30.0, 35.0) == doctest::Approx(1.0 / 70.0).epsilon(1e-15));
  CHECK(m.death_density(30.0, 70.0) == doctest::Approx(1.0 / 70.0).epsilon(1e-15));
  CHECK(m.death_density(30.0, 70.5) == doctest::Approx(0.0));

  CHECK_THROWS_AS(m.survival_probability(100.0, 1.0), DeadCohort);
  CHECK_THROWS_AS(m.force_of_mortality(101.0), DeadCohort);

  const std::vector<double> cuts = m.hazard_breakpoints(30.0, 100.0);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0] == doctest::Approx(70.0));
}

TEST_CASE("Gompertz: exponentially growing hazard") {
  const SurvivalModel m = SurvivalModel::gompertz(0.0003, 1.07);
  CHECK(m.survival_probability(30.0, 10.0) ==
        doctest::Approx(0.96788289414029716).epsilon(1e-14));
  CHECK(m.force_of_mortality(40.0) == doctest::Approx(0.004492337351762095).epsilon(1e-14));
  CHECK(m.death_density(30.0, 10.0) == doctest::Approx(0.0043480564774780548).epsilon(1e-14));
  CHECK(m.survival_probability(30.0, 80.0) ==
        doctest::Approx(0.00053416221850940613).epsilon(1e-12));
  CHECK(std::isinf(m.limiting_age()));

  // c <= 1 would leave a positive chance of never dying.
  CHECK_THROWS_AS(SurvivalModel::gompertz(0.0003, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::gompertz(0.0003, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::gompertz(0.0, 1.07), std::invalid_argument);
}

TEST_CASE("survival is multiplicative over consecutive intervals") {
  const SurvivalModel models[] = {
      SurvivalModel::constant_force(0.02),
      SurvivalModel::de_moivre(90.0),
      SurvivalModel::gompertz(0.0003, 1.07),
      SurvivalModel::from_life_table(small_table()),
  };
  const double ages[] = {20.0, 40.0, 65.25};
  for (const SurvivalModel& m : models) {
    for (double x : ages) {
      if (x < m.min_age()) x += m.min_age();
      for (double t1 : {0.4, 1.0, 1.7}) {
        for (double t2 : {0.3, 1.1}) {
          if (x + t1 + t2 >= m.limiting_age()) continue;
          const double joint = m.survival_probability(x, t1 + t2);
          const double split = m.survival_probability(x, t1) *
                               m.survival_probability(x + t1, t2);
          CHECK(joint == doctest::Approx(split).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("life table: exact at integer ages, constant hazard between them") {
  const SurvivalModel m = SurvivalModel::from_life_table(small_table());
  CHECK(m.min_age() == doctest::Approx(65.0));
  CHECK(m.limiting_age() == doctest::Approx(68.0));
  CHECK(m.survival_probability(65.0, 1.0) == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(m.survival_probability(65.0, 2.0) == doctest::Approx(0.97).epsilon(1e-15));
  CHECK(m.survival_probability(65.0, 3.0) == doctest::Approx(0.0));
  CHECK(m.one_year_mortality(65.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(m.survival_probability(65.0, 0.5) == doctest::Approx(0.99498743710661997).epsilon(1e-14));
  CHECK(m.force_of_mortality(65.5) == doctest::Approx(0.01005033585350145).epsilon(1e-14));
  CHECK(m.force_of_mortality(66.2) == doctest::Approx(0.020408871631207123).epsilon(1e-14));
}

TEST_CASE("life table: terminal year spreads deaths uniformly") {
  const SurvivalModel m = SurvivalModel::from_life_table(small_table());
  // Half the final cohort is left halfway through the last year.
  CHECK(m.survival_probability(67.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.survival_probability(65.0, 2.5) == doctest::Approx(0.485).epsilon(1e-15));
  // Uniform deaths give a flat density and a de Moivre-style hazard.
  CHECK(m.death_density(67.0, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.death_density(65.0, 2.5) == doctest::Approx(0.97).epsilon(1e-14));
  CHECK(m.force_of_mortality(67.25) == doctest::Approx(1.0 / 0.75).epsilon(1e-14));

  CHECK_THROWS_AS(m.survival_probability(68.0, 0.5), DeadCohort);
  CHECK_THROWS_AS(m.force_of_mortality(68.0), DeadCohort);
  CHECK_THROWS_AS(m.survival_probability(60.0, 1.0), std::invalid_argument);
}

TEST_CASE("life table hazard breakpoints fall on year boundaries in policy time") {
  const SurvivalModel m = SurvivalModel::from_life_table(small_table());
  const std::vector<double> at_issue = m.hazard_breakpoints(65.0, 2.5);
  REQUIRE(at_issue.size() == 2);
  CHECK(at_issue[0] == doctest::Approx(1.0));
  CHECK(at_issue[1] == doctest::Approx(2.0));

  const std::vector<double> off_year = m.hazard_breakpoints(65.25, 2.0);
  REQUIRE(off_year.size() == 2);
  CHECK(off_year[0] == doctest::Approx(0.75));
  CHECK(off_year[1] == doctest::Approx(1.75));
}

TEST_CASE("death density integrates to the within-interval mortality") {
  // Riemann check of f against S differences, all four laws.
  const SurvivalModel models[] = {
      SurvivalModel::constant_force(0.05),
      SurvivalModel::de_moivre(80.0),
      SurvivalModel::gompertz(0.0002, 1.08),
      SurvivalModel::from_life_table(small_table()),
  };
  for (const SurvivalModel& m : models) {
    const double x = m.min_age() + 0.0;
    const double span = std::min(2.0, (std::isfinite(m.limiting_age())
                                           ? m.limiting_age() - x
                                           : 2.0));
    const int n = 4000;
    const double dt = span / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += m.death_density(x, (i + 0.5) * dt) * dt;
    const double expected = 1.0 - m.survival_probability(x, span);
    CHECK(acc == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("life table csv loader") {
  const std::string good = "tmp_lt_good.csv";
  write_file(good, "age,lx\n65,100000\n66,99000\n67,97000\n68,0\n");
  const LifeTable t = load_life_table_csv(good);
  REQUIRE(t.ages.size() == 4);
  CHECK(t.ages.front() == 65);
  CHECK(t.survivors[1] == doctest::Approx(99000.0));

  const std::string headerless = "tmp_lt_headerless.csv";
  write_file(headerless, "65,100000\n66,0\n");
  CHECK(load_life_table_csv(headerless).ages.size() == 2);

  const std::string gap = "tmp_lt_gap.csv";
  write_file(gap, "age,lx\n65,100000\n67,99000\n68,0\n");
  CHECK_THROWS_WITH_AS(load_life_table_csv(gap), doctest::Contains("increase by 1"),
                       std::invalid_argument);

  const std::string rising = "tmp_lt_rising.csv";
  write_file(rising, "age,lx\n65,100000\n66,100500\n67,0\n");
  CHECK_THROWS_WITH_AS(load_life_table_csv(rising), doctest::Contains("nonincreasing"),
                       std::invalid_argument);

  const std::string open_ended = "tmp_lt_open.csv";
  write_file(open_ended, "age,lx\n65,100000\n66,99000\n");
  CHECK_THROWS_WITH_AS(load_life_table_csv(open_ended), doctest::Contains("zero count"),
                       std::invalid_argument);

  const std::string early_zero = "tmp_lt_zero.csv";
  write_file(early_zero, "age,lx\n65,100000\n66,0\n67,0\n");
  CHECK_THROWS_WITH_AS(load_life_table_csv(early_zero), doctest::Contains("stay positive"),
                       std::invalid_argument);

  const std::string bad_num = "tmp_lt_badnum.csv";
  write_file(bad_num, "age,lx\n65,100000\n66,many\n67,0\n");
  CHECK_THROWS_WITH_AS(load_life_table_csv(bad_num), doctest::Contains("line 3"),
                       std::invalid_argument);

  CHECK_THROWS_AS(load_life_table_csv("tmp_lt_missing.csv"), std::invalid_argument);
}
