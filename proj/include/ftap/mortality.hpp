#ifndef FTAP_MORTALITY_HPP
#define FTAP_MORTALITY_HPP

#include <limits>
#include <string>
#include <vector>

namespace ftap {

// Integer-age survivor counts l_x for consecutive ages, closing with a
// final entry of zero at the limiting age.
struct LifeTable {
  std::vector<int> ages;
  std::vector<double> survivors;
};

// CSV `age,lx`; ages consecutive, counts nonincreasing and positive
// until the terminal zero row.
LifeTable load_life_table_csv(const std::string& path);

// Survival law of one cohort. Four parametrizations share the same
// queries; ages are exact for the table at integer points and closed
// form elsewhere.
class SurvivalModel {
 public:
  enum class Kind { constant_force, de_moivre, gompertz, life_table };

  static SurvivalModel constant_force(double mu);
  static SurvivalModel de_moivre(double omega);
  // Hazard b * c^x with b > 0 and c > 1, so death is certain.
  static SurvivalModel gompertz(double b, double c);
  static SurvivalModel from_life_table(LifeTable table);

  Kind kind() const { return kind_; }
  // Age past which survival is impossible; +infinity for the constant
  // and Gompertz laws.
  double limiting_age() const;
  double min_age() const;  // first tabulated age; 0 for closed forms

  // S_0(x): probability of surviving from the minimum age to x.
  double survival_from_birth(double x) const;
  // t p_x. Throws DeadCohort when nobody is alive at age x.
  double survival_probability(double x, double t) const;
  // mu_x. Throws DeadCohort at or beyond the limiting age.
  double force_of_mortality(double x) const;
  // f_x(t) = mu_{x+t} * t p_x, evaluated in closed form so the finite
  // limiting age stays finite (the hazard blows up exactly where
  // survival vanishes).
  double death_density(double x, double t) const;
  // q_x = 1 - p_x over one year.
  double one_year_mortality(double x) const;

  // Policy times in (0, horizon) where the hazard is non-smooth for a
  // cohort issued at age x: year boundaries for tables, the limiting
  // age for de Moivre. Used to align quadrature panels.
  std::vector<double> hazard_breakpoints(double x, double horizon) const;

 private:
  SurvivalModel() = default;
  double table_survivors_at(double age) const;

  Kind kind_ = Kind::constant_force;
  double mu_ = 0.0;     // constant force
  double omega_ = 0.0;  // de Moivre
  double gb_ = 0.0;     // Gompertz level
  double gc_ = 0.0;     // Gompertz growth
  LifeTable table_;
};

}  // namespace ftap

#endif  // FTAP_MORTALITY_HPP
