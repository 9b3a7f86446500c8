#include "ftap/mortality.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ftap/errors.hpp"

namespace ftap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Ages this close to a year boundary are treated as exactly on it.
constexpr double kAgeEps = 1e-12;

}  // namespace

LifeTable load_life_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open life table: " + path);
  LifeTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string age_field, lx_field;
    if (!std::getline(ss, age_field, ',') || !std::getline(ss, lx_field))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected age,lx");
    const auto trim = [](std::string& s) {
      const auto l = s.find_first_not_of(" \t\r");
      const auto r = s.find_last_not_of(" \t\r");
      s = l == std::string::npos ? "" : s.substr(l, r - l + 1);
    };
    trim(age_field);
    trim(lx_field);
    if (!header_seen) {
      header_seen = true;
      if (age_field == "age") continue;  // header optional
    }
    int age = 0;
    double lx = 0.0;
    auto r1 = std::from_chars(age_field.data(), age_field.data() + age_field.size(), age);
    auto r2 = std::from_chars(lx_field.data(), lx_field.data() + lx_field.size(), lx);
    if (r1.ec != std::errc{} || r1.ptr != age_field.data() + age_field.size() ||
        r2.ec != std::errc{} || r2.ptr != lx_field.data() + lx_field.size())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": bad age or lx value");
    table.ages.push_back(age);
    table.survivors.push_back(lx);
  }
  if (table.ages.size() < 2)
    throw std::invalid_argument("life table needs at least two rows: " + path);
  for (std::size_t i = 0; i < table.ages.size(); ++i) {
    if (i > 0 && table.ages[i] != table.ages[i - 1] + 1)
      throw std::invalid_argument("life table ages must increase by 1 (age " +
                                  std::to_string(table.ages[i]) + ")");
    if (i > 0 && table.survivors[i] > table.survivors[i - 1])
      throw std::invalid_argument("life table counts must be nonincreasing (age " +
                                  std::to_string(table.ages[i]) + ")");
    const bool last = i + 1 == table.ages.size();
    if (!last && table.survivors[i] <= 0.0)
      throw std::invalid_argument("life table counts must stay positive before the final age");
    if (last && table.survivors[i] != 0.0)
      throw std::invalid_argument("life table must close with a zero count");
  }
  return table;
}

SurvivalModel SurvivalModel::constant_force(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("constant force of mortality must be >= 0");
  SurvivalModel m;
  m.kind_ = Kind::constant_force;
  m.mu_ = mu;
  return m;
}

SurvivalModel SurvivalModel::de_moivre(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw std::invalid_argument("de Moivre limiting age must be positive");
  SurvivalModel m;
  m.kind_ = Kind::de_moivre;
  m.omega_ = omega;
  return m;
}

SurvivalModel SurvivalModel::gompertz(double b, double c) {
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("Gompertz level must be > 0");
  if (!(c > 1.0) || !std::isfinite(c))
    throw std::invalid_argument("Gompertz growth must exceed 1 so death is certain");
  SurvivalModel m;
  m.kind_ = Kind::gompertz;
  m.gb_ = b;
  m.gc_ = c;
  return m;
}

SurvivalModel SurvivalModel::from_life_table(LifeTable table) {
  if (table.ages.size() < 2 || table.ages.size() != table.survivors.size())
    throw std::invalid_argument("life table must pair each age with a count");
  SurvivalModel m;
  m.kind_ = Kind::life_table;
  m.table_ = std::move(table);
  return m;
}

double SurvivalModel::limiting_age() const {
  switch (kind_) {
    case Kind::constant_force:
    case Kind::gompertz:
      return kInf;
    case Kind::de_moivre:
      return omega_;
    case Kind::life_table:
      return static_cast<double>(table_.ages.back());
  }
  return kInf;
}

double SurvivalModel::min_age() const {
  return kind_ == Kind::life_table ? static_cast<double>(table_.ages.front()) : 0.0;
}

// Survivor count at a possibly fractional age. Constant hazard within
// each year; the terminal year (count dropping to zero) instead spreads
// deaths uniformly, since no finite constant hazard reaches zero.
double SurvivalModel::table_survivors_at(double age) const {
  const double lo = static_cast<double>(table_.ages.front());
  const double hi = static_cast<double>(table_.ages.back());
  if (age < lo - kAgeEps)
    throw std::invalid_argument("age " + std::to_string(age) + " precedes the life table");
  if (age >= hi - kAgeEps) return 0.0;
  age = std::max(age, lo);
  const auto k = static_cast<std::size_t>(std::floor(age - lo + kAgeEps));
  const double frac = std::clamp(age - lo - static_cast<double>(k), 0.0, 1.0);
  const double l0 = table_.survivors[k];
  const double l1 = table_.survivors[k + 1];
  if (frac == 0.0) return l0;
  if (l1 > 0.0) return l0 * std::pow(l1 / l0, frac);
  return l0 * (1.0 - frac);
}

double SurvivalModel::survival_from_birth(double x) const {
  switch (kind_) {
    case Kind::constant_force:
      return std::exp(-mu_ * x);
    case Kind::de_moivre:
      if (x < 0.0) throw std::invalid_argument("age must be nonnegative");
      return x >= omega_ ? 0.0 : (omega_ - x) / omega_;
    case Kind::gompertz: {
      const double hazard_integral = gb_ * (std::pow(gc_, x) - 1.0) / std::log(gc_);
      return std::exp(-hazard_integral);
    }
    case Kind::life_table: {
      return table_survivors_at(x) / table_.survivors.front();
    }
  }
  return 0.0;
}

double SurvivalModel::survival_probability(double x, double t) const {
  if (t < 0.0) throw std::invalid_argument("survival_probability: negative duration");
  switch (kind_) {
    case Kind::constant_force:
      return std::exp(-mu_ * t);
    case Kind::de_moivre: {
      if (x >= omega_) throw DeadCohort("no survivors at age " + std::to_string(x));
      const double remaining = omega_ - x;
      return t >= remaining ? 0.0 : (remaining - t) / remaining;
    }
    case Kind::gompertz: {
      const double hazard_integral = gb_ * std::pow(gc_, x) * (std::pow(gc_, t) - 1.0) / std::log(gc_);
      return std::exp(-hazard_integral);
    }
    case Kind::life_table: {
      const double lx = table_survivors_at(x);
      if (lx <= 0.0) throw DeadCohort("no survivors at age " + std::to_string(x));
      return table_survivors_at(x + t) / lx;
    }
  }
  return 0.0;
}

double SurvivalModel::force_of_mortality(double x) const {
  switch (kind_) {
    case Kind::constant_force:
      return mu_;
    case Kind::de_moivre:
      if (x >= omega_) throw DeadCohort("force of mortality undefined at age " + std::to_string(x));
      return 1.0 / (omega_ - x);
    case Kind::gompertz:
      return gb_ * std::pow(gc_, x);
    case Kind::life_table: {
      if (table_survivors_at(x) <= 0.0)
        throw DeadCohort("force of mortality undefined at age " + std::to_string(x));
      const double lo = static_cast<double>(table_.ages.front());
      const auto k = static_cast<std::size_t>(std::floor(x - lo + kAgeEps));
      const double l0 = table_.survivors[k];
      const double l1 = table_.survivors[k + 1];
      if (l1 > 0.0) return -std::log(l1 / l0);
      // Terminal year: uniform deaths, de Moivre-style hazard.
      const double year_end = lo + static_cast<double>(k) + 1.0;
      return 1.0 / (year_end - x);
    }
  }
  return 0.0;
}

double SurvivalModel::death_density(double x, double t) const {
  if (t < 0.0) throw std::invalid_argument("death_density: negative duration");
  switch (kind_) {
    case Kind::constant_force:
      return mu_ * std::exp(-mu_ * t);
    case Kind::de_moivre: {
      if (x >= omega_) throw DeadCohort("no survivors at age " + std::to_string(x));
      // Uniform death time: the hazard pole and vanishing survival
      // cancel, including at t = omega - x itself.
      return t <= omega_ - x + kAgeEps ? 1.0 / (omega_ - x) : 0.0;
    }
    case Kind::gompertz:
      return force_of_mortality(x + t) * survival_probability(x, t);
    case Kind::life_table: {
      const double lx = table_survivors_at(x);
      if (lx <= 0.0) throw DeadCohort("no survivors at age " + std::to_string(x));
      const double y = x + t;
      const double hi = static_cast<double>(table_.ages.back());
      if (y > hi + kAgeEps) return 0.0;
      const double lo = static_cast<double>(table_.ages.front());
      const auto k = static_cast<std::size_t>(
          std::min(std::floor(y - lo + kAgeEps), static_cast<double>(table_.ages.size()) - 2.0));
      const double l0 = table_.survivors[k];
      const double l1 = table_.survivors[k + 1];
      if (l1 > 0.0) {
        const double hazard = -std::log(l1 / l0);
        return hazard * table_survivors_at(y) / lx;
      }
      // Terminal year: density is flat at l_k per unit exposure.
      return l0 / lx;
    }
  }
  return 0.0;
}

double SurvivalModel::one_year_mortality(double x) const {
  return 1.0 - survival_probability(x, 1.0);
}

std::vector<double> SurvivalModel::hazard_breakpoints(double x, double horizon) const {
  std::vector<double> out;
  switch (kind_) {
    case Kind::constant_force:
    case Kind::gompertz:
      break;
    case Kind::de_moivre:
      if (omega_ - x > 0.0 && omega_ - x < horizon) out.push_back(omega_ - x);
      break;
    case Kind::life_table: {
      // Policy times where the attained age crosses an integer.
      const double first = std::ceil(x - kAgeEps) - x;
      for (double t = first <= 0.0 ? first + 1.0 : first; t < horizon; t += 1.0)
        if (t > 0.0) out.push_back(t);
      break;
    }
  }
  return out;
}

}  // namespace ftap
