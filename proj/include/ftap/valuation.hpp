#ifndef FTAP_VALUATION_HPP
#define FTAP_VALUATION_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftap/mortality.hpp"

namespace ftap {

inline constexpr double kDefaultGridStep = 1.0 / 256.0;
// Infinite-horizon contracts are cut where survival drops below this.
inline constexpr double kTruncationSurvival = 1e-12;

// Deterministic function of policy time used for benefits and payment
// rates: constant, piecewise constant, or polynomial.
class TimeFunction {
 public:
  static TimeFunction constant(double value);
  // values[i] applies on [breakpoints[i-1], breakpoints[i]), with the
  // first piece starting at 0 and the last running to infinity, so
  // values needs one more entry than breakpoints.
  static TimeFunction piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static TimeFunction polynomial(std::vector<double> coefficients);

  double operator()(double t) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  bool is_constant() const { return kind_ == Kind::constant; }
  double constant_value() const;  // throws unless constant

 private:
  enum class Kind { constant, piecewise, polynomial };
  Kind kind_ = Kind::constant;
  std::vector<double> breakpoints_;
  std::vector<double> values_;  // piecewise values or polynomial coefficients
};

// Force of interest delta(t) with exact piecewise integration; an
// arbitrary callable curve falls back to quadrature for the integral.
class ForceOfInterest {
 public:
  static ForceOfInterest constant(double delta);
  static ForceOfInterest piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static ForceOfInterest curve(std::function<double(double)> rate);

  double rate(double t) const;
  double integral(double a, double b) const;  // ∫_a^b delta
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  bool is_constant() const { return kind_ == Kind::constant; }
  double constant_value() const;  // throws unless constant

 private:
  enum class Kind { constant, piecewise, curve };
  Kind kind_ = Kind::constant;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::function<double(double)> curve_;
};

enum class ContractKind { whole_life, continuous_annuity, risk_free };

struct Contract {
  ContractKind kind = ContractKind::risk_free;
  TimeFunction benefit = TimeFunction::constant(0.0);       // death benefit (whole life)
  TimeFunction payment_rate = TimeFunction::constant(0.0);  // annuity / risk-free flow
  double terminal_value = 0.0;                              // risk-free redemption

  static Contract whole_life(TimeFunction benefit);
  static Contract continuous_annuity(TimeFunction payment_rate);
  static Contract risk_free(TimeFunction payment_rate, double terminal_value);
};

struct ValuationRequest {
  Contract contract;
  ForceOfInterest foi = ForceOfInterest::constant(0.0);
  std::optional<SurvivalModel> survival;  // required for life contracts
  double issue_age = 0.0;
  // Life contracts default to the limiting age (or the survival
  // truncation point); risk-free contracts must set it.
  std::optional<double> horizon;
  double grid_step = kDefaultGridStep;
};

// Contract end in policy time, capped at the limiting age and resolved
// by survival truncation for open-ended models.
double resolved_horizon(const ValuationRequest& request);

// JSON config: contract kind plus parameters, force of interest,
// mortality reference (life tables by file path), issue_age, optional
// horizon and grid_step.
ValuationRequest load_valuation_request(const std::string& path);

enum class ValuationMethod { quadrature, ode };

class ValuationResult {
 public:
  ValuationMethod method() const { return method_; }
  double grid_step() const { return grid_step_; }
  double horizon() const { return times_.empty() ? 0.0 : times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& prices() const { return prices_; }
  double price_zero() const { return prices_.front(); }
  // Off-grid queries: fresh quadrature for the quadrature method,
  // cubic Hermite dense output for the ODE method.
  double price_at(double t) const;
  // Max |ode - quadrature| over the grid; zero for quadrature results.
  double method_agreement() const { return method_agreement_; }
  std::size_t work() const { return work_; }  // quadrature panels or ODE steps
  const ValuationRequest& request() const { return *request_; }

 private:
  friend class Valuer;
  ValuationMethod method_ = ValuationMethod::quadrature;
  double grid_step_ = kDefaultGridStep;
  std::vector<double> times_;
  std::vector<double> prices_;
  double method_agreement_ = 0.0;
  std::size_t work_ = 0;
  std::shared_ptr<const ValuationRequest> request_;
  std::function<double(double)> point_eval_;
};

// Deterministic bond-style flow: closed-form discounting evaluated by
// quadrature, p(t) = ∫_t^n rate·disc + terminal·disc.
ValuationResult value_risk_free(const ValuationRequest& request);
ValuationResult value_risk_free_ode(const ValuationRequest& request, double grid_step);

// Whole-life insurance: expected discounted death benefit.
ValuationResult value_whole_life_quadrature(const ValuationRequest& request);
ValuationResult value_whole_life_ode(const ValuationRequest& request, double grid_step);

// Life annuity: expected discounted payment stream while alive.
ValuationResult value_annuity_quadrature(const ValuationRequest& request);
ValuationResult value_annuity_ode(const ValuationRequest& request, double grid_step);

// Net single premium of a unit whole-life benefit at constant delta.
double A_bar(const SurvivalModel& model, double age, double delta);
// Expected present value of a unit life annuity at constant delta.
double a_bar(const SurvivalModel& model, double age, double delta);

// Equivalence-principle premium rate: EPV(benefit) / a_bar. Throws
// ZeroAnnuity when the annuity factor vanishes.
double solve_net_premium_rate(const SurvivalModel& model, double age, double delta,
                              const TimeFunction& benefit);

// Relative self-consistency residual of a valuation: each price must
// equal discounted flows to an intermediate date plus the discounted
// price there. Returns the worst residual over the three legs
// (t0,t1), (t1,t2), (t0,t2).
double check_recursion(const ValuationResult& result, double t0, double t1, double t2);

}  // namespace ftap

#endif  // FTAP_VALUATION_HPP
