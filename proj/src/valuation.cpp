#include "ftap/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ftap/errors.hpp"
#include "ftap/quadrature.hpp"
#include "json.hpp"

namespace ftap {
namespace {

constexpr double kTimeEps = 1e-9;

double eval_polynomial(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
  return acc;
}

}  // namespace

TimeFunction TimeFunction::constant(double value) {
  TimeFunction f;
  f.kind_ = Kind::constant;
  f.values_ = {value};
  return f;
}

TimeFunction TimeFunction::piecewise(std::vector<double> breakpoints, std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1)
    throw std::invalid_argument("piecewise function needs one more value than breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw std::invalid_argument("piecewise breakpoints must be sorted");
  TimeFunction f;
  f.kind_ = Kind::piecewise;
  f.breakpoints_ = std::move(breakpoints);
  f.values_ = std::move(values);
  return f;
}

TimeFunction TimeFunction::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("polynomial needs coefficients");
  TimeFunction f;
  f.kind_ = Kind::polynomial;
  f.values_ = std::move(coefficients);
  return f;
}

double TimeFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::constant:
      return values_[0];
    case Kind::piecewise: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
      return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }
    case Kind::polynomial:
      return eval_polynomial(values_, t);
  }
  return 0.0;
}

double TimeFunction::constant_value() const {
  if (kind_ != Kind::constant) throw std::invalid_argument("function is not constant");
  return values_[0];
}

ForceOfInterest ForceOfInterest::constant(double delta) {
  ForceOfInterest f;
  f.kind_ = Kind::constant;
  f.values_ = {delta};
  return f;
}

ForceOfInterest ForceOfInterest::piecewise(std::vector<double> breakpoints,
                                           std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1)
    throw std::invalid_argument("piecewise force of interest needs one more value than breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw std::invalid_argument("piecewise breakpoints must be sorted");
  ForceOfInterest f;
  f.kind_ = Kind::piecewise;
  f.breakpoints_ = std::move(breakpoints);
  f.values_ = std::move(values);
  return f;
}

ForceOfInterest ForceOfInterest::curve(std::function<double(double)> rate) {
  if (!rate) throw std::invalid_argument("force of interest curve must be callable");
  ForceOfInterest f;
  f.kind_ = Kind::curve;
  f.curve_ = std::move(rate);
  return f;
}

double ForceOfInterest::rate(double t) const {
  switch (kind_) {
    case Kind::constant:
      return values_[0];
    case Kind::piecewise: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
      return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }
    case Kind::curve:
      return curve_(t);
  }
  return 0.0;
}

double ForceOfInterest::integral(double a, double b) const {
  if (a > b) return -integral(b, a);
  switch (kind_) {
    case Kind::constant:
      return values_[0] * (b - a);
    case Kind::piecewise: {
      double acc = 0.0;
      double lo = a;
      for (std::size_t i = 0; i <= breakpoints_.size(); ++i) {
        const double hi =
            i < breakpoints_.size() ? std::min(breakpoints_[i], b) : b;
        if (hi > lo) acc += values_[i] * (hi - lo);
        lo = std::max(lo, hi);
        if (lo >= b) break;
      }
      return acc;
    }
    case Kind::curve:
      return integrate(curve_, a, b, {}, {1e-12, 1e-15, 1 << 16}).value;
  }
  return 0.0;
}

double ForceOfInterest::constant_value() const {
  if (kind_ != Kind::constant) throw std::invalid_argument("force of interest is not constant");
  return values_[0];
}

Contract Contract::whole_life(TimeFunction benefit) {
  Contract c;
  c.kind = ContractKind::whole_life;
  c.benefit = std::move(benefit);
  return c;
}

Contract Contract::continuous_annuity(TimeFunction payment_rate) {
  Contract c;
  c.kind = ContractKind::continuous_annuity;
  c.payment_rate = std::move(payment_rate);
  return c;
}

Contract Contract::risk_free(TimeFunction payment_rate, double terminal_value) {
  Contract c;
  c.kind = ContractKind::risk_free;
  c.payment_rate = std::move(payment_rate);
  c.terminal_value = terminal_value;
  return c;
}

namespace {

double truncation_point(const SurvivalModel& model, double age) {
  double hi = 1.0;
  while (model.survival_probability(age, hi) > kTruncationSurvival) {
    hi *= 2.0;
    if (hi > 1e7)
      throw std::invalid_argument(
          "survival does not decay below the truncation threshold; supply a horizon");
  }
  double lo = hi * 0.5;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (model.survival_probability(age, mid) > kTruncationSurvival)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace

double resolved_horizon(const ValuationRequest& request) {
  if (request.contract.kind == ContractKind::risk_free) {
    if (!request.horizon) throw std::invalid_argument("risk-free valuation needs a horizon");
    if (!(*request.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    return *request.horizon;
  }
  if (!request.survival)
    throw std::invalid_argument("life-contingent valuation needs a survival model");
  const SurvivalModel& model = *request.survival;
  // Also validates that the cohort is alive at the issue age.
  model.survival_probability(request.issue_age, 0.0);
  const double limit = model.limiting_age() - request.issue_age;
  double h;
  if (request.horizon) {
    if (!(*request.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    h = std::min(*request.horizon, limit);
  } else if (std::isfinite(limit)) {
    h = limit;
  } else {
    h = truncation_point(model, request.issue_age);
  }
  if (!(h > 0.0)) throw DeadCohort("contract horizon is empty at this issue age");
  return h;
}

// Shared machinery behind both valuation routes. All times are policy
// times; discounting and survival are always measured from the first
// argument.
class Valuer {
 public:
  Valuer(const ValuationRequest& request)
      : request_(std::make_shared<ValuationRequest>(request)), horizon_(resolved_horizon(request)) {}

  double horizon() const { return horizon_; }

  double discount(double a, double b) const { return std::exp(-request_->foi.integral(a, b)); }

  double survival(double a, double b) const {
    if (request_->contract.kind == ContractKind::risk_free) return 1.0;
    if (b >= horizon_ + kTimeEps) return 0.0;
    return request_->survival->survival_probability(request_->issue_age + a, b - a);
  }

  // Present value at time a of the flow at time u (benefit outgo
  // density for insurance, survival-weighted payment rate for the
  // annuity, plain payment rate for the bond).
  double flow_present_value(double a, double u) const {
    const ValuationRequest& q = *request_;
    switch (q.contract.kind) {
      case ContractKind::whole_life:
        return q.contract.benefit(u) * discount(a, u) *
               q.survival->death_density(q.issue_age + a, u - a);
      case ContractKind::continuous_annuity:
        return q.contract.payment_rate(u) * discount(a, u) *
               q.survival->survival_probability(q.issue_age + a, u - a);
      case ContractKind::risk_free:
        return q.contract.payment_rate(u) * discount(a, u);
    }
    return 0.0;
  }

  std::vector<double> integration_breakpoints() const {
    std::vector<double> cuts = request_->foi.breakpoints();
    const TimeFunction& tf = request_->contract.kind == ContractKind::whole_life
                                 ? request_->contract.benefit
                                 : request_->contract.payment_rate;
    cuts.insert(cuts.end(), tf.breakpoints().begin(), tf.breakpoints().end());
    if (request_->survival) {
      const std::vector<double> hz =
          request_->survival->hazard_breakpoints(request_->issue_age, horizon_);
      cuts.insert(cuts.end(), hz.begin(), hz.end());
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
  }

  double terminal_value() const {
    return request_->contract.kind == ContractKind::risk_free ? request_->contract.terminal_value
                                                              : 0.0;
  }

  // One-shot valuation at an arbitrary time by quadrature over the
  // remaining flows plus the discounted terminal value.
  double price_by_quadrature(double t, std::size_t* panels = nullptr) const {
    if (t >= horizon_ - kTimeEps) return terminal_value();
    if (t < 0.0) throw std::invalid_argument("valuation time precedes issue");
    if (request_->contract.kind == ContractKind::whole_life &&
        survival(0.0, t) <= 0.0)
      return 0.0;
    const IntegrationResult r =
        integrate([this, t](double u) { return flow_present_value(t, u); }, t, horizon_,
                  integration_breakpoints(), {1e-12, 1e-16, std::size_t{1} << 20});
    if (panels) *panels += r.panels;
    return r.value + terminal_value() * discount(t, horizon_) * survival(t, horizon_);
  }

  std::vector<double> make_grid(double step) const {
    const auto n = static_cast<std::size_t>(
        std::max(1.0, std::ceil(horizon_ / step - kTimeEps)));
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      times[i] = horizon_ * static_cast<double>(i) / static_cast<double>(n);
    times[n] = horizon_;
    return times;
  }

  // Backward panel recursion: each price is the panel's discounted
  // flows plus the discounted, survival-weighted next price. This
  // telescopes into the one-shot integral but costs one small
  // quadrature per panel instead of one long one per grid point.
  std::vector<double> quadrature_path(const std::vector<double>& times,
                                      std::size_t* panels = nullptr) const {
    const std::vector<double> cuts = integration_breakpoints();
    std::vector<double> prices(times.size(), 0.0);
    prices.back() = terminal_value();
    for (std::size_t i = times.size() - 1; i-- > 0;) {
      const double a = times[i];
      const double b = times[i + 1];
      const IntegrationResult r =
          integrate([this, a](double u) { return flow_present_value(a, u); }, a, b, cuts,
                    {1e-12, 1e-18, 1024});
      if (panels) *panels += r.panels;
      prices[i] = r.value + prices[i + 1] * discount(a, b) * survival(a, b);
    }
    return prices;
  }

  struct OdePath {
    std::vector<double> state;  // p, or v = p * survival on singular domains
    std::vector<double> deriv;  // d(state)/dt at the grid nodes
    std::vector<double> prices;
    bool weighted = false;
  };

  // Classical fixed-step RK4 integrating backward from the terminal
  // condition. When the hazard blows up at the far end (finite
  // limiting age), the survival-weighted state v = p * S keeps the
  // right-hand side finite; elsewhere the raw reserve equation is
  // integrated directly.
  //
  // Piecewise inputs jump at grid nodes, and the two stage
  // evaluations landing on an interval endpoint must read the side
  // valid inside that interval; each such component gets its stage
  // time pulled a hair into the interior. Smooth components keep the
  // exact stage times so nothing disturbs fourth-order convergence.
  OdePath ode_path(const std::vector<double>& times) const {
    const ValuationRequest& q = *request_;
    OdePath out;
    out.weighted = q.contract.kind != ContractKind::risk_free &&
                   std::isfinite(q.survival->limiting_age()) &&
                   q.issue_age + horizon_ >= q.survival->limiting_age() - kTimeEps;

    const TimeFunction& flow_fn = q.contract.kind == ContractKind::whole_life
                                      ? q.contract.benefit
                                      : q.contract.payment_rate;
    const bool foi_jumps = !q.foi.breakpoints().empty();
    const bool flow_jumps = !flow_fn.breakpoints().empty();
    const bool mort_jumps =
        q.survival && q.survival->kind() == SurvivalModel::Kind::life_table;

    // One interval at a time; inner() nudges jumping components off
    // the endpoints of the interval currently being stepped.
    double lo = 0.0;
    double hi = 0.0;
    const auto inner = [&lo, &hi](double t) {
      const double xi = 1e-9 * (hi - lo);
      return std::clamp(t, lo + xi, hi - xi);
    };
    const auto delta_at = [&](double t) { return q.foi.rate(foi_jumps ? inner(t) : t); };
    const auto flow_at = [&](double t) { return flow_fn(flow_jumps ? inner(t) : t); };
    const auto mort_time = [&](double t) { return mort_jumps ? inner(t) : t; };

    std::function<double(double, double)> rhs;
    if (out.weighted) {
      // v' = delta v - g with g the survival-weighted outgo density.
      rhs = [&, this](double t, double v) {
        const double tm = mort_time(t);
        const double g =
            q.contract.kind == ContractKind::whole_life
                ? flow_at(t) * q.survival->death_density(q.issue_age, tm)
                : flow_at(t) * q.survival->survival_probability(q.issue_age, tm);
        return delta_at(t) * v - g;
      };
    } else if (q.contract.kind == ContractKind::risk_free) {
      rhs = [&](double t, double p) { return delta_at(t) * p - flow_at(t); };
    } else if (q.contract.kind == ContractKind::whole_life) {
      rhs = [&](double t, double p) {
        const double mu = q.survival->force_of_mortality(q.issue_age + mort_time(t));
        return (delta_at(t) + mu) * p - mu * flow_at(t);
      };
    } else {
      rhs = [&](double t, double p) {
        const double mu = q.survival->force_of_mortality(q.issue_age + mort_time(t));
        return (delta_at(t) + mu) * p - flow_at(t);
      };
    }

    const std::size_t n = times.size() - 1;
    out.state.assign(n + 1, 0.0);
    out.state[n] = out.weighted ? 0.0 : terminal_value();
    for (std::size_t i = n; i-- > 0;) {
      lo = times[i];
      hi = times[i + 1];
      const double dt = lo - hi;  // negative
      const double y = out.state[i + 1];
      const double k1 = rhs(hi, y);
      const double k2 = rhs(hi + 0.5 * dt, y + 0.5 * dt * k1);
      const double k3 = rhs(hi + 0.5 * dt, y + 0.5 * dt * k2);
      const double k4 = rhs(lo, y + dt * k3);
      out.state[i] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.deriv.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      lo = i == 0 ? times[0] : times[i - 1];
      hi = i == 0 ? times[1] : times[i];
      out.deriv[i] = rhs(times[i], out.state[i]);
    }

    out.prices = out.state;
    if (out.weighted) {
      for (std::size_t i = 0; i < n; ++i) {
        const double s = q.survival->survival_probability(q.issue_age, times[i]);
        out.prices[i] = out.state[i] / s;
      }
      out.prices[n] = 0.0;
    }
    return out;
  }

  ValuationResult quadrature_result(double grid_step) const {
    ValuationResult res;
    res.method_ = ValuationMethod::quadrature;
    res.times_ = make_grid(grid_step);
    res.grid_step_ = res.times_[1] - res.times_[0];
    std::size_t panels = 0;
    res.prices_ = quadrature_path(res.times_, &panels);
    res.work_ = panels;
    res.request_ = request_;
    auto self = std::make_shared<Valuer>(*this);
    res.point_eval_ = [self](double t) { return self->price_by_quadrature(t); };
    return res;
  }

  ValuationResult ode_result(double grid_step) const {
    ValuationResult res;
    res.method_ = ValuationMethod::ode;
    res.times_ = make_grid(grid_step);
    res.grid_step_ = res.times_[1] - res.times_[0];
    const OdePath path = ode_path(res.times_);
    res.prices_ = path.prices;
    res.work_ = res.times_.size() - 1;
    res.request_ = request_;

    const std::vector<double> reference = quadrature_path(res.times_);
    double dev = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
      dev = std::max(dev, std::abs(res.prices_[i] - reference[i]));
      scale = std::max(scale, std::abs(reference[i]));
    }
    res.method_agreement_ = dev;
    const double h = res.grid_step_;
    const double allowed = std::max(1e-6, 10.0 * h * h * h * h) * scale;
    if (dev > allowed)
      throw StepTooLarge("ODE grid step " + std::to_string(h) + " deviates from quadrature by " +
                         std::to_string(dev) + " (allowed " + std::to_string(allowed) + ")");

    auto self = std::make_shared<Valuer>(*this);
    auto times = std::make_shared<std::vector<double>>(res.times_);
    auto state = std::make_shared<std::vector<double>>(path.state);
    auto deriv = std::make_shared<std::vector<double>>(path.deriv);
    const bool weighted = path.weighted;
    res.point_eval_ = [self, times, state, deriv, weighted](double t) {
      const std::vector<double>& ts = *times;
      t = std::clamp(t, ts.front(), ts.back());
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - ts.begin() - 1, 0));
      i = std::min(i, ts.size() - 2);
      const double width = ts[i + 1] - ts[i];
      const double theta = (t - ts[i]) / width;
      const double h00 = (1.0 + 2.0 * theta) * (1.0 - theta) * (1.0 - theta);
      const double h10 = theta * (1.0 - theta) * (1.0 - theta);
      const double h01 = theta * theta * (3.0 - 2.0 * theta);
      const double h11 = theta * theta * (theta - 1.0);
      const double y = h00 * (*state)[i] + h10 * width * (*deriv)[i] + h01 * (*state)[i + 1] +
                       h11 * width * (*deriv)[i + 1];
      if (!weighted) return y;
      if (t >= ts.back() - kTimeEps) return 0.0;
      const ValuationRequest& q = self->request();
      return y / q.survival->survival_probability(q.issue_age, t);
    };
    return res;
  }

  const ValuationRequest& request() const { return *request_; }
  std::shared_ptr<const ValuationRequest> request_ptr() const { return request_; }

 private:
  std::shared_ptr<const ValuationRequest> request_;
  double horizon_;
};

double ValuationResult::price_at(double t) const {
  if (!point_eval_) throw std::logic_error("empty ValuationResult");
  return point_eval_(t);
}

namespace {

void require_kind(const ValuationRequest& request, ContractKind kind, const char* op) {
  if (request.contract.kind != kind)
    throw std::invalid_argument(std::string(op) + ": wrong contract kind for this valuation");
}

}  // namespace

ValuationResult value_risk_free(const ValuationRequest& request) {
  require_kind(request, ContractKind::risk_free, "value_risk_free");
  return Valuer(request).quadrature_result(request.grid_step);
}

ValuationResult value_risk_free_ode(const ValuationRequest& request, double grid_step) {
  require_kind(request, ContractKind::risk_free, "value_risk_free_ode");
  return Valuer(request).ode_result(grid_step);
}

ValuationResult value_whole_life_quadrature(const ValuationRequest& request) {
  require_kind(request, ContractKind::whole_life, "value_whole_life_quadrature");
  return Valuer(request).quadrature_result(request.grid_step);
}

ValuationResult value_whole_life_ode(const ValuationRequest& request, double grid_step) {
  require_kind(request, ContractKind::whole_life, "value_whole_life_ode");
  return Valuer(request).ode_result(grid_step);
}

ValuationResult value_annuity_quadrature(const ValuationRequest& request) {
  require_kind(request, ContractKind::continuous_annuity, "value_annuity_quadrature");
  return Valuer(request).quadrature_result(request.grid_step);
}

ValuationResult value_annuity_ode(const ValuationRequest& request, double grid_step) {
  require_kind(request, ContractKind::continuous_annuity, "value_annuity_ode");
  return Valuer(request).ode_result(grid_step);
}

double A_bar(const SurvivalModel& model, double age, double delta) {
  ValuationRequest req;
  req.contract = Contract::whole_life(TimeFunction::constant(1.0));
  req.foi = ForceOfInterest::constant(delta);
  req.survival = model;
  req.issue_age = age;
  return Valuer(req).price_by_quadrature(0.0);
}

double a_bar(const SurvivalModel& model, double age, double delta) {
  ValuationRequest req;
  req.contract = Contract::continuous_annuity(TimeFunction::constant(1.0));
  req.foi = ForceOfInterest::constant(delta);
  req.survival = model;
  req.issue_age = age;
  return Valuer(req).price_by_quadrature(0.0);
}

double solve_net_premium_rate(const SurvivalModel& model, double age, double delta,
                              const TimeFunction& benefit) {
  ValuationRequest req;
  req.contract = Contract::whole_life(benefit);
  req.foi = ForceOfInterest::constant(delta);
  req.survival = model;
  req.issue_age = age;
  const double benefits = Valuer(req).price_by_quadrature(0.0);
  const double annuity = a_bar(model, age, delta);
  if (annuity <= 1e-12) throw ZeroAnnuity("annuity factor vanishes; premium undefined");
  return benefits / annuity;
}

double check_recursion(const ValuationResult& result, double t0, double t1, double t2) {
  const Valuer valuer(result.request());
  const double h = valuer.horizon();
  if (!(0.0 <= t0 && t0 <= t1 && t1 <= t2 && t2 <= h + kTimeEps))
    throw std::invalid_argument("check_recursion needs 0 <= t0 <= t1 <= t2 <= horizon");

  const std::vector<double> cuts = valuer.integration_breakpoints();
  double worst = 0.0;
  const std::pair<double, double> legs[3] = {{t0, t1}, {t1, t2}, {t0, t2}};
  for (const auto& [a, b] : legs) {
    if (b - a < 1e-14) continue;
    const double flows =
        integrate([&valuer, a](double u) { return valuer.flow_present_value(a, u); }, a, b, cuts,
                  {1e-12, 1e-16, std::size_t{1} << 20})
            .value;
    const double pa = result.price_at(a);
    const double pb = result.price_at(b);
    const double residual =
        std::abs(pa - (flows + pb * valuer.discount(a, b) * valuer.survival(a, b)));
    worst = std::max(worst, residual / (1.0 + std::abs(pa)));
  }
  return worst;
}

namespace {

TimeFunction parse_time_function(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return TimeFunction::constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument(where + ": expected a number or {kind: ...}");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") return TimeFunction::constant(j.at("value").get<double>());
  if (kind == "piecewise_constant")
    return TimeFunction::piecewise(j.at("breakpoints").get<std::vector<double>>(),
                                   j.at("values").get<std::vector<double>>());
  if (kind == "polynomial")
    return TimeFunction::polynomial(j.at("coefficients").get<std::vector<double>>());
  throw std::invalid_argument(where + ": unknown function kind '" + kind + "'");
}

ForceOfInterest parse_foi(const nlohmann::json& j) {
  if (j.is_number()) return ForceOfInterest::constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("foi: expected a number or {kind: ...}");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") return ForceOfInterest::constant(j.at("delta").get<double>());
  if (kind == "piecewise_constant")
    return ForceOfInterest::piecewise(j.at("breakpoints").get<std::vector<double>>(),
                                      j.at("values").get<std::vector<double>>());
  throw std::invalid_argument("foi: unknown kind '" + kind + "'");
}

SurvivalModel parse_mortality(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("mortality: expected {kind: ...}");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant_fom") return SurvivalModel::constant_force(j.at("mu").get<double>());
  if (kind == "de_moivre") return SurvivalModel::de_moivre(j.at("omega").get<double>());
  if (kind == "gompertz")
    return SurvivalModel::gompertz(j.at("b").get<double>(), j.at("c").get<double>());
  if (kind == "life_table")
    return SurvivalModel::from_life_table(load_life_table_csv(j.at("path").get<std::string>()));
  throw std::invalid_argument("mortality: unknown kind '" + kind + "'");
}

}  // namespace

ValuationRequest load_valuation_request(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open valuation config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("valuation config is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object() || !doc.contains("contract"))
    throw std::invalid_argument("valuation config needs a contract block");

  ValuationRequest req;
  const nlohmann::json& c = doc["contract"];
  const std::string kind = c.at("kind").get<std::string>();
  if (kind == "whole_life") {
    req.contract = Contract::whole_life(parse_time_function(c.at("benefit"), "contract.benefit"));
  } else if (kind == "continuous_annuity") {
    req.contract = Contract::continuous_annuity(
        parse_time_function(c.at("payment_rate"), "contract.payment_rate"));
  } else if (kind == "risk_free") {
    req.contract = Contract::risk_free(
        parse_time_function(c.at("payment_rate"), "contract.payment_rate"),
        c.value("terminal_value", 0.0));
  } else {
    throw std::invalid_argument("contract: unknown kind '" + kind + "'");
  }
  if (!doc.contains("foi")) throw std::invalid_argument("valuation config needs a foi block");
  req.foi = parse_foi(doc["foi"]);
  if (doc.contains("mortality")) req.survival = parse_mortality(doc["mortality"]);
  req.issue_age = doc.value("issue_age", 0.0);
  if (doc.contains("horizon")) req.horizon = doc["horizon"].get<double>();
  req.grid_step = doc.value("grid_step", kDefaultGridStep);
  if (!(req.grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  return req;
}

}  // namespace ftap
