#include "ftap/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ftap/errors.hpp"
#include "ftap/simplex.hpp"

namespace ftap {
namespace {

void require_well_formed(const PayoffMatrix& market) {
  if (market.assets() == 0 || market.states() == 0)
    throw std::invalid_argument("market has no assets or no states");
  if (market.costs.size() != market.assets())
    throw DimensionMismatch("market: cost vector length != asset count");
  if (!market.payoffs.all_finite() || !all_finite(market.costs))
    throw NonFiniteInput("market: payoff or cost entries are not finite");
}

double market_scale(const PayoffMatrix& market) {
  return std::max(1.0, std::max(market.payoffs.inf_norm(), inf_norm(market.costs)));
}

ArbitrageCertificate certificate_from_weights(const PayoffMatrix& market,
                                              std::vector<double> theta) {
  const double norm = inf_norm(theta);
  if (norm > 0.0)
    for (double& w : theta) w /= norm;
  ArbitrageCertificate cert;
  cert.cost = dot(theta, market.costs);
  cert.state_payoffs = mat_tvec(market.payoffs, theta);
  cert.weights = std::move(theta);
  return cert;
}

bool certificate_valid(const ArbitrageCertificate& cert, double eps) {
  if (cert.weights.empty() || inf_norm(cert.weights) == 0.0) return false;
  if (cert.cost > eps) return false;
  double max_payoff = 0.0;
  for (double p : cert.state_payoffs) {
    if (p < -eps) return false;
    max_payoff = std::max(max_payoff, p);
  }
  return cert.cost < -eps || max_payoff > eps;
}

// LP deciding existence of a strictly positive deflator:
//   maximize t  s.t.  A(z + t.1) = b,  t + u = 1,  z, t, u >= 0.
// Optimal t is the best attainable minimum component of m = z + t.1.
LpSolution solve_interior_lp(const PayoffMatrix& market, double feas_tol) {
  const std::size_t m = market.assets();
  const std::size_t n = market.states();
  LinearProgram lp;
  lp.constraints = Matrix(m + 1, n + 2, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      lp.constraints(i, k) = market.payoffs(i, k);
      row_sum += market.payoffs(i, k);
    }
    lp.constraints(i, n) = row_sum;
  }
  lp.constraints(m, n) = 1.0;
  lp.constraints(m, n + 1) = 1.0;
  lp.rhs = market.costs;
  lp.rhs.push_back(1.0);
  lp.objective.assign(n + 2, 0.0);
  lp.objective[n] = -1.0;  // minimize -t
  return solve_lp(lp, feas_tol);
}

}  // namespace

PayoffMatrix make_market(Matrix payoffs, std::vector<double> costs) {
  PayoffMatrix market;
  market.payoffs = std::move(payoffs);
  market.costs = std::move(costs);
  market.asset_ids.resize(market.assets());
  for (std::size_t i = 0; i < market.assets(); ++i)
    market.asset_ids[i] = "a" + std::to_string(i);
  require_well_formed(market);
  return market;
}

PayoffMatrix make_market_with_risk_free(double rate, Matrix risky_payoffs,
                                        std::vector<double> risky_costs) {
  if (rate <= -1.0) throw std::invalid_argument("risk-free rate must exceed -1");
  const std::size_t m = risky_payoffs.rows();
  const std::size_t n = risky_payoffs.cols();
  Matrix all(m + 1, n, 0.0);
  for (std::size_t k = 0; k < n; ++k) all(0, k) = 1.0 + rate;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k) all(i + 1, k) = risky_payoffs(i, k);
  std::vector<double> costs;
  costs.reserve(m + 1);
  costs.push_back(1.0);
  costs.insert(costs.end(), risky_costs.begin(), risky_costs.end());
  PayoffMatrix market = make_market(std::move(all), std::move(costs));
  market.has_risk_free = true;
  market.risk_free_rate = rate;
  market.asset_ids[0] = "RF";
  return market;
}

PayoffMatrix load_payoff_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open payoff file: " + path);

  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
      const auto l = field.find_first_not_of(" \t\r");
      const auto r = field.find_last_not_of(" \t\r");
      out.push_back(l == std::string::npos ? "" : field.substr(l, r - l + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
  };
  auto parse_num = [](const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
  };

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw std::invalid_argument("payoff file is empty: " + path);
  if (header.size() < 3 || header[0] != "asset" || header.back() != "cost")
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": header must be asset,<states...>,cost");
  const std::size_t n_states = header.size() - 2;

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<double> costs;
  std::ptrdiff_t rf_row = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    std::vector<double> payoff(n_states);
    for (std::size_t k = 0; k < n_states; ++k) payoff[k] = parse_num(fields[k + 1], line_no);
    const double cost = parse_num(fields.back(), line_no);
    if (fields[0] == "RF") {
      if (rf_row >= 0)
        throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate RF row");
      const double gross = payoff[0];
      for (double p : payoff)
        if (std::abs(p - gross) > kFeasTol * (1.0 + std::abs(gross)))
          throw std::invalid_argument("line " + std::to_string(line_no) +
                                      ": RF payoff must be constant across states");
      if (gross <= 0.0)
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": RF gross return must be positive");
      if (std::abs(cost - 1.0) > kFeasTol)
        throw std::invalid_argument("line " + std::to_string(line_no) + ": RF cost must be 1");
      rf_row = static_cast<std::ptrdiff_t>(rows.size());
    }
    ids.push_back(fields[0]);
    rows.push_back(std::move(payoff));
    costs.push_back(cost);
  }
  if (rows.empty()) throw std::invalid_argument("payoff file has no asset rows: " + path);

  if (rf_row > 0) {
    std::swap(ids[0], ids[static_cast<std::size_t>(rf_row)]);
    std::swap(rows[0], rows[static_cast<std::size_t>(rf_row)]);
    std::swap(costs[0], costs[static_cast<std::size_t>(rf_row)]);
  }

  Matrix payoffs(rows.size(), n_states, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < n_states; ++k) payoffs(i, k) = rows[i][k];
  PayoffMatrix market = make_market(std::move(payoffs), std::move(costs));
  market.asset_ids = std::move(ids);
  if (rf_row >= 0) {
    market.has_risk_free = true;
    market.risk_free_rate = market.payoffs(0, 0) - 1.0;
  }
  return market;
}

SdfVector::SdfVector(std::vector<double> values, double tolerance) {
  if (values.empty()) throw std::invalid_argument("SdfVector: empty");
  if (!all_finite(values)) throw NonFiniteInput("SdfVector: non-finite entry");
  for (double v : values)
    if (v < -tolerance) throw std::invalid_argument("SdfVector: negative component");
  values_ = std::move(values);
}

void SdfVector::set_factorization(SdfFactorization f, double tolerance) {
  if (f.probabilities.size() != values_.size() || f.discounts.size() != values_.size())
    throw DimensionMismatch("factorization size mismatch");
  double prob_sum = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (f.probabilities[k] < -tolerance)
      throw std::invalid_argument("factorization: negative probability");
    if (f.discounts[k] <= 0.0) throw std::invalid_argument("factorization: discount must be > 0");
    if (std::abs(f.probabilities[k] * f.discounts[k] - values_[k]) >
        tolerance * (1.0 + std::abs(values_[k])))
      throw std::invalid_argument("factorization does not reproduce the deflator");
    prob_sum += f.probabilities[k];
  }
  if (std::abs(prob_sum - 1.0) > tolerance)
    throw std::invalid_argument("factorization: probabilities must sum to 1");
  factorization_ = std::move(f);
}

MarketDiagnosis detect_arbitrage(const PayoffMatrix& market, double tolerance) {
  require_well_formed(market);
  const double scale = market_scale(market);
  const double eps = tolerance * scale;
  const std::size_t n = market.states();

  const LpSolution lp = solve_interior_lp(market, tolerance);
  if (lp.status == LpStatus::infeasible) {
    // No nonnegative deflator at all; the Farkas duals already price a
    // free lunch with strictly negative cost.
    std::vector<double> theta(lp.duals.begin(), lp.duals.begin() + static_cast<std::ptrdiff_t>(market.assets()));
    for (double& w : theta) w = -w;
    ArbitrageCertificate cert = certificate_from_weights(market, std::move(theta));
    if (!certificate_valid(cert, eps))
      throw DegenerateDichotomy("infeasibility witness failed validation");
    return cert;
  }
  if (lp.status == LpStatus::unbounded)
    throw DegenerateDichotomy("interior LP unbounded; inconsistent market");

  const double t_star = lp.x[n];
  if (t_star > eps) {
    // Strictly positive deflator: m = z + t.1 with margin t*.
    std::vector<double> m(n);
    for (std::size_t k = 0; k < n; ++k) m[k] = lp.x[k] + t_star;
    const std::vector<double> priced = mat_vec(market.payoffs, m);
    double residual = 0.0;
    for (std::size_t i = 0; i < market.assets(); ++i)
      residual = std::max(residual, std::abs(priced[i] - market.costs[i]));
    if (residual > eps * (1.0 + inf_norm(market.costs)))
      throw DegenerateDichotomy("deflator residual too large after interior solve");
    return SdfVector(m, tolerance);
  }

  // The best deflator has a component stuck at (numerical) zero. A
  // cleanly degenerate optimum lands at exactly t = 0; anything merely
  // near zero means the dichotomy is not decidable at this tolerance.
  const double degeneracy_floor = std::max(1e3 * 2.22e-16 * scale, 1e-3 * eps);
  if (t_star > degeneracy_floor)
    throw DegenerateDichotomy("deflator positivity margin below tolerance");

  std::vector<double> theta(lp.duals.begin(), lp.duals.begin() + static_cast<std::ptrdiff_t>(market.assets()));
  for (double& w : theta) w = -w;
  ArbitrageCertificate cert = certificate_from_weights(market, std::move(theta));
  if (!certificate_valid(cert, eps))
    throw DegenerateDichotomy("zero-margin dual failed certificate validation");
  return cert;
}

SdfSolution solve_sdf(const PayoffMatrix& market, double tolerance) {
  require_well_formed(market);
  const double scale = market_scale(market);

  LinearProgram lp;
  lp.constraints = market.payoffs;
  lp.rhs = market.costs;
  lp.objective.assign(market.states(), 0.0);
  const LpSolution sol = solve_lp(lp, tolerance);
  if (sol.status == LpStatus::infeasible)
    throw ArbitrageExists("no nonnegative deflator; run detect_arbitrage for the certificate");

  std::vector<double> m = sol.x;
  for (double& v : m) v = std::max(v, 0.0);  // clear -0 and sub-tolerance noise
  const std::vector<double> priced = mat_vec(market.payoffs, m);
  double residual = 0.0;
  for (std::size_t i = 0; i < market.assets(); ++i)
    residual = std::max(residual, std::abs(priced[i] - market.costs[i]));
  if (residual > tolerance * scale * (1.0 + inf_norm(market.costs)))
    throw ArbitrageExists("deflator residual exceeds tolerance");

  SdfSolution out{SdfVector(std::move(m), tolerance), check_completeness(market), residual};
  return out;
}

bool check_completeness(const PayoffMatrix& market, double rank_tolerance) {
  require_well_formed(market);
  return numerical_rank(market.payoffs, rank_tolerance) == market.states();
}

RiskNeutralMeasure extract_risk_neutral(const SdfVector& sdf, double risk_free_rate,
                                        double tolerance) {
  if (risk_free_rate <= -1.0) throw std::invalid_argument("risk-free rate must exceed -1");
  const double gross = 1.0 + risk_free_rate;
  double sum = 0.0;
  for (double v : sdf.values()) sum += v * gross;
  if (std::abs(sum - 1.0) > tolerance * gross * (1.0 + inf_norm(sdf.values())))
    throw NotNormalizable("deflator does not normalize at this risk-free rate; probabilities sum to " +
                          std::to_string(sum));
  RiskNeutralMeasure rn;
  rn.discount = 1.0 / gross;
  rn.probabilities.reserve(sdf.values().size());
  for (double v : sdf.values()) rn.probabilities.push_back(v * gross);
  return rn;
}

double price_one_step(const SdfVector& sdf, const std::vector<double>& payoff,
                      const std::vector<double>& dividend) {
  if (payoff.size() != sdf.values().size() || dividend.size() != sdf.values().size())
    throw DimensionMismatch("price_one_step: state-count mismatch");
  if (!all_finite(payoff) || !all_finite(dividend))
    throw NonFiniteInput("price_one_step: non-finite input");
  double price = 0.0;
  for (std::size_t k = 0; k < payoff.size(); ++k)
    price += sdf.values()[k] * (payoff[k] + dividend[k]);
  return price;
}

}  // namespace ftap
