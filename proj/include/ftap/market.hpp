#ifndef FTAP_MARKET_HPP
#define FTAP_MARKET_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ftap/linalg.hpp"

namespace ftap {

// Constraint-residual tolerance, scaled by the payoff matrix norm at
// the point of use.
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kRankTol = 1e-10;

// One-step market: payoffs(j, k) pays asset j in state k, costs[j] is
// its time-zero price. When a risk-free asset is present it sits in
// row 0, constant across states at 1 + risk_free_rate, with cost 1.
struct PayoffMatrix {
  Matrix payoffs;                  // assets x states
  std::vector<double> costs;       // per asset
  std::vector<std::string> asset_ids;
  bool has_risk_free = false;
  double risk_free_rate = 0.0;

  std::size_t assets() const { return payoffs.rows(); }
  std::size_t states() const { return payoffs.cols(); }
};

PayoffMatrix make_market(Matrix payoffs, std::vector<double> costs);
PayoffMatrix make_market_with_risk_free(double rate, Matrix risky_payoffs,
                                        std::vector<double> risky_costs);

// Header `asset,s1,...,sn,cost`; a row with id RF is the risk-free
// asset and is moved to row 0. Parse problems throw
// std::invalid_argument with the offending line number.
PayoffMatrix load_payoff_csv(const std::string& path);

struct SdfFactorization {
  std::vector<double> probabilities;  // nonnegative, sums to 1
  std::vector<double> discounts;      // strictly positive per state
};

// State-price deflator: values[k] prices one unit of state-k payoff.
class SdfVector {
 public:
  explicit SdfVector(std::vector<double> values, double tolerance = kFeasTol);

  const std::vector<double>& values() const { return values_; }
  const std::optional<SdfFactorization>& factorization() const { return factorization_; }
  // Requires probabilities[k] * discounts[k] == values[k] within tolerance.
  void set_factorization(SdfFactorization f, double tolerance = kFeasTol);

 private:
  std::vector<double> values_;
  std::optional<SdfFactorization> factorization_;
};

// Portfolio weights theta with nonpositive cost, nonnegative payoff in
// every state, and at least one strict inequality: a free lunch.
struct ArbitrageCertificate {
  std::vector<double> weights;
  double cost = 0.0;
  std::vector<double> state_payoffs;  // payoffs^T . weights
};

// Exactly one of the two outcomes, by the Farkas alternative extended
// to zero-cost lotteries: either a strictly positive deflator prices
// every asset, or some portfolio is an arbitrage.
using MarketDiagnosis = std::variant<ArbitrageCertificate, SdfVector>;

MarketDiagnosis detect_arbitrage(const PayoffMatrix& market, double tolerance = kFeasTol);

struct SdfSolution {
  SdfVector sdf;
  bool unique = false;      // true when the market is complete
  double residual = 0.0;    // inf-norm of payoffs . m - costs
};

// Basic feasible deflator with m >= 0, or ArbitrageExists when none
// exists. Unlike detect_arbitrage this accepts deflators with zero
// components, so a free lottery still solves.
SdfSolution solve_sdf(const PayoffMatrix& market, double tolerance = kFeasTol);

// Column rank of the payoff matrix equals the number of states.
bool check_completeness(const PayoffMatrix& market, double rank_tolerance = kRankTol);

struct RiskNeutralMeasure {
  std::vector<double> probabilities;
  double discount = 0.0;  // 1 / (1 + risk_free_rate)
};

// Split m_k = pi_k / (1 + r). Requires the deflator to be consistent
// with the rate: sum_k m_k (1 + r) = 1 within tolerance.
RiskNeutralMeasure extract_risk_neutral(const SdfVector& sdf, double risk_free_rate,
                                        double tolerance = kFeasTol);

// Price of one payoff vector plus its dividend under the deflator.
double price_one_step(const SdfVector& sdf, const std::vector<double>& payoff,
                      const std::vector<double>& dividend);

}  // namespace ftap

#endif  // FTAP_MARKET_HPP
