#ifndef FTAP_ERRORS_HPP
#define FTAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ftap {

// Base class for all domain errors thrown by the pricing library.
// Input/shape problems throw std::invalid_argument instead.
class PricingError : public std::runtime_error {
 public:
  explicit PricingError(const std::string& what) : std::runtime_error(what) {}
};

// A matrix, vector, or scalar input contains NaN or infinity.
class NonFiniteInput : public PricingError {
 public:
  explicit NonFiniteInput(const std::string& what) : PricingError(what) {}
};

// The LP terminated so close to the feasible/infeasible boundary that
// neither a strictly positive deflator nor a strict arbitrage can be
// certified at the requested tolerance.
class DegenerateDichotomy : public PricingError {
 public:
  explicit DegenerateDichotomy(const std::string& what) : PricingError(what) {}
};

// solve_sdf was called on a market with no nonnegative deflator; run
// detect_arbitrage to obtain the certificate.
class ArbitrageExists : public PricingError {
 public:
  explicit ArbitrageExists(const std::string& what) : PricingError(what) {}
};

// Vector or matrix dimensions do not line up.
class DimensionMismatch : public PricingError {
 public:
  explicit DimensionMismatch(const std::string& what) : PricingError(what) {}
};

// The deflator cannot be split into probabilities times a common
// discount at the supplied risk-free rate.
class NotNormalizable : public PricingError {
 public:
  explicit NotNormalizable(const std::string& what) : PricingError(what) {}
};

// A one-step deflator on a tree edge is negative.
class NegativeSdf : public PricingError {
 public:
  explicit NegativeSdf(const std::string& what) : PricingError(what) {}
};

// A node id does not exist in the tree.
class UnknownNode : public PricingError {
 public:
  explicit UnknownNode(const std::string& what) : PricingError(what) {}
};

// Backward induction was requested but some leaf has no price.
class MissingTerminalPrices : public PricingError {
 public:
  explicit MissingTerminalPrices(const std::string& what) : PricingError(what) {}
};

// The cumulative deflator at the conditioning node is zero, so the
// deflated conditional value is undefined there.
class ZeroKernel : public PricingError {
 public:
  explicit ZeroKernel(const std::string& what) : PricingError(what) {}
};

// A survival quantity was requested at or beyond the limiting age.
class DeadCohort : public PricingError {
 public:
  explicit DeadCohort(const std::string& what) : PricingError(what) {}
};

// The ODE grid is too coarse: the integrated path disagrees with the
// quadrature valuation beyond the step-dependent tolerance.
class StepTooLarge : public PricingError {
 public:
  explicit StepTooLarge(const std::string& what) : PricingError(what) {}
};

// The annuity factor in a premium calculation is zero.
class ZeroAnnuity : public PricingError {
 public:
  explicit ZeroAnnuity(const std::string& what) : PricingError(what) {}
};

}  // namespace ftap

#endif  // FTAP_ERRORS_HPP
