#ifndef FTAP_QUADRATURE_HPP
#define FTAP_QUADRATURE_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace ftap {

struct IntegrationResult {
  double value = 0.0;
  std::size_t panels = 0;  // Simpson panels used at the accepted level
};

struct IntegrationOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_panels = std::size_t{1} << 20;
};

// Integrate f over [a, b] by composite Simpson with panel doubling and
// Richardson extrapolation of the last two levels. The interval is cut
// at the supplied breakpoints first so each piece sees a smooth
// integrand; refinement stops when successive Simpson estimates agree
// to rel_tol (plus abs_tol floor) or the panel budget is exhausted.
IntegrationResult integrate(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& breakpoints = {},
                            const IntegrationOptions& opt = {});

}  // namespace ftap

#endif  // FTAP_QUADRATURE_HPP
