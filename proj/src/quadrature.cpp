#include "ftap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftap {
namespace {

// Simpson ladder on one smooth piece, built from doubled trapezoid
// sums so every function value is used once. The right endpoint is
// sampled a hair inside the piece: integrands cut at breakpoints are
// right-continuous, so the closed endpoint would read the next piece
// and degrade the ladder to linear convergence.
IntegrationResult refine_piece(const std::function<double(double)>& f, double a, double b,
                               const IntegrationOptions& opt, std::size_t budget) {
  const double width = b - a;
  const double right = b - std::max(1e-9 * width, 3e-12);
  double trap_prev = 0.5 * width * (f(a) + f(right > a ? right : b));
  double simpson_prev = 0.0;
  bool have_simpson = false;
  std::size_t intervals = 1;

  IntegrationResult out;
  out.value = trap_prev;
  out.panels = 1;
  while (intervals < 2 * budget) {
    const std::size_t mids = intervals;
    const double h = width / static_cast<double>(2 * intervals);
    double mid_sum = 0.0;
    for (std::size_t k = 0; k < mids; ++k)
      mid_sum += f(a + h * static_cast<double>(2 * k + 1));
    const double trap = 0.5 * trap_prev + h * mid_sum;
    const double simpson = (4.0 * trap - trap_prev) / 3.0;
    intervals *= 2;

    if (have_simpson) {
      out.value = simpson + (simpson - simpson_prev) / 15.0;
      out.panels = intervals / 2;  // one Simpson panel spans two intervals
      const double diff = std::abs(simpson - simpson_prev);
      if (diff <= opt.rel_tol * std::abs(simpson) + opt.abs_tol) return out;
    } else {
      out.value = simpson;
      out.panels = intervals / 2;
    }
    simpson_prev = simpson;
    have_simpson = true;
    trap_prev = trap;
  }
  return out;  // budget exhausted; best available estimate
}

}  // namespace

IntegrationResult integrate(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& breakpoints,
                            const IntegrationOptions& opt) {
  if (!(a <= b)) throw std::invalid_argument("integrate: reversed interval");
  IntegrationResult total;
  if (a == b) return total;

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) <= 1e-14 * (1.0 + std::abs(x)); }),
             cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // Fair share of what is left, so one stubborn piece cannot starve
    // the rest of the interval down to a bare trapezoid.
    const std::size_t used = std::min(total.panels, opt.max_panels);
    const std::size_t share = (opt.max_panels - used) / (cuts.size() - 1 - i);
    const IntegrationResult piece =
        refine_piece(f, cuts[i], cuts[i + 1], opt, std::max<std::size_t>(share, 16));
    total.value += piece.value;
    total.panels += piece.panels;
  }
  return total;
}

}  // namespace ftap
