#ifndef FTAP_SIMPLEX_HPP
#define FTAP_SIMPLEX_HPP

#include <vector>

#include "ftap/linalg.hpp"

namespace ftap {

// Standard-form linear program:  minimize c.x  subject to  A x = b, x >= 0.
struct LinearProgram {
  Matrix constraints;             // r x n
  std::vector<double> rhs;        // r
  std::vector<double> objective;  // n
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  std::vector<double> x;      // primal point (optimal status only)
  double objective = 0.0;
  // Dual vector for the original row order.
  //   optimal:    y with y.A_j <= c_j for every column and y.b = c.x
  //   infeasible: Farkas witness with y.A_j <= 0 for every column, y.b > 0
  std::vector<double> duals;
  double infeasibility = 0.0;  // phase-1 optimum (sum of artificials)
};

// Two-phase dense tableau simplex with Bland's rule, so it cannot
// cycle. Intended for small dense programs (tens of rows/columns).
LpSolution solve_lp(const LinearProgram& lp, double feas_tol = 1e-9);

}  // namespace ftap

#endif  // FTAP_SIMPLEX_HPP
