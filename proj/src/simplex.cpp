#include "ftap/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftap {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr std::size_t kIterationCap = 20000;

struct Tableau {
  std::size_t nrows = 0;
  std::size_t nreal = 0;        // real columns; artificials follow at nreal..nreal+nrows-1
  Matrix t;                     // nrows x (nreal + nrows + 1), last column = rhs
  std::vector<int> basis;       // basic column per row
  std::vector<char> active;     // rows dropped as redundant are deactivated
  std::vector<double> cost;     // reduced-cost row over all columns
  double objective = 0.0;

  std::size_t rhs_col() const { return nreal + nrows; }

  void pivot(std::size_t prow, std::size_t pcol) {
    const std::size_t width = rhs_col() + 1;
    const double p = t(prow, pcol);
    for (std::size_t j = 0; j < width; ++j) t(prow, j) /= p;
    t(prow, pcol) = 1.0;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i == prow || !active[i]) continue;
      const double f = t(i, pcol);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t(i, j) -= f * t(prow, j);
      t(i, pcol) = 0.0;
    }
    const double fc = cost[pcol];
    if (fc != 0.0) {
      for (std::size_t j = 0; j < width - 1; ++j) cost[j] -= fc * t(prow, j);
      objective += fc * t(prow, rhs_col());
      cost[pcol] = 0.0;
    }
    basis[prow] = static_cast<int>(pcol);
  }

  // Bland's rule: enter the lowest-index improving column, leave via the
  // lowest-index basic variable among the minimum-ratio rows.
  bool iterate(std::size_t max_enter_col, double tol) {
    for (std::size_t it = 0; it < kIterationCap; ++it) {
      std::size_t enter = max_enter_col;
      for (std::size_t j = 0; j < max_enter_col; ++j) {
        if (cost[j] < -tol) {
          enter = j;
          break;
        }
      }
      if (enter == max_enter_col) return true;  // optimal

      std::size_t leave = nrows;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < nrows; ++i) {
        if (!active[i] || t(i, enter) <= kPivotTol) continue;
        const double ratio = t(i, rhs_col()) / t(i, enter);
        if (leave == nrows) {
          leave = i;
          best_ratio = ratio;
          continue;
        }
        const double slack = 1e-12 * (1.0 + std::abs(best_ratio));
        if (ratio < best_ratio - slack) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio <= best_ratio + slack && basis[i] < basis[leave]) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
      if (leave == nrows) return false;  // unbounded direction
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration limit reached");
  }
};

// Rebuild one column of the normalized constraint matrix (artificial
// columns are unit vectors).
double original_entry(const Matrix& norm, std::size_t nreal, std::size_t row, int col) {
  if (col < static_cast<int>(nreal)) return norm(row, static_cast<std::size_t>(col));
  return (static_cast<std::size_t>(col) - nreal) == row ? 1.0 : 0.0;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double feas_tol) {
  const std::size_t r = lp.constraints.rows();
  const std::size_t n = lp.constraints.cols();
  if (lp.rhs.size() != r) throw std::invalid_argument("solve_lp: rhs size mismatch");
  if (lp.objective.size() != n) throw std::invalid_argument("solve_lp: objective size mismatch");
  if (r == 0 || n == 0) throw std::invalid_argument("solve_lp: empty program");

  // Flip row signs so the right-hand side is nonnegative, making the
  // artificial identity a valid starting basis.
  std::vector<double> sign(r, 1.0);
  Matrix norm = lp.constraints;
  std::vector<double> rhs = lp.rhs;
  for (std::size_t i = 0; i < r; ++i) {
    if (rhs[i] < 0.0) {
      sign[i] = -1.0;
      rhs[i] = -rhs[i];
      for (std::size_t j = 0; j < n; ++j) norm(i, j) = -norm(i, j);
    }
  }

  Tableau tab;
  tab.nrows = r;
  tab.nreal = n;
  tab.t = Matrix(r, n + r + 1, 0.0);
  tab.basis.resize(r);
  tab.active.assign(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.t(i, j) = norm(i, j);
    tab.t(i, n + i) = 1.0;
    tab.t(i, tab.rhs_col()) = rhs[i];
    tab.basis[i] = static_cast<int>(n + i);
  }

  // Phase 1: minimize the sum of artificials. Reduced costs start at
  // -(column sums) for the real columns.
  tab.cost.assign(n + r, 0.0);
  tab.objective = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.cost[j] -= norm(i, j);
    tab.objective += rhs[i];
  }
  if (!tab.iterate(n, feas_tol))
    throw std::runtime_error("simplex: phase 1 reported an unbounded direction");

  LpSolution sol;
  const double scale = 1.0 + inf_norm(lp.rhs);
  if (tab.objective > feas_tol * scale) {
    // Infeasible: the phase-1 duals are a Farkas witness. Recover them
    // from the final basis, then undo the row sign flips.
    sol.status = LpStatus::infeasible;
    sol.infeasibility = tab.objective;
    Matrix bt(r, r, 0.0);
    std::vector<double> cb(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t k = 0; k < r; ++k) bt(i, k) = original_entry(norm, n, k, tab.basis[i]);
      cb[i] = tab.basis[i] >= static_cast<int>(n) ? 1.0 : 0.0;
    }
    std::vector<double> y = solve_linear(bt, cb);
    sol.duals.resize(r);
    for (std::size_t i = 0; i < r; ++i) sol.duals[i] = sign[i] * y[i];
    return sol;
  }

  // Feasible. Pivot out any artificial still basic at zero level; a row
  // offering no real pivot is redundant and gets dropped.
  for (std::size_t i = 0; i < r; ++i) {
    if (tab.basis[i] < static_cast<int>(n)) continue;
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(tab.t(i, j)) > 1e-9) {
        enter = j;
        break;
      }
    }
    if (enter == n) {
      tab.active[i] = 0;
      continue;
    }
    tab.pivot(i, enter);
  }

  // Phase 2 on the real objective.
  tab.cost.assign(n + r, 0.0);
  for (std::size_t j = 0; j < n; ++j) tab.cost[j] = lp.objective[j];
  tab.objective = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (!tab.active[i] || tab.basis[i] >= static_cast<int>(n)) continue;
    const double cb = lp.objective[static_cast<std::size_t>(tab.basis[i])];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) tab.cost[j] -= cb * tab.t(i, j);
    tab.objective += cb * tab.t(i, tab.rhs_col());
    tab.cost[static_cast<std::size_t>(tab.basis[i])] = 0.0;
  }
  if (!tab.iterate(n, feas_tol)) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  // Polish: recompute the basic values and duals from the final basis
  // with a fresh factorization instead of trusting tableau drift.
  std::vector<std::size_t> act;
  for (std::size_t i = 0; i < r; ++i)
    if (tab.active[i]) act.push_back(i);
  const std::size_t ra = act.size();
  Matrix basis_mat(ra, ra, 0.0);
  Matrix basis_t(ra, ra, 0.0);
  std::vector<double> rhs_a(ra), cb(ra);
  for (std::size_t ii = 0; ii < ra; ++ii) {
    for (std::size_t kk = 0; kk < ra; ++kk) {
      basis_mat(ii, kk) = original_entry(norm, n, act[ii], tab.basis[act[kk]]);
      basis_t(ii, kk) = original_entry(norm, n, act[kk], tab.basis[act[ii]]);
    }
    rhs_a[ii] = rhs[act[ii]];
    const int bj = tab.basis[act[ii]];
    cb[ii] = bj < static_cast<int>(n) ? lp.objective[static_cast<std::size_t>(bj)] : 0.0;
  }

  sol.status = LpStatus::optimal;
  sol.x.assign(n, 0.0);
  std::vector<double> xb;
  try {
    xb = solve_linear(basis_mat, rhs_a);
  } catch (const std::invalid_argument&) {
    xb.clear();  // fall back to tableau values below
  }
  for (std::size_t ii = 0; ii < ra; ++ii) {
    const int bj = tab.basis[act[ii]];
    const double v = xb.empty() ? tab.t(act[ii], tab.rhs_col()) : xb[ii];
    if (bj < static_cast<int>(n)) sol.x[static_cast<std::size_t>(bj)] = v;
  }
  sol.objective = dot(sol.x, lp.objective);

  sol.duals.assign(r, 0.0);
  try {
    const std::vector<double> ya = solve_linear(basis_t, cb);
    for (std::size_t ii = 0; ii < ra; ++ii) sol.duals[act[ii]] = sign[act[ii]] * ya[ii];
  } catch (const std::invalid_argument&) {
    sol.duals.assign(r, 0.0);
  }
  return sol;
}

}  // namespace ftap
