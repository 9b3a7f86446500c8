#include "ftap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftap {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m;
  m.rows_ = rows.size();
  m.cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
  m.data_.reserve(m.rows_ * m.cols_);
  for (const auto& r : rows) {
    if (r.size() != m.cols_) throw std::invalid_argument("ragged initializer for Matrix");
    m.data_.insert(m.data_.end(), r.begin(), r.end());
  }
  return m;
}

std::vector<double> Matrix::row(std::size_t i) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

std::vector<double> Matrix::col(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::inf_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) sum += std::abs((*this)(i, j));
    best = std::max(best, sum);
  }
  return best;
}

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x) {
  if (x.size() != a.cols()) throw std::invalid_argument("mat_vec shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * x[j];
    y[i] = sum;
  }
  return y;
}

std::vector<double> mat_tvec(const Matrix& a, const std::vector<double>& x) {
  if (x.size() != a.rows()) throw std::invalid_argument("mat_tvec shape mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double inf_norm(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::size_t numerical_rank(Matrix a, double rel_pivot_tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<double> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t best = row;
    for (std::size_t i = row + 1; i < m; ++i)
      if (std::abs(a(i, col)) > std::abs(a(best, col))) best = i;
    if (a(best, col) == 0.0) continue;
    if (best != row)
      for (std::size_t j = col; j < n; ++j) std::swap(a(row, j), a(best, j));
    pivots.push_back(std::abs(a(row, col)));
    for (std::size_t i = row + 1; i < m; ++i) {
      const double f = a(i, col) / a(row, col);
      a(i, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) a(i, j) -= f * a(row, j);
    }
    ++row;
  }
  if (pivots.empty()) return 0;
  const double largest = *std::max_element(pivots.begin(), pivots.end());
  std::size_t rank = 0;
  for (double p : pivots)
    if (p >= rel_pivot_tol * largest) ++rank;
  return rank;
}

namespace {

struct Lu {
  Matrix lu;
  std::vector<std::size_t> perm;
};

Lu factor(Matrix a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(best, k))) best = i;
    if (a(best, k) == 0.0) throw std::invalid_argument("solve_linear: singular matrix");
    if (best != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(best, j));
      std::swap(perm[k], perm[best]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= a(i, k) * a(k, j);
    }
  }
  return {std::move(a), std::move(perm)};
}

std::vector<double> lu_solve(const Lu& f, const std::vector<double>& b) {
  const std::size_t n = f.lu.rows();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= f.lu(ii, j) * x[j];
    x[ii] /= f.lu(ii, ii);
  }
  return x;
}

}  // namespace

std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("solve_linear: matrix not square");
  if (b.size() != a.rows()) throw std::invalid_argument("solve_linear: rhs size mismatch");
  const Lu f = factor(a);
  std::vector<double> x = lu_solve(f, b);
  // One refinement pass knocks out most of the elimination roundoff.
  std::vector<double> r = b;
  const std::vector<double> ax = mat_vec(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
  const std::vector<double> dx = lu_solve(f, r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

}  // namespace ftap
