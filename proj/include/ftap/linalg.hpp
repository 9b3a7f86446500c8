#ifndef FTAP_LINALG_HPP
#define FTAP_LINALG_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ftap {

// Dense row-major matrix. Small sizes only; everything here is O(n^3)
// Gaussian elimination territory.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::vector<double> row(std::size_t i) const;
  std::vector<double> col(std::size_t j) const;

  bool all_finite() const;
  // Operator infinity norm: max absolute row sum. Zero-sized matrix -> 0.
  double inf_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x);
// y = A^T x
std::vector<double> mat_tvec(const Matrix& a, const std::vector<double>& x);
double dot(const std::vector<double>& a, const std::vector<double>& b);
double inf_norm(const std::vector<double>& v);
bool all_finite(const std::vector<double>& v);

// Rank by Gaussian elimination with partial pivoting. A pivot counts
// when its magnitude is at least rel_pivot_tol times the largest pivot
// seen for the matrix.
std::size_t numerical_rank(Matrix a, double rel_pivot_tol = 1e-10);

// Solve a square system by partial-pivot LU with one step of iterative
// refinement. Throws std::invalid_argument on a numerically singular
// matrix or shape mismatch.
std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b);

}  // namespace ftap

#endif  // FTAP_LINALG_HPP
