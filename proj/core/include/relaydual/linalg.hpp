#pragma once

// Small dense complex-Hermitian kernels shared by all solvers. Dimensions in
// this project never exceed ~16, so everything is plain O(n^3) with no
// blocking and no pivoting beyond what correctness requires.

#include <complex>
#include <initializer_list>
#include <vector>

namespace relaydual {

using cxd = std::complex<double>;

// Dense row-major complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}
  CMatrix(int rows, int cols, std::initializer_list<cxd> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  cxd& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const cxd& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  // Column j as a vector (handy for per-user beamformers stored column-wise).
  std::vector<cxd> col(int j) const;

  static CMatrix identity(int n);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cxd> a_;
};

// Hermitian matrix; the constructor symmetrizes its input as (A + A^H)/2 so
// round-off asymmetry never reaches the factorizations.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(int dim);
  explicit HermitianMatrix(const CMatrix& a);
  HermitianMatrix(int dim, std::initializer_list<cxd> entries);

  int dim() const { return dim_; }
  const cxd& operator()(int i, int j) const { return a_(i, j); }
  const CMatrix& matrix() const { return a_; }

  // Sets the (i,j) and (j,i) entries together so Hermitian symmetry is
  // preserved by construction.
  void set(int i, int j, cxd value);
  void add(int i, int j, cxd value);

  double trace() const;
  HermitianMatrix leading_block(int size) const;
  // Rows/columns reordered as perm: result(i,j) = (*this)(perm[i], perm[j]).
  HermitianMatrix permuted(const std::vector<int>& perm) const;
  HermitianMatrix scaled(double s) const;

  static HermitianMatrix identity(int n);
  static HermitianMatrix zero(int n);

 private:
  int dim_ = 0;
  CMatrix a_;
};

// Cholesky factor of a Hermitian positive definite matrix, A = L L^H with a
// real positive diagonal. Throws NotPositiveDefinite when a pivot falls below
// 1e-12 x (largest diagonal entry).
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const HermitianMatrix& a);

  const CMatrix& lower() const { return l_; }
  std::vector<cxd> solve(const std::vector<cxd>& b) const;
  double log_det() const;   // log det A = 2 sum log L_ii
  double det() const;

 private:
  CMatrix l_;
};

CMatrix cholesky(const HermitianMatrix& a);
std::vector<cxd> solve_hermitian(const HermitianMatrix& a, const std::vector<cxd>& b);

// Scalar Schur complement of the leading m x m block at row/column m
// (0-based): A(m,m) - A(m,0:m-1) A(0:m-1,0:m-1)^{-1} A(0:m-1,m).
// For m = 0 this is just A(0,0).
double schur_complement(const HermitianMatrix& a, int m);

// All eigenvalues, ascending, via cyclic complex Jacobi rotations.
std::vector<double> eigenvalues_hermitian(const HermitianMatrix& a);

bool min_eigen_psd_check(const HermitianMatrix& a, double tol);
double default_psd_tol(const HermitianMatrix& a);  // 1e-10 x trace/dim

// Vector / matrix helpers used throughout the rate and solver code.
cxd dot(const std::vector<cxd>& x, const std::vector<cxd>& y);  // x^H y
double norm2(const std::vector<cxd>& x);                        // ||x||^2
double norm(const std::vector<cxd>& x);
std::vector<cxd> matvec(const CMatrix& a, const std::vector<cxd>& x);

// Real dense solve with partial pivoting (tight linear systems, LP duals).
// Throws std::runtime_error on a numerically singular matrix.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const double& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  RealMatrix transposed() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

std::vector<double> solve_real(RealMatrix a, std::vector<double> b);

// Symmetric positive definite solve (Newton systems). Falls back to a small
// diagonal jitter when the factorization meets a nonpositive pivot.
std::vector<double> solve_spd(const RealMatrix& a, const std::vector<double>& b);

}  // namespace relaydual
