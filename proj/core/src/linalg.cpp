#include "relaydual/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaydual/errors.hpp"

namespace relaydual {

CMatrix::CMatrix(int rows, int cols, std::initializer_list<cxd> entries) : CMatrix(rows, cols) {
  if (static_cast<int>(entries.size()) != rows * cols) {
    throw DimensionMismatch("CMatrix initializer size does not match shape");
  }
  std::copy(entries.begin(), entries.end(), a_.begin());
}

std::vector<cxd> CMatrix::col(int j) const {
  std::vector<cxd> out(rows_);
  for (int i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

CMatrix CMatrix::identity(int n) {
  CMatrix i(n, n);
  for (int k = 0; k < n; ++k) i(k, k) = 1.0;
  return i;
}

HermitianMatrix::HermitianMatrix(int dim) : dim_(dim), a_(dim, dim) {
  if (dim < 1) throw DimensionMismatch("HermitianMatrix dimension must be >= 1");
}

HermitianMatrix::HermitianMatrix(const CMatrix& a) : dim_(a.rows()), a_(a.rows(), a.rows()) {
  if (a.rows() != a.cols()) throw DimensionMismatch("HermitianMatrix needs a square input");
  if (a.rows() < 1) throw DimensionMismatch("HermitianMatrix dimension must be >= 1");
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      a_(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    }
    a_(i, i) = cxd(a_(i, i).real(), 0.0);
  }
}

HermitianMatrix::HermitianMatrix(int dim, std::initializer_list<cxd> entries)
    : HermitianMatrix(CMatrix(dim, dim, entries)) {}

void HermitianMatrix::set(int i, int j, cxd value) {
  if (i == j) {
    a_(i, i) = cxd(value.real(), 0.0);
  } else {
    a_(i, j) = value;
    a_(j, i) = std::conj(value);
  }
}

void HermitianMatrix::add(int i, int j, cxd value) { set(i, j, a_(i, j) + value); }

double HermitianMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += a_(i, i).real();
  return t;
}

HermitianMatrix HermitianMatrix::leading_block(int size) const {
  HermitianMatrix b(size);
  for (int i = 0; i < size; ++i)
    for (int j = i; j < size; ++j) b.set(i, j, a_(i, j));
  return b;
}

HermitianMatrix HermitianMatrix::permuted(const std::vector<int>& perm) const {
  HermitianMatrix b(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) b.set(i, j, a_(perm[i], perm[j]));
  return b;
}

HermitianMatrix HermitianMatrix::scaled(double s) const {
  HermitianMatrix b(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) b.set(i, j, s * a_(i, j));
  return b;
}

HermitianMatrix HermitianMatrix::identity(int n) { return HermitianMatrix(CMatrix::identity(n)); }

HermitianMatrix HermitianMatrix::zero(int n) { return HermitianMatrix(n); }

CholeskyFactor::CholeskyFactor(const HermitianMatrix& a) : l_(a.dim(), a.dim()) {
  const int n = a.dim();
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i).real()));
  const double pivot_tol = 1e-12 * max_diag;

  for (int j = 0; j < n; ++j) {
    double s = a(j, j).real();
    for (int k = 0; k < j; ++k) s -= std::norm(l_(j, k));
    if (!(s > pivot_tol)) {
      throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) + " is not positive");
    }
    const double ljj = std::sqrt(s);
    l_(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      cxd v = a(i, j);
      for (int k = 0; k < j; ++k) v -= l_(i, k) * std::conj(l_(j, k));
      l_(i, j) = v / ljj;
    }
  }
}

std::vector<cxd> CholeskyFactor::solve(const std::vector<cxd>& b) const {
  const int n = l_.rows();
  if (static_cast<int>(b.size()) != n) throw DimensionMismatch("solve: rhs length mismatch");
  std::vector<cxd> y(b);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) y[i] -= l_(i, k) * y[k];
    y[i] /= l_(i, i).real();
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) y[i] -= std::conj(l_(k, i)) * y[k];
    y[i] /= l_(i, i).real();
  }
  return y;
}

double CholeskyFactor::log_det() const {
  double s = 0.0;
  for (int i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i).real());
  return 2.0 * s;
}

double CholeskyFactor::det() const { return std::exp(log_det()); }

CMatrix cholesky(const HermitianMatrix& a) { return CholeskyFactor(a).lower(); }

std::vector<cxd> solve_hermitian(const HermitianMatrix& a, const std::vector<cxd>& b) {
  return CholeskyFactor(a).solve(b);
}

double schur_complement(const HermitianMatrix& a, int m) {
  if (m < 0 || m >= a.dim()) throw DimensionMismatch("schur_complement: index out of range");
  if (m == 0) return a(0, 0).real();
  // From the Cholesky of the leading (m+1)-block: the Schur complement of the
  // leading m-block at entry (m,m) equals L(m,m)^2.
  CholeskyFactor f(a.leading_block(m + 1));
  const double lmm = f.lower()(m, m).real();
  return lmm * lmm;
}

std::vector<double> eigenvalues_hermitian(const HermitianMatrix& a) {
  const int n = a.dim();
  CMatrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = a(i, j);

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(w(i, j)));
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  // Cyclic Jacobi sweeps; quadratic convergence makes ~15 sweeps ample at
  // these dimensions.
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(w(p, q));
    if (off <= 1e-30 * scale * scale) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cxd apq = w(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = w(p, p).real();
        const double aqq = w(q, q).real();
        // Phase removal: apq = |apq| e^{i phi}; rotate column q by e^{i phi}
        // so the pivot becomes real, then apply the classic real rotation.
        const double mag = std::abs(apq);
        const cxd phase = apq / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cxd sp = s * phase;  // complex sine carrying the phase

        for (int k = 0; k < n; ++k) {
          const cxd wkp = w(k, p);
          const cxd wkq = w(k, q);
          w(k, p) = c * wkp - std::conj(sp) * wkq;
          w(k, q) = sp * wkp + c * wkq;
        }
        for (int k = 0; k < n; ++k) {
          const cxd wpk = w(p, k);
          const cxd wqk = w(q, k);
          w(p, k) = c * wpk - sp * wqk;
          w(q, k) = std::conj(sp) * wpk + c * wqk;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        w(p, p) = cxd(w(p, p).real(), 0.0);
        w(q, q) = cxd(w(q, q).real(), 0.0);
      }
    }
  }

  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = w(i, i).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

bool min_eigen_psd_check(const HermitianMatrix& a, double tol) {
  return eigenvalues_hermitian(a).front() >= -tol;
}

double default_psd_tol(const HermitianMatrix& a) {
  return 1e-10 * std::abs(a.trace()) / a.dim();
}

cxd dot(const std::vector<cxd>& x, const std::vector<cxd>& y) {
  cxd s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double norm2(const std::vector<cxd>& x) {
  double s = 0.0;
  for (const cxd& v : x) s += std::norm(v);
  return s;
}

double norm(const std::vector<cxd>& x) { return std::sqrt(norm2(x)); }

std::vector<cxd> matvec(const CMatrix& a, const std::vector<cxd>& x) {
  if (static_cast<int>(x.size()) != a.cols()) throw DimensionMismatch("matvec shape mismatch");
  std::vector<cxd> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

RealMatrix RealMatrix::transposed() const {
  RealMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<double> solve_real(RealMatrix a, std::vector<double> b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n) {
    throw DimensionMismatch("solve_real: square system required");
  }
  double max_entry = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) max_entry = std::max(max_entry, std::abs(a(i, j)));

  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) <= 1e-14 * std::max(max_entry, 1.0)) {
      throw std::runtime_error("solve_real: singular system at column " + std::to_string(col));
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (int i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

std::vector<double> solve_spd(const RealMatrix& a, const std::vector<double>& b) {
  const int n = a.rows();
  double tr = 0.0;
  for (int i = 0; i < n; ++i) tr += std::abs(a(i, i));
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    RealMatrix l(n, n);
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      double s = a(j, j) + jitter;
      for (int k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
      if (!(s > 0.0)) {
        ok = false;
        break;
      }
      l(j, j) = std::sqrt(s);
      for (int i = j + 1; i < n; ++i) {
        double v = a(i, j);
        for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
        l(i, j) = v / l(j, j);
      }
    }
    if (ok) {
      std::vector<double> y(b);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
        y[i] /= l(i, i);
      }
      for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
        y[i] /= l(i, i);
      }
      return y;
    }
    jitter = (jitter == 0.0) ? 1e-14 * std::max(tr / n, 1.0) : jitter * 100.0;
  }
  throw std::runtime_error("solve_spd: matrix is not positive definite");
}

}  // namespace relaydual
