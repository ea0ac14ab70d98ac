#pragma once

// Complex sparse (CSR) and dense kernels shared by the whole solver.
// Nothing in here knows about the Helmholtz problem.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace helmmg {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using Index = std::ptrdiff_t;

/// Thrown for every precondition violation and numerical failure in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dense computation would exceed the configured dense limit.
class DenseLimitError : public Error {
 public:
  using Error::Error;
};

/// Dense computations refuse matrices with more entries than this.
inline constexpr double kDefaultDenseLimit = 6.25e6;

/// Entries with magnitude at or below this are treated as structural zeros.
inline constexpr double kDropTolerance = 1e-300;

struct Triplet {
  Index row;
  Index col;
  Complex value;
};

/// Square or rectangular complex matrix in compressed-sparse-row layout.
///
/// Column indices are strictly increasing inside every row and no stored
/// value has magnitude <= kDropTolerance. Instances are immutable once built.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(Index rows, Index cols);

  /// Takes ownership of raw CSR arrays. Validates the layout invariants and
  /// compacts stored zeros.
  CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
            std::vector<Index> col_idx, std::vector<Complex> values);

  /// Duplicates are summed; entries that cancel to zero are dropped.
  static CsrMatrix from_triplets(Index rows, Index cols,
                                 std::vector<Triplet> triplets);
  static CsrMatrix identity(Index n);
  static CsrMatrix diagonal(const ComplexVector& d);
  static CsrMatrix from_dense(const DenseMatrix& m);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const Complex> values() const { return values_; }

  /// Entries of one row as (columns, values).
  std::span<const Index> row_cols(Index i) const;
  std::span<const Complex> row_values(Index i) const;

  Complex coeff(Index i, Index j) const;
  ComplexVector diagonal_values() const;

  /// y = M x
  ComplexVector multiply(const ComplexVector& x) const;
  /// y = b - M x without a temporary for M x.
  ComplexVector residual(const ComplexVector& x, const ComplexVector& b) const;
  /// y = M^H x
  ComplexVector multiply_adjoint(const ComplexVector& x) const;

  CsrMatrix transpose() const;
  CsrMatrix adjoint() const;
  CsrMatrix scaled(Complex factor) const;
  DenseMatrix to_dense() const;

  /// Frobenius norm of the entries.
  double frobenius_norm() const;

 private:
  void validate_and_compact();

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<Complex> values_;
};

/// Matrix-vector product; throws on dimension mismatch.
ComplexVector spmv(const CsrMatrix& m, const ComplexVector& x);

/// Sparse product A*B with exact sparsity (cancelled entries dropped).
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

/// Entrywise a + alpha*b.
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, Complex alpha = 1.0);

/// R*A*P, the Galerkin triple product.
CsrMatrix sparse_triple_product(const CsrMatrix& r, const CsrMatrix& a,
                                const CsrMatrix& p);

/// Kronecker product a (x) b.
CsrMatrix kron(const CsrMatrix& a, const CsrMatrix& b);

/// Dense * sparse.
DenseMatrix multiply(const DenseMatrix& a, const CsrMatrix& b);
/// Sparse * dense.
DenseMatrix multiply(const CsrMatrix& a, const DenseMatrix& b);

// ---------------------------------------------------------------------------
// Dense kernels

void require_dense_limit(Index rows, Index cols,
                         double limit = kDefaultDenseLimit);

/// LU with partial pivoting. Construction fails with the offending pivot
/// index when a pivot falls below 1e-14 * max|M|.
class DenseLu {
 public:
  DenseLu() = default;
  explicit DenseLu(const DenseMatrix& m, double pivot_tolerance = 1e-14);

  Index size() const { return lu_.rows(); }
  ComplexVector solve(const ComplexVector& b) const;
  DenseMatrix solve(const DenseMatrix& b) const;
  DenseMatrix inverse() const;

  /// log|det M|
  double log_abs_determinant() const;
  /// det M / |det M|
  Complex determinant_phase() const;

 private:
  Eigen::PartialPivLU<DenseMatrix> lu_;
};

ComplexVector dense_lu_solve(const DenseMatrix& m, const ComplexVector& b);

/// ||M - M^H||_F / ||M||_F (0 for the zero matrix).
double hermiticity_residual(const DenseMatrix& m);

struct HpdVerdict {
  enum class Reason { none, non_hermitian, nonpositive_pivot };

  bool hpd = false;
  Reason reason = Reason::none;
  /// First failing pivot (nonpositive_pivot only).
  Index pivot = -1;
  /// Value of that pivot, or the Hermiticity residual.
  double value = 0.0;

  std::string describe() const;
};

/// Complex Cholesky test for Hermitian positive definiteness.
///
/// Hermiticity is checked first against tol. The matrix is HPD iff every real
/// pivot of the factorization exceeds tol * max diagonal entry.
HpdVerdict cholesky_hpd_test(const DenseMatrix& m, double tol = 1e-12);

struct ScreenVerdict {
  bool pass = false;
  /// 1..4, or 0 when every evaluated condition holds.
  int failed_condition = 0;
  /// Set when the determinant condition was not evaluated.
  bool determinant_skipped = false;
  std::string detail;
};

/// Entrywise necessary conditions for positive definiteness of a Hermitian
/// matrix B:
///   (1) b_ii > 0
///   (2) b_ii + b_jj > 2 |Re b_ij|, i != j
///   (3) the largest-modulus entry lies on the diagonal
///   (4) det B > 0
/// Returns the first failing condition. (4) is skipped above dense_limit.
ScreenVerdict quick_pd_screen(const DenseMatrix& m,
                              double dense_limit = kDefaultDenseLimit);

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

using LinearMap = std::function<ComplexVector(const ComplexVector&)>;

/// Largest eigenvalue of a Hermitian operator by restarted Lanczos. Stops
/// when the Ritz residual drops below tol * |theta|; `iterations` counts
/// operator applications.
NormEstimate largest_eigenvalue_hermitian(Index n, const LinearMap& apply, double tol,
                                          int max_iter);

/// sqrt(lambda_max(M^H M)) given the actions of M and M^H.
NormEstimate spectral_norm(Index n, const LinearMap& apply,
                           const LinearMap& apply_adjoint, double tol,
                           int max_iter);
NormEstimate spectral_norm(const DenseMatrix& m, double tol = 1e-12,
                           int max_iter = 20000);

/// Deterministic pseudo-random start vector (fixed seed).
ComplexVector power_iteration_start(Index n);

/// Max absolute column sum.
double norm_p1(const DenseMatrix& m);
/// ||M||_1 * ||M^-1||_1.
double condition_number_p1(const DenseMatrix& m);

}  // namespace helmmg
