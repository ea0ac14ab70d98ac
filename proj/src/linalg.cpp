#include "helmmg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "helmmg/rng.hpp"

namespace helmmg {

namespace {

std::string dims(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

bool negligible(Complex v) { return std::abs(v) <= kDropTolerance; }

}  // namespace

CsrMatrix::CsrMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {
  if (rows < 0 || cols < 0) throw Error("CsrMatrix: negative dimension");
}

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
                     std::vector<Index> col_idx, std::vector<Complex> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  validate_and_compact();
}

void CsrMatrix::validate_and_compact() {
  if (rows_ < 0 || cols_ < 0) throw Error("CsrMatrix: negative dimension");
  if (row_ptr_.size() != static_cast<std::size_t>(rows_) + 1)
    throw Error("CsrMatrix: row pointer length must be rows+1");
  if (row_ptr_.front() != 0) throw Error("CsrMatrix: row pointer must start at 0");
  if (col_idx_.size() != values_.size())
    throw Error("CsrMatrix: column/value arrays differ in length");
  if (row_ptr_.back() != static_cast<Index>(values_.size()))
    throw Error("CsrMatrix: row pointer does not end at nnz");
  for (Index i = 0; i < rows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i])
      throw Error("CsrMatrix: row pointer decreases at row " + std::to_string(i));
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] < 0 || col_idx_[p] >= cols_)
        throw Error("CsrMatrix: column index out of range in row " +
                    std::to_string(i));
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        throw Error("CsrMatrix: column indices not strictly increasing in row " +
                    std::to_string(i));
    }
  }
  Index out = 0;
  Index start = 0;
  for (Index i = 0; i < rows_; ++i) {
    const Index end = row_ptr_[i + 1];
    for (Index p = start; p < end; ++p) {
      if (negligible(values_[p])) continue;
      col_idx_[out] = col_idx_[p];
      values_[out] = values_[p];
      ++out;
    }
    start = end;
    row_ptr_[i + 1] = out;
  }
  col_idx_.resize(out);
  values_.resize(out);
}

CsrMatrix CsrMatrix::from_triplets(Index rows, Index cols,
                                   std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw Error("from_triplets: entry (" + std::to_string(t.row) + "," +
                  std::to_string(t.col) + ") outside " + dims(rows, cols));
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Complex> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t p = 0; p < triplets.size();) {
    const Index r = triplets[p].row;
    const Index c = triplets[p].col;
    Complex sum = 0.0;
    while (p < triplets.size() && triplets[p].row == r && triplets[p].col == c) {
      sum += triplets[p].value;
      ++p;
    }
    if (negligible(sum)) continue;
    col_idx.push_back(c);
    values.push_back(sum);
    ++row_ptr[r + 1];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

CsrMatrix CsrMatrix::identity(Index n) {
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1);
  std::iota(row_ptr.begin(), row_ptr.end(), Index{0});
  std::vector<Index> cols(static_cast<std::size_t>(n));
  std::iota(cols.begin(), cols.end(), Index{0});
  return CsrMatrix(n, n, std::move(row_ptr), std::move(cols),
                   std::vector<Complex>(static_cast<std::size_t>(n), 1.0));
}

CsrMatrix CsrMatrix::diagonal(const ComplexVector& d) {
  const Index n = d.size();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) t.push_back({i, i, d[i]});
  return from_triplets(n, n, std::move(t));
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& m) {
  std::vector<Triplet> t;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (!negligible(m(i, j))) t.push_back({i, j, m(i, j)});
  return from_triplets(m.rows(), m.cols(), std::move(t));
}

std::span<const Index> CsrMatrix::row_cols(Index i) const {
  return std::span<const Index>(col_idx_).subspan(
      static_cast<std::size_t>(row_ptr_[i]),
      static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i]));
}

std::span<const Complex> CsrMatrix::row_values(Index i) const {
  return std::span<const Complex>(values_).subspan(
      static_cast<std::size_t>(row_ptr_[i]),
      static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i]));
}

Complex CsrMatrix::coeff(Index i, Index j) const {
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(row_ptr_[i] + (it - cols.begin()))];
}

ComplexVector CsrMatrix::diagonal_values() const {
  const Index n = std::min(rows_, cols_);
  ComplexVector d(n);
  for (Index i = 0; i < n; ++i) d[i] = coeff(i, i);
  return d;
}

ComplexVector CsrMatrix::multiply(const ComplexVector& x) const {
  if (x.size() != cols_)
    throw Error("spmv: matrix is " + dims(rows_, cols_) +
                " but vector has length " + std::to_string(x.size()));
  ComplexVector y(rows_);
  for (Index i = 0; i < rows_; ++i) {
    Complex s = 0.0;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      s += values_[p] * x[col_idx_[p]];
    y[i] = s;
  }
  return y;
}

ComplexVector CsrMatrix::residual(const ComplexVector& x,
                                  const ComplexVector& b) const {
  if (x.size() != cols_ || b.size() != rows_)
    throw Error("residual: matrix is " + dims(rows_, cols_) + ", x has length " +
                std::to_string(x.size()) + ", b has length " +
                std::to_string(b.size()));
  ComplexVector r(rows_);
  for (Index i = 0; i < rows_; ++i) {
    Complex s = b[i];
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      s -= values_[p] * x[col_idx_[p]];
    r[i] = s;
  }
  return r;
}

ComplexVector CsrMatrix::multiply_adjoint(const ComplexVector& x) const {
  if (x.size() != rows_)
    throw Error("adjoint spmv: matrix is " + dims(rows_, cols_) +
                " but vector has length " + std::to_string(x.size()));
  ComplexVector y = ComplexVector::Zero(cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      y[col_idx_[p]] += std::conj(values_[p]) * x[i];
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Index> row_ptr(static_cast<std::size_t>(cols_) + 1, 0);
  for (Index c : col_idx_) ++row_ptr[c + 1];
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  std::vector<Index> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<Index> cols(col_idx_.size());
  std::vector<Complex> vals(values_.size());
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const Index dst = next[col_idx_[p]]++;
      cols[dst] = i;
      vals[dst] = values_[p];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

CsrMatrix CsrMatrix::adjoint() const {
  CsrMatrix t = transpose();
  for (auto& v : t.values_) v = std::conj(v);
  return t;
}

CsrMatrix CsrMatrix::scaled(Complex factor) const {
  std::vector<Complex> vals(values_);
  for (auto& v : vals) v *= factor;
  return CsrMatrix(rows_, cols_, row_ptr_, col_idx_, std::move(vals));
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix m = DenseMatrix::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      m(i, col_idx_[p]) = values_[p];
  return m;
}

double CsrMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

ComplexVector spmv(const CsrMatrix& m, const ComplexVector& x) {
  return m.multiply(x);
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols() != b.rows())
    throw Error("sparse multiply: " + dims(a.rows(), a.cols()) + " times " +
                dims(b.rows(), b.cols()));
  // Gustavson's row-by-row product with a dense accumulator.
  std::vector<Index> row_ptr(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> cols;
  std::vector<Complex> vals;
  std::vector<Complex> acc(static_cast<std::size_t>(b.cols()), 0.0);
  std::vector<Index> marker(static_cast<std::size_t>(b.cols()), -1);
  std::vector<Index> touched;
  for (Index i = 0; i < a.rows(); ++i) {
    touched.clear();
    const auto acols = a.row_cols(i);
    const auto avals = a.row_values(i);
    for (std::size_t p = 0; p < acols.size(); ++p) {
      const Index k = acols[p];
      const auto bcols = b.row_cols(k);
      const auto bvals = b.row_values(k);
      for (std::size_t q = 0; q < bcols.size(); ++q) {
        const Index j = bcols[q];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          touched.push_back(j);
        }
        acc[j] += avals[p] * bvals[q];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index j : touched) {
      if (negligible(acc[j])) continue;
      cols.push_back(j);
      vals.push_back(acc[j]);
    }
    row_ptr[i + 1] = static_cast<Index>(cols.size());
  }
  return CsrMatrix(a.rows(), b.cols(), std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, Complex alpha) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("sparse add: " + dims(a.rows(), a.cols()) + " vs " +
                dims(b.rows(), b.cols()));
  std::vector<Index> row_ptr(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> cols;
  std::vector<Complex> vals;
  for (Index i = 0; i < a.rows(); ++i) {
    const auto ac = a.row_cols(i);
    const auto av = a.row_values(i);
    const auto bc = b.row_cols(i);
    const auto bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      Index j;
      Complex v;
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        j = ac[p];
        v = av[p++];
      } else if (p == ac.size() || bc[q] < ac[p]) {
        j = bc[q];
        v = alpha * bv[q++];
      } else {
        j = ac[p];
        v = av[p++] + alpha * bv[q++];
      }
      if (negligible(v)) continue;
      cols.push_back(j);
      vals.push_back(v);
    }
    row_ptr[i + 1] = static_cast<Index>(cols.size());
  }
  return CsrMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

CsrMatrix sparse_triple_product(const CsrMatrix& r, const CsrMatrix& a,
                                const CsrMatrix& p) {
  if (r.cols() != a.rows() || a.cols() != p.rows())
    throw Error("triple product: R " + dims(r.rows(), r.cols()) + ", A " +
                dims(a.rows(), a.cols()) + ", P " + dims(p.rows(), p.cols()));
  return multiply(multiply(r, a), p);
}

CsrMatrix kron(const CsrMatrix& a, const CsrMatrix& b) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  std::vector<Index> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Complex> vals;
  col_idx.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
  vals.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
  for (Index ia = 0; ia < a.rows(); ++ia) {
    const auto ac = a.row_cols(ia);
    const auto av = a.row_values(ia);
    for (Index ib = 0; ib < b.rows(); ++ib) {
      const auto bc = b.row_cols(ib);
      const auto bv = b.row_values(ib);
      for (std::size_t p = 0; p < ac.size(); ++p) {
        for (std::size_t q = 0; q < bc.size(); ++q) {
          col_idx.push_back(ac[p] * b.cols() + bc[q]);
          vals.push_back(av[p] * bv[q]);
        }
      }
      row_ptr[ia * b.rows() + ib + 1] = static_cast<Index>(col_idx.size());
    }
  }
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx),
                   std::move(vals));
}

DenseMatrix multiply(const DenseMatrix& a, const CsrMatrix& b) {
  if (a.cols() != b.rows())
    throw Error("dense*sparse: " + dims(a.rows(), a.cols()) + " times " +
                dims(b.rows(), b.cols()));
  DenseMatrix out = DenseMatrix::Zero(a.rows(), b.cols());
  for (Index k = 0; k < b.rows(); ++k) {
    const auto cols = b.row_cols(k);
    const auto vals = b.row_values(k);
    for (std::size_t p = 0; p < cols.size(); ++p)
      out.col(cols[p]).noalias() += vals[p] * a.col(k);
  }
  return out;
}

DenseMatrix multiply(const CsrMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw Error("sparse*dense: " + dims(a.rows(), a.cols()) + " times " +
                dims(b.rows(), b.cols()));
  // Column-major: accumulate row i of the result from rows of b.
  DenseMatrix out = DenseMatrix::Zero(a.rows(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    const auto bj = b.col(j);
    auto oj = out.col(j);
    for (Index i = 0; i < a.rows(); ++i) {
      Complex s = 0.0;
      const auto cols = a.row_cols(i);
      const auto vals = a.row_values(i);
      for (std::size_t p = 0; p < cols.size(); ++p) s += vals[p] * bj[cols[p]];
      oj[i] = s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void require_dense_limit(Index rows, Index cols, double limit) {
  const double entries = static_cast<double>(rows) * static_cast<double>(cols);
  if (entries > limit) {
    std::ostringstream os;
    os << "dense matrix " << rows << "x" << cols << " (" << entries
       << " entries) exceeds the dense limit of " << limit << " entries";
    throw DenseLimitError(os.str());
  }
}

DenseLu::DenseLu(const DenseMatrix& m, double pivot_tolerance) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error("DenseLu: matrix must be square and nonempty, got " +
                dims(m.rows(), m.cols()));
  const double scale = m.cwiseAbs().maxCoeff();
  lu_.compute(m);
  const auto& lu = lu_.matrixLU();
  for (Index i = 0; i < lu.rows(); ++i) {
    if (!(std::abs(lu(i, i)) >= pivot_tolerance * scale) || scale == 0.0) {
      std::ostringstream os;
      os << "DenseLu: matrix is singular to tolerance, pivot " << i
         << " has magnitude " << std::abs(lu(i, i)) << " (max |M| = " << scale
         << ")";
      throw Error(os.str());
    }
  }
}

ComplexVector DenseLu::solve(const ComplexVector& b) const {
  if (b.size() != size())
    throw Error("DenseLu::solve: system has size " + std::to_string(size()) +
                " but right-hand side has length " + std::to_string(b.size()));
  return lu_.solve(b);
}

DenseMatrix DenseLu::solve(const DenseMatrix& b) const {
  if (b.rows() != size())
    throw Error("DenseLu::solve: system has size " + std::to_string(size()) +
                " but right-hand side has " + std::to_string(b.rows()) + " rows");
  return lu_.solve(b);
}

DenseMatrix DenseLu::inverse() const { return lu_.inverse(); }

double DenseLu::log_abs_determinant() const {
  double s = 0.0;
  const auto& lu = lu_.matrixLU();
  for (Index i = 0; i < lu.rows(); ++i) s += std::log(std::abs(lu(i, i)));
  return s;
}

Complex DenseLu::determinant_phase() const {
  Complex phase = static_cast<double>(lu_.permutationP().determinant());
  const auto& lu = lu_.matrixLU();
  for (Index i = 0; i < lu.rows(); ++i) phase *= lu(i, i) / std::abs(lu(i, i));
  return phase;
}

ComplexVector dense_lu_solve(const DenseMatrix& m, const ComplexVector& b) {
  return DenseLu(m).solve(b);
}

double hermiticity_residual(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw Error("hermiticity_residual: matrix not square");
  const double norm = m.norm();
  if (norm == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / norm;
}

std::string HpdVerdict::describe() const {
  std::ostringstream os;
  switch (reason) {
    case Reason::none:
      os << "HPD";
      break;
    case Reason::non_hermitian:
      os << "not HPD: non-Hermitian (relative residual " << value << ")";
      break;
    case Reason::nonpositive_pivot:
      os << "not HPD: pivot " << pivot << " = " << value;
      break;
  }
  return os.str();
}

HpdVerdict cholesky_hpd_test(const DenseMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error("cholesky_hpd_test: matrix not square");
  HpdVerdict v;
  const double herm = hermiticity_residual(m);
  if (herm > tol) {
    v.reason = HpdVerdict::Reason::non_hermitian;
    v.value = herm;
    return v;
  }
  const Index n = m.rows();
  double max_diag = 0.0;
  for (Index i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i).real());
  const double threshold = tol * max_diag;

  // Right-looking blocked factorization on the lower triangle.
  DenseMatrix l = m;
  constexpr Index kBlock = 64;
  for (Index k0 = 0; k0 < n; k0 += kBlock) {
    const Index kb = std::min(kBlock, n - k0);
    for (Index j = k0; j < k0 + kb; ++j) {
      double d = l(j, j).real();
      for (Index p = k0; p < j; ++p) d -= std::norm(l(j, p));
      if (!(d > threshold) || max_diag <= 0.0) {
        v.reason = HpdVerdict::Reason::nonpositive_pivot;
        v.pivot = j;
        v.value = d;
        return v;
      }
      const double ljj = std::sqrt(d);
      l(j, j) = ljj;
      for (Index i = j + 1; i < k0 + kb; ++i) {
        Complex s = l(i, j);
        for (Index p = k0; p < j; ++p) s -= l(i, p) * std::conj(l(j, p));
        l(i, j) = s / ljj;
      }
    }
    const Index rest = n - k0 - kb;
    if (rest == 0) break;
    auto l11 = l.block(k0, k0, kb, kb);
    auto l21 = l.block(k0 + kb, k0, rest, kb);
    l11.triangularView<Eigen::Lower>().adjoint().solveInPlace<Eigen::OnTheRight>(l21);
    auto a22 = l.block(k0 + kb, k0 + kb, rest, rest);
    a22.selfadjointView<Eigen::Lower>().rankUpdate(l21, -1.0);
  }
  v.hpd = true;
  return v;
}

ScreenVerdict quick_pd_screen(const DenseMatrix& m, double dense_limit) {
  if (m.rows() != m.cols()) throw Error("quick_pd_screen: matrix not square");
  const double herm = hermiticity_residual(m);
  if (herm > 1e-12) {
    std::ostringstream os;
    os << "quick_pd_screen: matrix is not Hermitian (relative residual " << herm
       << ")";
    throw Error(os.str());
  }
  const Index n = m.rows();
  ScreenVerdict v;
  auto fail = [&](int id, std::string detail) {
    v.failed_condition = id;
    v.detail = std::move(detail);
    return v;
  };
  for (Index i = 0; i < n; ++i)
    if (!(m(i, i).real() > 0.0))
      return fail(1, "diagonal entry " + std::to_string(i) + " is not positive");
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i)
      if (!(m(i, i).real() + m(j, j).real() > 2.0 * std::abs(m(i, j).real())))
        return fail(2, "b_ii + b_jj <= 2|Re b_ij| at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
  double max_diag = 0.0;
  double max_off = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      double& target = (i == j) ? max_diag : max_off;
      target = std::max(target, std::abs(m(i, j)));
    }
  }
  if (max_off > max_diag)
    return fail(3, "largest-modulus entry is off the diagonal");

  if (static_cast<double>(n) * static_cast<double>(n) > dense_limit) {
    v.determinant_skipped = true;
    v.detail = "warning: determinant condition skipped above the dense limit";
  } else {
    try {
      const DenseLu lu(m, 0.0);
      const Complex phase = lu.determinant_phase();
      if (!(phase.real() > 0.0)) return fail(4, "determinant is not positive");
    } catch (const Error&) {
      return fail(4, "determinant is zero");
    }
  }
  v.pass = true;
  return v;
}

ComplexVector power_iteration_start(Index n) {
  // Fixed seed; a generic vector has a component along every singular vector.
  SplitMix64 rng(0x5eed);
  ComplexVector x(n);
  for (Index i = 0; i < n; ++i) x[i] = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return x;
}

NormEstimate largest_eigenvalue_hermitian(Index n, const LinearMap& apply, double tol,
                                          int max_iter) {
  if (max_iter < 1) throw Error("lanczos: max_iter must be at least 1");
  NormEstimate est;
  if (n == 0) {
    est.converged = true;
    return est;
  }
  // Explicitly restarted Lanczos with full reorthogonalization.
  constexpr Index kBasis = 40;
  const Index basis_size = std::min<Index>(kBasis, n);
  ComplexVector x = power_iteration_start(n);
  x.normalize();
  std::vector<ComplexVector> v;
  std::vector<double> alpha, beta;
  int used = 0;
  while (true) {
    v.assign(1, x);
    alpha.clear();
    beta.clear();
    Eigen::VectorXd ritz;
    for (Index j = 0; j < basis_size; ++j) {
      ComplexVector w = apply(v[j]);
      ++used;
      alpha.push_back(std::real(v[j].dot(w)));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : v) w -= q.dot(w) * q;
      const double b = w.norm();
      beta.push_back(b);

      const Index m = j + 1;
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (Index i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      const double theta = es.eigenvalues()[m - 1];
      ritz = es.eigenvectors().col(m - 1);
      est.value = theta;
      est.iterations = used;
      const double scale = std::abs(theta);
      const double residual = b * std::abs(ritz[m - 1]);
      if (scale == 0.0 || residual <= tol * scale || b <= 1e-14 * scale) {
        est.converged = true;
        return est;
      }
      if (used >= max_iter) return est;
      if (j + 1 < basis_size) v.push_back(w / b);
    }
    x = ComplexVector::Zero(n);
    for (Index i = 0; i < ritz.size(); ++i) x += ritz[i] * v[i];
    x.normalize();
  }
}

NormEstimate spectral_norm(Index n, const LinearMap& apply,
                           const LinearMap& apply_adjoint, double tol,
                           int max_iter) {
  NormEstimate est = largest_eigenvalue_hermitian(
      n, [&](const ComplexVector& x) { return apply_adjoint(apply(x)); }, tol, max_iter);
  est.value = std::sqrt(std::max(est.value, 0.0));
  return est;
}

NormEstimate spectral_norm(const DenseMatrix& m, double tol, int max_iter) {
  if (m.rows() != m.cols()) throw Error("spectral_norm: matrix not square");
  return spectral_norm(
      m.rows(), [&](const ComplexVector& x) -> ComplexVector { return m * x; },
      [&](const ComplexVector& x) -> ComplexVector { return m.adjoint() * x; },
      tol, max_iter);
}

double norm_p1(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

double condition_number_p1(const DenseMatrix& m) {
  const DenseLu lu(m);
  return norm_p1(m) * norm_p1(lu.inverse());
}

}  // namespace helmmg
