#include <doctest.h>

#include <sstream>

#include "helmmg/linalg.hpp"
#include "helmmg/matrix_market.hpp"
#include "helpers.hpp"

using namespace helmmg;
using testing::random_dense;
using testing::random_sparse;
using testing::random_vector;
using testing::relative_error;

namespace {

const Complex I1(0.0, 1.0);

CsrMatrix tridiag(Index n, Complex lo, Complex d, Complex hi) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, lo});
    t.push_back({i, i, d});
    if (i + 1 < n) t.push_back({i, i + 1, hi});
  }
  return CsrMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_SUITE("csr") {
  TEST_CASE("identity spmv returns the input") {
    ComplexVector x(3);
    x << 1.0, I1, -2.0;
    CHECK(spmv(CsrMatrix::identity(3), x) == x);
  }

  TEST_CASE("zero matrix maps to zero") {
    const CsrMatrix z(4, 3);
    CHECK(z.nnz() == 0);
    CHECK(spmv(z, random_vector(3, 1)).isZero(0.0));
  }

  TEST_CASE("permutation swaps entries") {
    const auto p = CsrMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    ComplexVector x(2);
    x << Complex(2, 1), Complex(-3, 4);
    const ComplexVector y = spmv(p, x);
    CHECK(y[0] == x[1]);
    CHECK(y[1] == x[0]);
  }

  TEST_CASE("dimension mismatch names both sizes") {
    CHECK_THROWS_WITH_AS(spmv(CsrMatrix::identity(3), ComplexVector::Zero(4)),
                         doctest::Contains("4"), Error);
  }

  TEST_CASE("layout invariants are enforced") {
    CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), Error);
    CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 1, 1}, {5}, {1.0}), Error);
  }

  TEST_CASE("stored zeros are compacted") {
    const CsrMatrix m(2, 2, {0, 2, 3}, {0, 1, 1}, {1.0, 0.0, 2.0});
    CHECK(m.nnz() == 2);
    for (Index i = 0; i < m.rows(); ++i)
      for (auto v : m.row_values(i)) CHECK(std::abs(v) > kDropTolerance);
  }

  TEST_CASE("triplets sum duplicates and drop cancellations") {
    const auto m = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 1, 1.0}, {1, 1, -1.0}});
    CHECK(m.nnz() == 1);
    CHECK(m.coeff(0, 0) == Complex(3.0));
    CHECK(m.coeff(1, 1) == Complex(0.0));
  }

  TEST_CASE("spmv agrees with dense multiplication") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto a = random_sparse(17, 23, 0.2, seed);
      const auto x = random_vector(23, seed + 100);
      CHECK(relative_error(spmv(a, x), ComplexVector(a.to_dense() * x)) <= 1e-13);
      CHECK(relative_error(a.multiply_adjoint(x.head(17)),
                           ComplexVector(a.to_dense().adjoint() * x.head(17))) <= 1e-13);
    }
  }

  TEST_CASE("residual is b - Mx") {
    const auto a = random_sparse(12, 12, 0.3, 7);
    const auto x = random_vector(12, 8);
    const auto b = random_vector(12, 9);
    CHECK(relative_error(a.residual(x, b), ComplexVector(b - a.to_dense() * x)) <= 1e-14);
  }

  TEST_CASE("transpose, adjoint and scaling") {
    const auto a = random_sparse(6, 9, 0.4, 3);
    CHECK(a.transpose().to_dense() == a.to_dense().transpose());
    CHECK(a.adjoint().to_dense() == a.to_dense().adjoint());
    CHECK(relative_error(a.scaled(Complex(0.5, -2)).to_dense(),
                         DenseMatrix(a.to_dense() * Complex(0.5, -2))) <= 1e-15);
  }

  TEST_CASE("from_dense round trip") {
    const auto d = random_sparse(5, 7, 0.5, 11).to_dense();
    CHECK(CsrMatrix::from_dense(d).to_dense() == d);
  }
}

TEST_SUITE("sparse products") {
  TEST_CASE("identity triple product returns A") {
    const auto a = random_sparse(8, 8, 0.3, 5);
    const auto id = CsrMatrix::identity(8);
    CHECK(sparse_triple_product(id, a, id).to_dense() == a.to_dense());
  }

  TEST_CASE("R = 2I scales entrywise") {
    const auto a = random_sparse(8, 8, 0.3, 6);
    const auto r = CsrMatrix::identity(8).scaled(2.0);
    CHECK(relative_error(sparse_triple_product(r, a, CsrMatrix::identity(8)).to_dense(),
                         DenseMatrix(2.0 * a.to_dense())) == 0.0);
  }

  TEST_CASE("1D linear interpolation on 5 nodes gives a tridiagonal coarse operator") {
    const auto p = CsrMatrix::from_triplets(
        5, 3, {{0, 0, 1.0}, {1, 0, 0.5}, {1, 1, 0.5}, {2, 1, 1.0}, {3, 1, 0.5}, {3, 2, 0.5}, {4, 2, 1.0}});
    const auto a = tridiag(5, -1.0, 2.0, -1.0);
    const CsrMatrix ac = sparse_triple_product(p.transpose(), a, p);
    const DenseMatrix oracle = p.to_dense().transpose() * a.to_dense() * p.to_dense();
    CHECK(relative_error(ac.to_dense(), oracle) <= 1e-15);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j)
        if (std::abs(i - j) > 1) CHECK(ac.coeff(i, j) == Complex(0.0));
  }

  TEST_CASE("triple product matches both dense association orders") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto r = random_sparse(7, 15, 0.3, seed);
      const auto a = random_sparse(15, 15, 0.2, seed + 50);
      const auto p = random_sparse(15, 7, 0.3, seed + 90);
      const DenseMatrix left = (r.to_dense() * a.to_dense()) * p.to_dense();
      const DenseMatrix right = r.to_dense() * (a.to_dense() * p.to_dense());
      const DenseMatrix got = sparse_triple_product(r, a, p).to_dense();
      CHECK(relative_error(got, left) <= 1e-12);
      CHECK(relative_error(got, right) <= 1e-12);
    }
  }

  TEST_CASE("triple product dimension mismatch") {
    CHECK_THROWS_AS(sparse_triple_product(CsrMatrix(2, 3), CsrMatrix(4, 4), CsrMatrix(4, 2)), Error);
  }

  TEST_CASE("add and kron") {
    const auto a = random_sparse(3, 4, 0.5, 1);
    const auto b = random_sparse(3, 4, 0.5, 2);
    CHECK(relative_error(add(a, b, Complex(0, 2)).to_dense(),
                         DenseMatrix(a.to_dense() + Complex(0, 2) * b.to_dense())) <= 1e-15);
    const auto c = random_sparse(2, 3, 0.7, 3);
    const DenseMatrix k = kron(a, c).to_dense();
    const DenseMatrix ad = a.to_dense(), cd = c.to_dense();
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 4; ++j)
        CHECK(k.block(2 * i, 3 * j, 2, 3) == ad(i, j) * cd);
  }

  TEST_CASE("mixed dense-sparse products") {
    const auto s = random_sparse(6, 5, 0.4, 4);
    const DenseMatrix d = random_dense(5, 3, 5);
    CHECK(relative_error(multiply(s, d), DenseMatrix(s.to_dense() * d)) <= 1e-14);
    const DenseMatrix e = random_dense(4, 6, 6);
    CHECK(relative_error(multiply(e, s), DenseMatrix(e * s.to_dense())) <= 1e-14);
  }
}

TEST_SUITE("dense") {
  TEST_CASE("dense LU solves diagonal and identity systems") {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 0) = 2.0;
    m(1, 1) = I1;
    ComplexVector b(2);
    b << 2.0, I1;
    const ComplexVector x = dense_lu_solve(m, b);
    CHECK(std::abs(x[0] - 1.0) < 1e-15);
    CHECK(std::abs(x[1] - 1.0) < 1e-15);
    const auto v = random_vector(5, 3);
    CHECK(relative_error(dense_lu_solve(DenseMatrix::Identity(5, 5), v), v) == 0.0);
  }

  TEST_CASE("dense LU residual on random systems") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const DenseMatrix m = random_dense(8, 8, seed);
      const ComplexVector b = random_vector(8, seed + 20);
      const ComplexVector x = dense_lu_solve(m, b);
      const auto sparse = CsrMatrix::from_dense(m);
      CHECK(sparse.residual(x, b).norm() / b.norm() <= 1e-12);
    }
  }

  TEST_CASE("singular matrix names the pivot") {
    DenseMatrix m = DenseMatrix::Identity(3, 3);
    m(2, 2) = 0.0;
    CHECK_THROWS_WITH_AS(DenseLu{m}, doctest::Contains("pivot 2"), Error);
  }

  TEST_CASE("determinant phase and magnitude") {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 0) = -3.0;
    m(1, 1) = Complex(0, 2);
    const DenseLu lu(m);
    CHECK(lu.log_abs_determinant() == doctest::Approx(std::log(6.0)));
    CHECK(std::abs(lu.determinant_phase() - Complex(0, -1)) < 1e-15);
  }

  TEST_CASE("dense limit") {
    CHECK_NOTHROW(require_dense_limit(100, 100, 1e4));
    CHECK_THROWS_AS(require_dense_limit(101, 100, 1e4), DenseLimitError);
  }
}

TEST_SUITE("hpd") {
  TEST_CASE("identity is HPD") { CHECK(cholesky_hpd_test(DenseMatrix::Identity(4, 4)).hpd); }

  TEST_CASE("diag(1,-1) fails at pivot 1") {
    DenseMatrix m = DenseMatrix::Identity(2, 2);
    m(1, 1) = -1.0;
    const auto v = cholesky_hpd_test(m);
    CHECK_FALSE(v.hpd);
    CHECK(v.reason == HpdVerdict::Reason::nonpositive_pivot);
    CHECK(v.pivot == 1);
  }

  TEST_CASE("non-Hermitian input is reported, never silently factored") {
    DenseMatrix m = DenseMatrix::Identity(2, 2);
    m(0, 1) = 0.5;
    const auto v = cholesky_hpd_test(m);
    CHECK_FALSE(v.hpd);
    CHECK(v.reason == HpdVerdict::Reason::non_hermitian);
  }

  TEST_CASE("semidefinite matrices are not HPD") {
    DenseMatrix v = random_dense(6, 3, 4);
    CHECK_FALSE(cholesky_hpd_test(v * v.adjoint()).hpd);
  }

  TEST_CASE("blocked factorization agrees with eigenvalue signs") {
    // Sizes straddle the block size.
    for (Index n : {5, 63, 64, 65, 150}) {
      const DenseMatrix b = random_dense(n, n, static_cast<std::uint64_t>(n));
      DenseMatrix m = b * b.adjoint();
      m.diagonal().array() += 1e-3;
      CHECK(cholesky_hpd_test(m).hpd);
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
      const double shift = 0.5 * (es.eigenvalues()[0] + es.eigenvalues()[1]);
      m.diagonal().array() -= shift;
      const auto verdict = cholesky_hpd_test(m);
      CHECK_FALSE(verdict.hpd);
      CHECK(verdict.reason == HpdVerdict::Reason::nonpositive_pivot);
    }
  }

  TEST_CASE("HPD verdict implies positive Rayleigh quotients") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const DenseMatrix b = random_dense(20, 20, seed);
      DenseMatrix m = b.adjoint() * b;
      m.diagonal().array() += 0.1;
      REQUIRE(cholesky_hpd_test(m).hpd);
      for (std::uint64_t s = 0; s < 50; ++s) {
        const ComplexVector x = random_vector(20, 1000 * seed + s);
        CHECK(std::real(x.dot(m * x)) > 0.0);
      }
    }
  }

  TEST_CASE("quick screen examples") {
    CHECK(quick_pd_screen(DenseMatrix::Identity(3, 3)).pass);
    DenseMatrix a(2, 2);
    a << 1.0, 3.0, 3.0, 1.0;
    const auto v2 = quick_pd_screen(a);
    CHECK_FALSE(v2.pass);
    CHECK(v2.failed_condition == 2);
    DenseMatrix b = DenseMatrix::Zero(2, 2);
    b(0, 0) = 2.0;
    b(1, 1) = -1.0;
    CHECK(quick_pd_screen(b).failed_condition == 1);
  }

  TEST_CASE("quick screen conditions 3 and 4") {
    // Diagonal dominance in pairs but a large off-diagonal imaginary part.
    DenseMatrix c(2, 2);
    c << 1.0, Complex(0, 1.5), Complex(0, -1.5), 1.0;
    CHECK(quick_pd_screen(c).failed_condition == 3);
    // Passes (1)-(3) but has a negative eigenvalue.
    DenseMatrix d(3, 3);
    d << 2.0, -1.9, -1.9, -1.9, 2.0, -1.9, -1.9, -1.9, 2.0;
    CHECK(quick_pd_screen(d).failed_condition == 4);
    const auto skipped = quick_pd_screen(d, 4.0);
    CHECK(skipped.pass);
    CHECK(skipped.determinant_skipped);
  }

  TEST_CASE("screen failure on conditions 1 or 3 implies Cholesky failure") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const DenseMatrix b = random_dense(6, 6, seed);
      DenseMatrix m = 0.5 * (b + b.adjoint());
      m.diagonal().array() += 0.6;
      const auto screen = quick_pd_screen(m);
      if (!screen.pass && (screen.failed_condition == 1 || screen.failed_condition == 3))
        CHECK_FALSE(cholesky_hpd_test(m).hpd);
    }
  }
}

TEST_SUITE("norms") {
  TEST_CASE("spectral norm of simple matrices") {
    CHECK(spectral_norm(DenseMatrix::Identity(5, 5)).value == doctest::Approx(1.0));
    DenseMatrix d = DenseMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    const auto est = spectral_norm(d);
    CHECK(est.converged);
    CHECK(est.value == doctest::Approx(3.0).epsilon(1e-10));
  }

  TEST_CASE("spectral norm matches the SVD and bounds every ratio") {
    const DenseMatrix m = random_dense(30, 30, 17);
    const auto est = spectral_norm(m);
    Eigen::JacobiSVD<DenseMatrix> svd(m);
    CHECK(est.value == doctest::Approx(svd.singularValues()[0]).epsilon(1e-5));
    for (std::uint64_t s = 0; s < 100; ++s) {
      const ComplexVector x = random_vector(30, 500 + s);
      CHECK(est.value >= (m * x).norm() / x.norm() - 1e-8);
    }
  }

  TEST_CASE("non-convergence is reported") {
    const DenseMatrix m = random_dense(30, 30, 18);
    const auto est = spectral_norm(m, 1e-15, 2);
    CHECK_FALSE(est.converged);
    CHECK(est.iterations == 2);
  }

  TEST_CASE("p = 1 condition numbers") {
    CHECK(condition_number_p1(DenseMatrix::Identity(3, 3)) == doctest::Approx(1.0));
    DenseMatrix d = DenseMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 2.0;
    CHECK(condition_number_p1(d) == doctest::Approx(2.0));
    CHECK(norm_p1(d) == doctest::Approx(4.0));
    CHECK_THROWS_AS(condition_number_p1(DenseMatrix::Zero(2, 2)), Error);
  }

  TEST_CASE("hermiticity residual") {
    CHECK(hermiticity_residual(DenseMatrix::Identity(3, 3)) == 0.0);
    DenseMatrix m = DenseMatrix::Identity(2, 2);
    m(0, 1) = 1.0;
    CHECK(hermiticity_residual(m) > 0.1);
  }
}

TEST_SUITE("matrix market") {
  TEST_CASE("round trip preserves every entry bit for bit") {
    const auto a = random_sparse(9, 7, 0.3, 21);
    std::stringstream ss;
    write_matrix_market(ss, a);
    const CsrMatrix b = read_matrix_market(ss);
    CHECK(b.rows() == 9);
    CHECK(b.cols() == 7);
    CHECK(b.to_dense() == a.to_dense());
  }

  TEST_CASE("header and field order") {
    std::stringstream ss;
    write_matrix_market(ss, CsrMatrix::from_triplets(2, 2, {{1, 0, Complex(1.5, -2)}}));
    std::string header, dims, entry;
    std::getline(ss, header);
    CHECK(header == "%%MatrixMarket matrix coordinate complex general");
    std::getline(ss, dims);
    while (!dims.empty() && dims[0] == '%') std::getline(ss, dims);
    CHECK(dims == "2 2 1");
    std::getline(ss, entry);
    CHECK(entry == "2 1 1.5 -2");
  }

  TEST_CASE("real files are accepted, malformed ones rejected") {
    std::stringstream real("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 3.5\n");
    CHECK(read_matrix_market(real).coeff(0, 1) == Complex(3.5));
    std::stringstream bad("%%MatrixMarket matrix coordinate complex general\n2 2 1\n3 1 1 0\n");
    CHECK_THROWS_AS(read_matrix_market(bad), Error);
    std::stringstream wrong("%%MatrixMarket matrix array complex general\n");
    CHECK_THROWS_AS(read_matrix_market(wrong), Error);
  }
}
