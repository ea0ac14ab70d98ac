#include <doctest.h>

#include "helmmg/problem.hpp"
#include "helmmg/smoothing.hpp"
#include "helpers.hpp"

using namespace helmmg;
using testing::random_vector;
using testing::relative_error;

namespace {

CsrMatrix model_operator(int n = 17, double k = 6.0) {
  const auto spec = ProblemSpec::constant(k, n);
  return assemble_helmholtz(spec, build_wavenumber_field(spec), false);
}

// Minimal residual over u + span{r, Ar, ..., A^{m-1} r} by a dense
// least-squares solve on the monomial basis.
ComplexVector krylov_least_squares(const DenseMatrix& a, const ComplexVector& u,
                                   const ComplexVector& b, int m) {
  const ComplexVector r = b - a * u;
  DenseMatrix basis(a.rows(), m);
  basis.col(0) = r / r.norm();
  for (int j = 1; j < m; ++j) {
    ComplexVector v = a * basis.col(j - 1);
    basis.col(j) = v / v.norm();
  }
  const DenseMatrix ab = a * basis;
  const ComplexVector y = ab.colPivHouseholderQr().solve(r);
  return u + basis * y;
}

}  // namespace

TEST_SUITE("smoothing") {
  TEST_CASE("Jacobi sweep matches the dense formula") {
    const auto a = model_operator();
    const DenseMatrix ad = a.to_dense();
    for (double omega : {1.0, 2.0, 4.5}) {
      const auto u = random_vector(a.rows(), 1);
      const auto b = random_vector(a.rows(), 2);
      const ComplexVector d = ad.diagonal();
      const ComplexVector oracle = u + (1.0 / omega) * (b - ad * u).cwiseQuotient(d);
      CHECK(relative_error(jacobi_sweep(a, u, b, omega), oracle) <= 1e-14);
    }
  }

  TEST_CASE("Jacobi is affine in (u, b)") {
    const auto a = model_operator();
    const auto u1 = random_vector(a.rows(), 3), u2 = random_vector(a.rows(), 4);
    const auto b1 = random_vector(a.rows(), 5), b2 = random_vector(a.rows(), 6);
    const Complex al(0.3, -1.2), be(2.0, 0.5);
    const ComplexVector lhs = jacobi_sweep(a, al * u1 + be * u2, al * b1 + be * b2, 4.5);
    const ComplexVector rhs = al * jacobi_sweep(a, u1, b1, 4.5) + be * jacobi_sweep(a, u2, b2, 4.5);
    CHECK(relative_error(lhs, rhs) <= 1e-13);
  }

  TEST_CASE("Jacobi ignores row scaling") {
    const auto a = model_operator();
    ComplexVector s(a.rows());
    for (Index i = 0; i < s.size(); ++i) s[i] = Complex(1.0 + 0.1 * (i % 7), 0.2 * (i % 3));
    const auto scaled = multiply(CsrMatrix::diagonal(s), a);
    const auto u = random_vector(a.rows(), 7), b = random_vector(a.rows(), 8);
    CHECK(relative_error(jacobi_sweep(scaled, u, s.cwiseProduct(b), 4.5), jacobi_sweep(a, u, b, 4.5)) <= 1e-13);
  }

  TEST_CASE("zero diagonal names the node") {
    const auto a = CsrMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 2, 1.0}, {2, 2, 1.0}});
    CHECK_THROWS_WITH_AS(jacobi_sweep(a, ComplexVector::Zero(3), ComplexVector::Ones(3), 1.0),
                         doctest::Contains("node 1"), Error);
    CHECK_THROWS_AS(jacobi_sweep(CsrMatrix::identity(2), ComplexVector::Zero(2), ComplexVector::Ones(2), 0.0), Error);
  }

  TEST_CASE("GMRES correction is the Krylov least-squares minimizer") {
    const auto a = model_operator(9, 3.0);
    const DenseMatrix ad = a.to_dense();
    for (int m : {1, 2, 3}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto u = random_vector(a.rows(), seed);
        const auto b = random_vector(a.rows(), seed + 10);
        const ComplexVector got = gmres_smooth(a, u, b, m);
        const ComplexVector oracle = krylov_least_squares(ad, u, b, m);
        CHECK((b - ad * got).norm() == doctest::Approx((b - ad * oracle).norm()).epsilon(1e-9));
        CHECK(relative_error(got, oracle) <= 1e-7);
      }
    }
  }

  TEST_CASE("GMRES residual never grows with the Krylov dimension") {
    const auto a = model_operator(33, 12.0);
    const auto u = random_vector(a.rows(), 21);
    const auto b = random_vector(a.rows(), 22);
    double previous = a.residual(u, b).norm();
    for (int m = 1; m <= 8; ++m) {
      const double r = a.residual(gmres_smooth(a, u, b, m), b).norm();
      CHECK(r <= previous * (1.0 + 1e-12));
      previous = r;
    }
  }

  TEST_CASE("GMRES breakdown returns the exact solution") {
    const auto a = CsrMatrix::identity(10).scaled(Complex(2.0, 1.0));
    const auto b = random_vector(10, 1);
    GmresWorkspace ws;
    ComplexVector u = ComplexVector::Zero(10);
    ws.smooth(a, u, b, 3);
    CHECK(ws.last_steps() == 1);
    CHECK(a.residual(u, b).norm() <= 1e-14 * b.norm());
  }

  TEST_CASE("GMRES is homogeneous and leaves exact solutions alone") {
    const auto a = model_operator(17, 6.0);
    const auto u = random_vector(a.rows(), 30), b = random_vector(a.rows(), 31);
    const Complex s(0.0, 3.0);
    CHECK(relative_error(gmres_smooth(a, s * u, s * b, 3), ComplexVector(s * gmres_smooth(a, u, b, 3))) <= 1e-12);
    const ComplexVector exact = spmv(a, u);
    CHECK(relative_error(gmres_smooth(a, u, exact, 3), u) <= 1e-15);
  }

  TEST_CASE("workspace and free function agree") {
    const auto a = model_operator(17, 6.0);
    const auto u0 = random_vector(a.rows(), 40), b = random_vector(a.rows(), 41);
    GmresWorkspace ws;
    ComplexVector u = u0;
    ws.smooth(a, u, b, 3);
    CHECK(relative_error(u, gmres_smooth(a, u0, b, 3)) <= 1e-14);
  }

  TEST_CASE("apply_smoother runs the requested number of steps") {
    const auto a = model_operator();
    const ComplexVector inv = inverse_diagonal(a);
    const auto u0 = random_vector(a.rows(), 50), b = random_vector(a.rows(), 51);
    SmootherConfig cfg;
    cfg.kind = SmootherKind::jacobi;
    GmresWorkspace ws;
    ComplexVector u = u0;
    apply_smoother(a, inv, u, b, cfg, 3, ws);
    ComplexVector oracle = u0;
    for (int s = 0; s < 3; ++s) oracle = jacobi_sweep(a, oracle, b, cfg.omega);
    CHECK(relative_error(u, oracle) <= 1e-14);
    ComplexVector untouched = u0;
    apply_smoother(a, inv, untouched, b, cfg, 0, ws);
    CHECK(untouched == u0);
  }

  TEST_CASE("config validation") {
    SmootherConfig cfg;
    cfg.omega = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = SmootherConfig{};
    cfg.kind = SmootherKind::gmres;
    cfg.restart = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.restart = 3;
    CHECK_NOTHROW(cfg.validate());
  }
}
