#include <doctest.h>

#include "helmmg/problem.hpp"
#include "helmmg/transfer.hpp"
#include "helpers.hpp"

using namespace helmmg;

TEST_SUITE("transfer") {
  TEST_CASE("1D linear interpolation of a hat") {
    const auto p = build_prolongation_1d(5, TransferScheme::linear);
    CHECK(p.rows() == 5);
    CHECK(p.cols() == 3);
    ComplexVector c(3);
    c << 0.0, 1.0, 0.0;
    const ComplexVector f = spmv(p, c);
    const double expected[5] = {0.0, 0.5, 1.0, 0.5, 0.0};
    for (int i = 0; i < 5; ++i) CHECK(f[i] == Complex(expected[i]));
  }

  TEST_CASE("1D Bezier weights") {
    const auto p = build_prolongation_1d(5, TransferScheme::bezier);
    ComplexVector c(3);
    c << 0.0, 1.0, 0.0;
    const ComplexVector f = spmv(p, c);
    CHECK(f[2] == Complex(0.75));
    CHECK(f[1] == Complex(0.5));
    CHECK(f[0] == Complex(0.125));
    // Boundary fold: the missing neighbour weight lands on the coincident node.
    CHECK(p.coeff(0, 0) == Complex(0.875));
    CHECK(p.coeff(0, 1) == Complex(0.125));
    CHECK(p.coeff(4, 2) == Complex(0.875));
  }

  TEST_CASE("every prolongation row sums to one") {
    for (auto scheme : {TransferScheme::linear, TransferScheme::bezier}) {
      for (int n = 3; n <= 1025; n += 2) {
        const auto p = build_prolongation_1d(n, scheme);
        REQUIRE(p.cols() == (n + 1) / 2);
        for (Index i = 0; i < p.rows(); ++i) {
          Complex sum = 0.0;
          for (auto v : p.row_values(i)) sum += v;
          CHECK(sum == Complex(1.0));
        }
      }
    }
  }

  TEST_CASE("even fine sizes are rejected") {
    CHECK_THROWS_AS(build_prolongation_1d(4, TransferScheme::linear), Error);
    CHECK_THROWS_AS(build_transfer_2d(6, TransferScheme::bezier), Error);
    CHECK(coarse_nodes(9) == 5);
  }

  TEST_CASE("2D pair: tensor product and exact restriction scaling") {
    for (auto scheme : {TransferScheme::linear, TransferScheme::bezier}) {
      for (int n : {3, 5, 9, 17}) {
        const auto pair = build_transfer_2d(n, scheme);
        const auto p1 = build_prolongation_1d(n, scheme);
        CHECK(pair.prolongation.to_dense() == kron(p1, p1).to_dense());
        CHECK(pair.restriction.to_dense() == DenseMatrix(0.25 * pair.prolongation.to_dense().transpose()));
        const ComplexVector ones = ComplexVector::Ones(pair.prolongation.cols());
        CHECK((spmv(pair.prolongation, ones) - ComplexVector::Ones(pair.prolongation.rows())).norm() == 0.0);
        // Index layout: coarse node (I, J) sits on fine node (2I, 2J).
        const int m = pair.coarse_nodes_per_dim;
        for (int J = 0; J < m; ++J)
          for (int I = 0; I < m; ++I) {
            const Complex w = pair.prolongation.coeff(node_index(2 * I, 2 * J, n), node_index(I, J, m));
            CHECK(w == p1.coeff(2 * I, I) * p1.coeff(2 * J, J));
          }
      }
    }
  }

  TEST_CASE("Bezier centre value is (6/8)^2") {
    const auto pair = build_transfer_2d(5, TransferScheme::bezier);
    ComplexVector c = ComplexVector::Zero(9);
    c[node_index(1, 1, 3)] = 1.0;
    CHECK(spmv(pair.prolongation, c)[node_index(2, 2, 5)] == Complex(9.0 / 16.0));
  }

  TEST_CASE("restriction of ones against the dense transpose") {
    const auto pair = build_transfer_2d(9, TransferScheme::bezier);
    const ComplexVector ones = ComplexVector::Ones(81);
    const ComplexVector oracle = 0.25 * pair.prolongation.to_dense().transpose() * ones;
    CHECK(testing::relative_error(spmv(pair.restriction, ones), oracle) <= 1e-15);
  }

  TEST_CASE("R P is nonsingular") {
    for (auto scheme : {TransferScheme::linear, TransferScheme::bezier})
      for (int n : {5, 9, 17, 33}) {
        const auto pair = build_transfer_2d(n, scheme);
        const DenseMatrix rp = pair.restriction.to_dense() * pair.prolongation.to_dense();
        CHECK_NOTHROW(DenseLu{rp});
        Eigen::JacobiSVD<DenseMatrix> svd(rp);
        CHECK(svd.singularValues().minCoeff() > 1e-3);
      }
  }

  TEST_CASE("Galerkin product matches the dense triple product") {
    for (auto scheme : {TransferScheme::linear, TransferScheme::bezier}) {
      const auto spec = ProblemSpec::variable(4.0, 12.0, Profile::sharp, 5, 33);
      const auto c = assemble_helmholtz(spec, build_wavenumber_field(spec), true);
      const auto pair = build_transfer_2d(33, scheme);
      const DenseMatrix oracle =
          pair.restriction.to_dense() * c.to_dense() * pair.prolongation.to_dense();
      const auto ac = galerkin_coarse(c, pair);
      CHECK(ac.rows() == 17 * 17);
      CHECK(testing::relative_error(ac.to_dense(), oracle) <= 1e-13);
      // Complex symmetry survives R = P^T / 4.
      CHECK(testing::relative_error(ac.to_dense(), DenseMatrix(ac.to_dense().transpose())) <= 1e-14);
    }
  }

  TEST_CASE("Galerkin of a random sparse operator") {
    const auto pair = build_transfer_2d(9, TransferScheme::bezier);
    const auto a = testing::random_sparse(81, 81, 0.05, 77);
    const DenseMatrix oracle = pair.restriction.to_dense() * a.to_dense() * pair.prolongation.to_dense();
    CHECK(testing::relative_error(galerkin_coarse(a, pair).to_dense(), oracle) <= 1e-13);
    CHECK_THROWS_AS(galerkin_coarse(CsrMatrix::identity(80), pair), Error);
  }

  TEST_CASE("scheme names") {
    CHECK(parse_transfer_scheme("bezier") == TransferScheme::bezier);
    CHECK(to_string(TransferScheme::linear) == "linear");
    CHECK_THROWS_AS(parse_transfer_scheme("cubic"), Error);
  }
}
