#pragma once

// Two-grid convergence certificates.
//
// For the two-grid operator with nu post-smoothing steps
//
//   T0 = (I - Q A) S^nu,   Q = P Ac^-1 R,   S = I - X^-1 A,   X = omega diag(A)
//
// write T0 = I - D A. Then T0^H T0 = I - Gamma with
//
//   Gamma = (D A)^H + D A - (D A)^H (D A),
//
// so Gamma HPD certifies ||T0||_2 < 1. The simplified variant drops the
// cross term of D: D~ = M + Q, where M is the nu-step smoother correction
// (I - M A = S^nu, M = X^-1 for nu = 1).
//
// Everything here is dense and guarded by a dense limit.

#include <iosfwd>
#include <string>
#include <vector>

#include "helmmg/linalg.hpp"
#include "helmmg/multigrid.hpp"
#include "helmmg/problem.hpp"
#include "helmmg/transfer.hpp"

namespace helmmg {

struct TwoGridConfig {
  CsrMatrix a;              ///< fine operator
  CsrMatrix coarse_source;  ///< A or C; Ac = R * coarse_source * P
  TransferPair pair;
  double omega = 4.5;
  int nu = 1;
  double dense_limit = kDefaultDenseLimit;

  Index size() const { return a.rows(); }
  void validate() const;
};

/// Assembles A (and C when coarsening on the CSL) from `spec`.
TwoGridConfig make_two_grid_config(const ProblemSpec& spec, TransferScheme scheme,
                                   CoarsenOn coarsen_on, double omega = 4.5,
                                   int nu = 1);

/// Precomputed pieces shared by the dense assemblies.
class TwoGridOperators {
 public:
  explicit TwoGridOperators(const TwoGridConfig& cfg);

  const TwoGridConfig& config() const { return cfg_; }
  Index size() const { return cfg_.size(); }

  /// Q Y = P Ac^-1 R Y.
  DenseMatrix apply_coarse_correction(const DenseMatrix& y) const;
  ComplexVector apply_coarse_correction(const ComplexVector& y) const;
  /// Q^H y.
  ComplexVector apply_coarse_correction_adjoint(const ComplexVector& y) const;

  /// S^nu y and (S^nu)^H y.
  ComplexVector apply_smoother(const ComplexVector& y) const;
  ComplexVector apply_smoother_adjoint(const ComplexVector& y) const;

  /// T0 y and T0^H y without forming T0.
  ComplexVector apply_t0(const ComplexVector& y) const;
  ComplexVector apply_t0_adjoint(const ComplexVector& y) const;

  /// Dense S^nu.
  DenseMatrix smoother_power() const;
  /// Dense M with I - M A = S^nu (zero for nu = 0).
  DenseMatrix smoother_correction() const;
  /// Dense Q.
  DenseMatrix coarse_correction() const;

 private:
  TwoGridConfig cfg_;
  ComplexVector x_inv_;  // diagonal of X^-1
  DenseMatrix coarse_inverse_;
};

/// D with I - D A = T0.
DenseMatrix assemble_D(const TwoGridOperators& ops);
/// D~ = M + Q.
DenseMatrix assemble_D_tilde(const TwoGridOperators& ops);
/// Dense T0 = (I - Q A) S^nu.
DenseMatrix two_grid_operator(const TwoGridOperators& ops);
/// Gamma (simplified = false) or Gamma~ (simplified = true).
DenseMatrix assemble_gamma(const TwoGridOperators& ops, bool simplified);

/// G + G^H - G^H G with a full product so that rounding shows up in the
/// Hermiticity residual.
DenseMatrix gamma_from_product(const DenseMatrix& g);

struct EigenEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Smallest eigenvalue of an HPD matrix, as 1 / lambda_max(M^-1) by Lanczos
/// on the LU solve (relative tolerance tol).
EigenEstimate smallest_eigenvalue(const DenseMatrix& m, double tol = 1e-10,
                                  int max_iter = 10000);

struct CertificateReport {
  Index unknowns = 0;
  int nu = 1;
  double omega = 4.5;

  double hermiticity_residual_gamma = 0.0;
  double hermiticity_residual_gamma_tilde = 0.0;
  HpdVerdict hpd_gamma;
  HpdVerdict hpd_gamma_tilde;
  ScreenVerdict quick_screen;  ///< applied to Gamma~

  NormEstimate spectral_norm_t0;
  NormEstimate sigma_max_da;
  /// Set only when Gamma is HPD.
  EigenEstimate lambda_min_gamma;

  /// ||Gamma~||_1 / kappa_1(Gamma~) = 1 / ||Gamma~^-1||_1.
  double ratio_table_value = 0.0;
  /// sqrt|1 - ratio_table_value|.
  double bound_value = 0.0;

  /// Gamma~ HPD implies Gamma HPD.
  bool tilde_implies_gamma = true;
  /// Gamma HPD implies ||T0|| < 1, ||T0|| <= sqrt|1 - lambda_min| + 1e-8,
  /// sigma_max(DA) < 2 + 1e-8. Vacuously true otherwise.
  bool hpd_norm_bounds_hold = true;
  /// nu = 0: the ratio has no smoother contribution.
  bool degenerate_smoothing = false;

  std::vector<std::string> findings;
};

struct CertifyOptions {
  double hpd_tol = 1e-12;
  double norm_tol = 1e-10;
  int norm_max_iter = 20000;
  double eig_tol = 1e-10;
  int eig_max_iter = 10000;
};

CertificateReport certify(const TwoGridConfig& cfg, const CertifyOptions& options = {});

/// Only Gamma~ and its p = 1 ratio; used by the omega sweep. 0 when Gamma~
/// is singular.
double ratio_table_value(const TwoGridOperators& ops);

struct OmegaSweepCell {
  double k = 0.0;
  double omega = 0.0;
  int nu = 0;
  double ratio = 0.0;
  bool degenerate = false;
};

/// ratio_table_value over the (k, omega, nu) grid for Bezier transfer with
/// CSL coarsening at beta = 0.7 (other settings from `base`).
std::vector<OmegaSweepCell> omega_sweep(const std::vector<double>& ks,
                                        const std::vector<double>& omegas,
                                        const std::vector<int>& nus,
                                        const ProblemSpec& base = {},
                                        TransferScheme scheme = TransferScheme::bezier,
                                        CoarsenOn coarsen_on = CoarsenOn::csl);

struct ConvergenceTableCell {
  double k = 0.0;
  TransferScheme scheme = TransferScheme::bezier;
  CoarsenOn coarsen_on = CoarsenOn::csl;
  CertificateReport report;
};

/// Full certificate for each k and each (scheme, coarsening) pair, one
/// post-smoothing step.
std::vector<ConvergenceTableCell> convergence_table(const std::vector<double>& ks,
                                                    double omega = 4.5,
                                                    const ProblemSpec& base = {},
                                                    const CertifyOptions& options = {});

/// Header and row for a report; columns are fixed.
std::string certificate_csv_header();
std::string certificate_csv_row(const CertificateReport& r);
void write_certificate_text(std::ostream& out, const CertificateReport& r);

}  // namespace helmmg
