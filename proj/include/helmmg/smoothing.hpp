#pragma once

#include <string>
#include <vector>

#include "helmmg/linalg.hpp"

namespace helmmg {

enum class SmootherKind { jacobi, gmres };

/// omega follows the X = omega * diag(A) convention: one sweep adds
/// (1/omega) diag(A)^-1 r, so omega = 4.5 damps by 1/4.5.
struct SmootherConfig {
  SmootherKind kind = SmootherKind::jacobi;
  double omega = 4.5;
  int restart = 3;   ///< Krylov dimension per GMRES smoothing step
  int steps = 1;     ///< post-smoothing steps per visit
  int pre_steps = 0; ///< pre-smoothing steps per visit

  void validate() const;
  std::string describe() const;
};

/// u + (1/omega) diag(A)^-1 (b - A u). Throws naming the node when a
/// diagonal entry vanishes.
ComplexVector jacobi_sweep(const CsrMatrix& a, const ComplexVector& u,
                           const ComplexVector& b, double omega);

/// diag(A)^-1, or an error naming the first zero diagonal entry.
ComplexVector inverse_diagonal(const CsrMatrix& a);

/// In-place sweep with a precomputed inverse diagonal.
void jacobi_sweep_inplace(const CsrMatrix& a, const ComplexVector& inv_diag,
                          ComplexVector& u, const ComplexVector& b, double omega);

/// Minimal-residual correction from an m-dimensional Krylov space.
///
/// Runs m Arnoldi steps (modified Gram-Schmidt, reorthogonalized when the
/// basis loses orthogonality beyond 1e-8) on A c = b - A u starting from c = 0
/// and returns u + c. An Arnoldi breakdown means the correction is exact.
ComplexVector gmres_smooth(const CsrMatrix& a, const ComplexVector& u,
                           const ComplexVector& b, int m);

/// Reusable buffers for repeated GMRES smoothing on one level.
class GmresWorkspace {
 public:
  void smooth(const CsrMatrix& a, ComplexVector& u, const ComplexVector& b, int m);

  /// Arnoldi steps taken by the last call (< m after a breakdown).
  int last_steps() const { return last_steps_; }

 private:
  std::vector<ComplexVector> basis_;
  ComplexVector work_;
  int last_steps_ = 0;
};

/// Applies `steps` smoothing steps of the configured kind.
void apply_smoother(const CsrMatrix& a, const ComplexVector& inv_diag,
                    ComplexVector& u, const ComplexVector& b,
                    const SmootherConfig& cfg, int steps,
                    GmresWorkspace& workspace);

}  // namespace helmmg
