#include "helmmg/smoothing.hpp"

#include <cmath>
#include <sstream>

namespace helmmg {

namespace {

constexpr double kBreakdown = 1e-14;
constexpr double kReorthogonalize = 1e-8;

void check_sizes(const CsrMatrix& a, const ComplexVector& u, const ComplexVector& b) {
  if (a.rows() != a.cols() || u.size() != a.cols() || b.size() != a.rows())
    throw Error("smoother: operator " + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + ", u has length " +
                std::to_string(u.size()) + ", b has length " +
                std::to_string(b.size()));
}

// Rotation [c s; -conj(s) c] that zeroes the second component of (x, y).
struct Givens {
  double c = 1.0;
  Complex s = 0.0;

  static Givens zeroing(Complex x, Complex y) {
    Givens g;
    const double ay = std::abs(y);
    if (ay == 0.0) return g;
    const double ax = std::abs(x);
    if (ax == 0.0) {
      g.c = 0.0;
      g.s = std::conj(y) / ay;
      return g;
    }
    const double t = std::hypot(ax, ay);
    g.c = ax / t;
    g.s = (x / ax) * std::conj(y) / t;
    return g;
  }

  void apply(Complex& x, Complex& y) const {
    const Complex nx = c * x + s * y;
    y = -std::conj(s) * x + c * y;
    x = nx;
  }
};

}  // namespace

void SmootherConfig::validate() const {
  if (kind == SmootherKind::jacobi && !(omega > 0.0))
    throw Error("jacobi smoother requires omega > 0");
  if (kind == SmootherKind::gmres && restart < 1)
    throw Error("gmres smoother requires a Krylov dimension of at least 1");
  if (steps < 0 || pre_steps < 0) throw Error("smoothing step counts must be >= 0");
}

std::string SmootherConfig::describe() const {
  std::ostringstream os;
  if (kind == SmootherKind::jacobi) os << "jacobi(omega=" << omega << ")";
  else os << "gmres(" << restart << ")";
  os << " nu=" << steps;
  if (pre_steps > 0) os << " nu_pre=" << pre_steps;
  return os.str();
}

ComplexVector inverse_diagonal(const CsrMatrix& a) {
  const ComplexVector d = a.diagonal_values();
  ComplexVector inv(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    if (!(std::abs(d[i]) > kDropTolerance))
      throw Error("jacobi: zero diagonal entry at node " + std::to_string(i));
    inv[i] = 1.0 / d[i];
  }
  return inv;
}

void jacobi_sweep_inplace(const CsrMatrix& a, const ComplexVector& inv_diag,
                          ComplexVector& u, const ComplexVector& b, double omega) {
  const ComplexVector r = a.residual(u, b);
  const double damping = 1.0 / omega;
  for (Index i = 0; i < u.size(); ++i) u[i] += damping * inv_diag[i] * r[i];
}

ComplexVector jacobi_sweep(const CsrMatrix& a, const ComplexVector& u,
                           const ComplexVector& b, double omega) {
  check_sizes(a, u, b);
  if (!(omega > 0.0)) throw Error("jacobi: omega must be positive");
  ComplexVector out = u;
  jacobi_sweep_inplace(a, inverse_diagonal(a), out, b, omega);
  return out;
}

void GmresWorkspace::smooth(const CsrMatrix& a, ComplexVector& u,
                            const ComplexVector& b, int m) {
  if (m < 1) throw Error("gmres: Krylov dimension must be at least 1");
  const Index n = u.size();
  last_steps_ = 0;
  ComplexVector r = a.residual(u, b);
  const double beta = r.norm();
  if (beta == 0.0) return;

  if (static_cast<int>(basis_.size()) < m + 1) basis_.resize(static_cast<std::size_t>(m) + 1);
  for (auto& v : basis_)
    if (v.size() != n) v.resize(n);
  basis_[0] = r / beta;

  DenseMatrix hess = DenseMatrix::Zero(m + 1, m);
  std::vector<Givens> rotations(static_cast<std::size_t>(m));
  ComplexVector g = ComplexVector::Zero(m + 1);
  g[0] = beta;

  int steps = 0;
  for (int j = 0; j < m; ++j) {
    work_ = a.multiply(basis_[j]);
    for (int i = 0; i <= j; ++i) {
      const Complex hij = basis_[i].dot(work_);
      hess(i, j) += hij;
      work_ -= hij * basis_[i];
    }
    double wnorm = work_.norm();
    double loss = 0.0;
    for (int i = 0; i <= j && wnorm > 0.0; ++i)
      loss = std::max(loss, std::abs(basis_[i].dot(work_)) / wnorm);
    if (loss > kReorthogonalize) {
      for (int i = 0; i <= j; ++i) {
        const Complex hij = basis_[i].dot(work_);
        hess(i, j) += hij;
        work_ -= hij * basis_[i];
      }
      wnorm = work_.norm();
    }
    hess(j + 1, j) = wnorm;

    for (int i = 0; i < j; ++i) rotations[i].apply(hess(i, j), hess(i + 1, j));
    rotations[j] = Givens::zeroing(hess(j, j), hess(j + 1, j));
    rotations[j].apply(hess(j, j), hess(j + 1, j));
    rotations[j].apply(g[j], g[j + 1]);
    steps = j + 1;

    if (wnorm < kBreakdown * beta) break;
    if (j + 1 < m) basis_[j + 1] = work_ / wnorm;
  }

  // Back substitution on the rotated (upper-triangular) Hessenberg block.
  ComplexVector y(steps);
  for (int i = steps - 1; i >= 0; --i) {
    Complex s = g[i];
    for (int k = i + 1; k < steps; ++k) s -= hess(i, k) * y[k];
    y[i] = s / hess(i, i);
  }
  for (int i = 0; i < steps; ++i) u += y[i] * basis_[i];
  last_steps_ = steps;
}

ComplexVector gmres_smooth(const CsrMatrix& a, const ComplexVector& u,
                           const ComplexVector& b, int m) {
  check_sizes(a, u, b);
  ComplexVector out = u;
  GmresWorkspace ws;
  ws.smooth(a, out, b, m);
  return out;
}

void apply_smoother(const CsrMatrix& a, const ComplexVector& inv_diag,
                    ComplexVector& u, const ComplexVector& b,
                    const SmootherConfig& cfg, int steps,
                    GmresWorkspace& workspace) {
  for (int s = 0; s < steps; ++s) {
    if (cfg.kind == SmootherKind::jacobi)
      jacobi_sweep_inplace(a, inv_diag, u, b, cfg.omega);
    else
      workspace.smooth(a, u, b, cfg.restart);
  }
}

}  // namespace helmmg
