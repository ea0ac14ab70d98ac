#include "helmmg/certificate.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace helmmg {

namespace {

constexpr double kBoundSlack = 1e-8;

DenseMatrix identity(Index n) { return DenseMatrix::Identity(n, n); }

std::string verdict_cell(const HpdVerdict& v) { return v.hpd ? "hpd" : "not-hpd"; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

void TwoGridConfig::validate() const {
  const Index n = a.rows();
  if (a.cols() != n || coarse_source.rows() != n || coarse_source.cols() != n)
    throw Error("two-grid config: fine operators must be square and of equal size");
  if (pair.prolongation.rows() != n || pair.restriction.cols() != n ||
      pair.restriction.rows() != pair.prolongation.cols())
    throw Error("two-grid config: transfer pair does not match the fine operator");
  if (!(omega > 0.0)) throw Error("two-grid config: omega must be positive");
  if (nu < 0) throw Error("two-grid config: nu must be non-negative");
  require_dense_limit(n, n, dense_limit);
}

TwoGridConfig make_two_grid_config(const ProblemSpec& spec, TransferScheme scheme,
                                   CoarsenOn coarsen_on, double omega, int nu) {
  spec.validate();
  const WavenumberField field = build_wavenumber_field(spec);
  TwoGridConfig cfg;
  cfg.a = assemble_helmholtz(spec, field, false);
  cfg.coarse_source =
      coarsen_on == CoarsenOn::csl ? assemble_helmholtz(spec, field, true) : cfg.a;
  cfg.pair = build_transfer_2d(spec.nodes_per_dim, scheme);
  cfg.omega = omega;
  cfg.nu = nu;
  return cfg;
}

TwoGridOperators::TwoGridOperators(const TwoGridConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const ComplexVector d = cfg_.a.diagonal_values();
  x_inv_.resize(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    if (!(std::abs(d[i]) > kDropTolerance))
      throw Error("two-grid config: zero diagonal entry at node " + std::to_string(i));
    x_inv_[i] = 1.0 / (cfg_.omega * d[i]);
  }
  const CsrMatrix ac = galerkin_coarse(cfg_.coarse_source, cfg_.pair);
  try {
    coarse_inverse_ = DenseLu(ac.to_dense()).inverse();
  } catch (const DenseLimitError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string("two-grid config: coarse operator is singular (") +
                e.what() + ")");
  }
}

DenseMatrix TwoGridOperators::apply_coarse_correction(const DenseMatrix& y) const {
  const DenseMatrix rc = multiply(cfg_.pair.restriction, y);
  const DenseMatrix ec = coarse_inverse_ * rc;
  return multiply(cfg_.pair.prolongation, ec);
}

ComplexVector TwoGridOperators::apply_coarse_correction(const ComplexVector& y) const {
  const ComplexVector ec = coarse_inverse_ * cfg_.pair.restriction.multiply(y);
  return cfg_.pair.prolongation.multiply(ec);
}

ComplexVector TwoGridOperators::apply_coarse_correction_adjoint(
    const ComplexVector& y) const {
  const ComplexVector ec =
      coarse_inverse_.adjoint() * cfg_.pair.prolongation.multiply_adjoint(y);
  return cfg_.pair.restriction.multiply_adjoint(ec);
}

ComplexVector TwoGridOperators::apply_smoother(const ComplexVector& y) const {
  ComplexVector z = y;
  for (int s = 0; s < cfg_.nu; ++s)
    z -= x_inv_.cwiseProduct(cfg_.a.multiply(z));
  return z;
}

ComplexVector TwoGridOperators::apply_smoother_adjoint(const ComplexVector& y) const {
  ComplexVector z = y;
  for (int s = 0; s < cfg_.nu; ++s)
    z -= cfg_.a.multiply_adjoint(x_inv_.conjugate().cwiseProduct(z));
  return z;
}

ComplexVector TwoGridOperators::apply_t0(const ComplexVector& y) const {
  const ComplexVector z = apply_smoother(y);
  return z - apply_coarse_correction(cfg_.a.multiply(z));
}

ComplexVector TwoGridOperators::apply_t0_adjoint(const ComplexVector& y) const {
  const ComplexVector z = y - cfg_.a.multiply_adjoint(apply_coarse_correction_adjoint(y));
  return apply_smoother_adjoint(z);
}

DenseMatrix TwoGridOperators::smoother_power() const {
  DenseMatrix s = identity(size());
  for (int k = 0; k < cfg_.nu; ++k)
    s -= x_inv_.asDiagonal() * multiply(cfg_.a, s);
  return s;
}

DenseMatrix TwoGridOperators::smoother_correction() const {
  // M_{j+1} = X^-1 + (I - X^-1 A) M_j, M_0 = 0.
  DenseMatrix m = DenseMatrix::Zero(size(), size());
  for (int k = 0; k < cfg_.nu; ++k) {
    DenseMatrix next = m - x_inv_.asDiagonal() * multiply(cfg_.a, m);
    next.diagonal() += x_inv_;
    m = std::move(next);
  }
  return m;
}

DenseMatrix TwoGridOperators::coarse_correction() const {
  const DenseMatrix right = multiply(coarse_inverse_, cfg_.pair.restriction);
  return multiply(cfg_.pair.prolongation, right);
}

DenseMatrix assemble_D(const TwoGridOperators& ops) {
  // T0 = (I - Q A)(I - M A) = I - (M + Q - Q A M) A.
  const DenseMatrix m = ops.smoother_correction();
  DenseMatrix rest = identity(ops.size()) - multiply(ops.config().a, m);
  return m + ops.apply_coarse_correction(rest);
}

DenseMatrix assemble_D_tilde(const TwoGridOperators& ops) {
  return ops.smoother_correction() + ops.coarse_correction();
}

DenseMatrix two_grid_operator(const TwoGridOperators& ops) {
  const DenseMatrix s = ops.smoother_power();
  return s - ops.apply_coarse_correction(multiply(ops.config().a, s));
}

DenseMatrix gamma_from_product(const DenseMatrix& g) {
  DenseMatrix out(g.rows(), g.cols());
  out.noalias() = -(g.adjoint() * g);
  out += g;
  out += g.adjoint();
  return out;
}

DenseMatrix assemble_gamma(const TwoGridOperators& ops, bool simplified) {
  const Index n = ops.size();
  DenseMatrix g;
  if (simplified) {
    // D~ A = (I - S^nu) + Q A
    g = identity(n) - ops.smoother_power();
    g += ops.apply_coarse_correction(ops.config().a.to_dense());
  } else {
    g = identity(n) - two_grid_operator(ops);
  }
  return gamma_from_product(g);
}

EigenEstimate smallest_eigenvalue(const DenseMatrix& m, double tol, int max_iter) {
  if (m.rows() != m.cols()) throw Error("smallest_eigenvalue: matrix not square");
  if (max_iter < 1) throw Error("smallest_eigenvalue: max_iter must be at least 1");
  EigenEstimate est;
  if (m.rows() == 0) return est;
  // lambda_min(M) = 1 / lambda_max(M^-1) for HPD M.
  const DenseLu lu(m);
  const NormEstimate inv = largest_eigenvalue_hermitian(
      m.rows(), [&](const ComplexVector& x) { return lu.solve(x); }, tol, max_iter);
  est.value = 1.0 / inv.value;
  est.converged = inv.converged;
  est.iterations = inv.iterations;
  return est;
}

double ratio_table_value(const TwoGridOperators& ops) {
  const DenseMatrix gamma_tilde = assemble_gamma(ops, true);
  // A singular Gamma~ has an unbounded inverse: the ratio is 0.
  try {
    return 1.0 / norm_p1(DenseLu(gamma_tilde).inverse());
  } catch (const Error&) {
    return 0.0;
  }
}

CertificateReport certify(const TwoGridConfig& cfg, const CertifyOptions& options) {
  const TwoGridOperators ops(cfg);
  CertificateReport r;
  r.unknowns = ops.size();
  r.nu = cfg.nu;
  r.omega = cfg.omega;
  r.degenerate_smoothing = cfg.nu == 0;

  {
    const DenseMatrix gamma = assemble_gamma(ops, false);
    r.hermiticity_residual_gamma = hermiticity_residual(gamma);
    r.hpd_gamma = cholesky_hpd_test(gamma, options.hpd_tol);
    if (r.hpd_gamma.hpd) {
      r.lambda_min_gamma = smallest_eigenvalue(gamma, options.eig_tol, options.eig_max_iter);
      if (!r.lambda_min_gamma.converged)
        r.findings.push_back("lambda_min(Gamma) did not converge in " +
                             std::to_string(r.lambda_min_gamma.iterations) +
                             " iterations");
    }
  }

  {
    const DenseMatrix gamma_tilde = assemble_gamma(ops, true);
    r.hermiticity_residual_gamma_tilde = hermiticity_residual(gamma_tilde);
    r.hpd_gamma_tilde = cholesky_hpd_test(gamma_tilde, options.hpd_tol);
    try {
      r.quick_screen = quick_pd_screen(gamma_tilde, cfg.dense_limit);
    } catch (const Error& e) {
      r.quick_screen.pass = false;
      r.quick_screen.detail = e.what();
    }
    try {
      r.ratio_table_value = 1.0 / norm_p1(DenseLu(gamma_tilde).inverse());
    } catch (const Error& e) {
      r.ratio_table_value = 0.0;
      r.findings.push_back(std::string("Gamma~ is singular: ") + e.what());
    }
    r.bound_value = std::sqrt(std::abs(1.0 - r.ratio_table_value));
  }

  r.spectral_norm_t0 = spectral_norm(
      ops.size(), [&](const ComplexVector& x) { return ops.apply_t0(x); },
      [&](const ComplexVector& x) { return ops.apply_t0_adjoint(x); },
      options.norm_tol, options.norm_max_iter);
  // D A = I - T0
  r.sigma_max_da = spectral_norm(
      ops.size(), [&](const ComplexVector& x) -> ComplexVector { return x - ops.apply_t0(x); },
      [&](const ComplexVector& x) -> ComplexVector { return x - ops.apply_t0_adjoint(x); },
      options.norm_tol, options.norm_max_iter);
  if (!r.spectral_norm_t0.converged)
    r.findings.push_back("power iteration for ||T0|| did not converge");
  if (!r.sigma_max_da.converged)
    r.findings.push_back("power iteration for sigma_max(DA) did not converge");

  if (r.hpd_gamma_tilde.hpd && !r.hpd_gamma.hpd) {
    r.tilde_implies_gamma = false;
    r.findings.push_back("Gamma~ is HPD but Gamma is not");
  }
  if (r.hpd_gamma.hpd) {
    const double t0 = r.spectral_norm_t0.value;
    const double bound = std::sqrt(std::abs(1.0 - r.lambda_min_gamma.value));
    if (!(t0 < 1.0)) {
      r.hpd_norm_bounds_hold = false;
      r.findings.push_back("Gamma is HPD but ||T0|| = " + fmt(t0) + " >= 1");
    }
    if (!(t0 <= bound + kBoundSlack)) {
      r.hpd_norm_bounds_hold = false;
      r.findings.push_back("||T0|| = " + fmt(t0) + " exceeds sqrt|1 - lambda_min| = " +
                           fmt(bound));
    }
    if (!(r.sigma_max_da.value < 2.0 + kBoundSlack)) {
      r.hpd_norm_bounds_hold = false;
      r.findings.push_back("Gamma is HPD but sigma_max(DA) = " +
                           fmt(r.sigma_max_da.value) + " >= 2");
    }
  }
  if (r.degenerate_smoothing)
    r.findings.push_back("nu = 0: no smoothing, ratio reflects the coarse correction only");
  return r;
}

std::vector<OmegaSweepCell> omega_sweep(const std::vector<double>& ks,
                                        const std::vector<double>& omegas,
                                        const std::vector<int>& nus,
                                        const ProblemSpec& base, TransferScheme scheme,
                                        CoarsenOn coarsen_on) {
  std::vector<OmegaSweepCell> cells;
  for (double k : ks) {
    ProblemSpec spec = base;
    spec.kind = WavenumberKind::constant;
    spec.k = k;
    spec.nodes_per_dim = nodes_for_wavenumber(k);
    for (double omega : omegas) {
      for (int nu : nus) {
        const TwoGridOperators ops(make_two_grid_config(spec, scheme, coarsen_on, omega, nu));
        cells.push_back({k, omega, nu, ratio_table_value(ops), nu == 0});
      }
    }
  }
  return cells;
}

std::vector<ConvergenceTableCell> convergence_table(const std::vector<double>& ks,
                                                    double omega, const ProblemSpec& base,
                                                    const CertifyOptions& options) {
  std::vector<ConvergenceTableCell> cells;
  for (double k : ks) {
    ProblemSpec spec = base;
    spec.kind = WavenumberKind::constant;
    spec.k = k;
    spec.nodes_per_dim = nodes_for_wavenumber(k);
    for (TransferScheme scheme : {TransferScheme::linear, TransferScheme::bezier}) {
      for (CoarsenOn on : {CoarsenOn::original, CoarsenOn::csl}) {
        ConvergenceTableCell cell{k, scheme, on, {}};
        cell.report = certify(make_two_grid_config(spec, scheme, on, omega, 1), options);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::string certificate_csv_header() {
  return "unknowns,omega,nu,hermiticity_gamma,hermiticity_gamma_tilde,hpd_gamma,"
         "hpd_gamma_tilde,quick_screen,norm_t0,sigma_max_da,lambda_min_gamma,"
         "ratio,bound,tilde_implies_gamma,norm_bounds_hold";
}

std::string certificate_csv_row(const CertificateReport& r) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << r.unknowns << ',' << r.omega << ',' << r.nu << ','
     << r.hermiticity_residual_gamma << ',' << r.hermiticity_residual_gamma_tilde << ','
     << verdict_cell(r.hpd_gamma) << ',' << verdict_cell(r.hpd_gamma_tilde) << ','
     << (r.quick_screen.pass ? std::string("pass")
                             : "fail" + std::to_string(r.quick_screen.failed_condition))
     << ',' << r.spectral_norm_t0.value << ',' << r.sigma_max_da.value << ',';
  if (r.hpd_gamma.hpd) os << r.lambda_min_gamma.value;
  os << ',' << r.ratio_table_value << ',' << r.bound_value << ','
     << (r.tilde_implies_gamma ? 1 : 0) << ',' << (r.hpd_norm_bounds_hold ? 1 : 0);
  return os.str();
}

void write_certificate_text(std::ostream& out, const CertificateReport& r) {
  out << std::setprecision(6);
  out << "unknowns            " << r.unknowns << "\n"
      << "omega, nu           " << r.omega << ", " << r.nu << "\n"
      << "Gamma               " << r.hpd_gamma.describe()
      << " (hermiticity " << r.hermiticity_residual_gamma << ")\n"
      << "Gamma~              " << r.hpd_gamma_tilde.describe()
      << " (hermiticity " << r.hermiticity_residual_gamma_tilde << ")\n"
      << "quick screen        "
      << (r.quick_screen.pass ? std::string("pass")
                              : "fail at condition " +
                                    std::to_string(r.quick_screen.failed_condition))
      << (r.quick_screen.determinant_skipped ? " (determinant skipped)" : "") << "\n"
      << "||T0||_2            " << r.spectral_norm_t0.value
      << (r.spectral_norm_t0.converged ? "" : " (not converged)") << "\n"
      << "sigma_max(DA)       " << r.sigma_max_da.value
      << (r.sigma_max_da.converged ? "" : " (not converged)") << "\n";
  if (r.hpd_gamma.hpd)
    out << "lambda_min(Gamma)   " << r.lambda_min_gamma.value << "\n";
  out << "||G~||_1/k_1(G~)    " << r.ratio_table_value << "\n"
      << "bound               " << r.bound_value << "\n";
  for (const auto& f : r.findings) out << "finding: " << f << "\n";
}

}  // namespace helmmg
