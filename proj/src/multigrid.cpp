#include "helmmg/multigrid.hpp"

#include <cmath>

namespace helmmg {

std::string to_string(CoarsenOn mode) {
  return mode == CoarsenOn::csl ? "csl" : "original";
}

CoarsenOn parse_coarsen_on(const std::string& text) {
  if (text == "csl") return CoarsenOn::csl;
  if (text == "original") return CoarsenOn::original;
  throw Error("unknown coarsening operator '" + text + "' (expected csl or original)");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_cycles:
      return "max-cycles";
    case SolveStatus::diverged:
      return "diverged";
  }
  return {};
}

Hierarchy::Hierarchy(const CsrMatrix& fine, const CsrMatrix& coarsen_source,
                     int nodes_per_dim, TransferScheme scheme,
                     HierarchyOptions options)
    : scheme_(scheme) {
  const Index n2 = static_cast<Index>(nodes_per_dim) * nodes_per_dim;
  if (fine.rows() != n2 || fine.cols() != n2 || coarsen_source.rows() != n2 ||
      coarsen_source.cols() != n2)
    throw Error("hierarchy: operators must be " + std::to_string(n2) + "x" +
                std::to_string(n2));

  levels_.push_back(Level{fine, nodes_per_dim, inverse_diagonal(fine), std::nullopt});
  CsrMatrix chain = coarsen_source;
  int n = nodes_per_dim;
  auto may_add_level = [&] {
    return options.max_levels == 0 ||
           static_cast<int>(levels_.size()) < options.max_levels;
  };
  while (n >= options.coarsest_below && may_add_level()) {
    if (n % 2 == 0)
      throw Error("hierarchy: level with " + std::to_string(n) +
                  " nodes per dimension cannot be coarsened (node-coincident "
                  "coarsening needs odd counts); use " +
                  std::to_string(hierarchy_compatible_nodes(nodes_per_dim,
                                                            options.coarsest_below)) +
                  " nodes per dimension");
    TransferPair pair = build_transfer_2d(n, scheme);
    chain = galerkin_coarse(chain, pair);
    levels_.back().transfer = std::move(pair);
    n = coarse_nodes(n);
    levels_.push_back(Level{chain, n, inverse_diagonal(chain), std::nullopt});
  }

  const CsrMatrix& coarsest = levels_.back().op;
  require_dense_limit(coarsest.rows(), coarsest.cols());
  try {
    coarsest_lu_ = DenseLu(coarsest.to_dense());
  } catch (const Error& e) {
    throw Error(std::string("hierarchy: coarsest operator is singular; try a "
                            "different complex shift (") +
                e.what() + ")");
  }
}

std::vector<int> Hierarchy::level_sizes() const {
  std::vector<int> sizes;
  for (const auto& l : levels_) sizes.push_back(l.nodes_per_dim);
  return sizes;
}

Hierarchy build_hierarchy(const ProblemSpec& spec, TransferScheme scheme,
                          CoarsenOn coarsen_on, HierarchyOptions options) {
  spec.validate();
  if (spec.nodes_per_dim < 11)
    throw Error("build_hierarchy: need at least 11 nodes per dimension for two levels");
  const WavenumberField field = build_wavenumber_field(spec);
  const CsrMatrix a = assemble_helmholtz(spec, field, false);
  if (coarsen_on == CoarsenOn::original) {
    return Hierarchy(a, a, spec.nodes_per_dim, scheme, options);
  }
  const CsrMatrix c = assemble_helmholtz(spec, field, true);
  return Hierarchy(a, c, spec.nodes_per_dim, scheme, options);
}

bool coarsens_cleanly(int nodes_per_dim, int coarsest_below) {
  int n = nodes_per_dim;
  while (n >= coarsest_below) {
    if (n % 2 == 0 || n < 3) return false;
    n = (n + 1) / 2;
  }
  return true;
}

int hierarchy_compatible_nodes(int min_nodes, int coarsest_below) {
  int n = std::max(min_nodes, 3);
  while (!coarsens_cleanly(n, coarsest_below)) ++n;
  return n;
}

void CycleConfig::validate() const {
  if (gamma != 1 && gamma != 2) throw Error("cycle gamma must be 1 (V) or 2 (W)");
  if (!(tol > 0.0)) throw Error("tolerance must be positive");
  if (max_cycles < 0) throw Error("max_cycles must be non-negative");
  smoother.validate();
}

void cycle(const Hierarchy& h, std::size_t level, ComplexVector& u,
           const ComplexVector& b, const CycleConfig& cfg, CycleStats* stats) {
  if (stats) {
    if (stats->visits.size() < h.size()) stats->visits.resize(h.size(), 0);
    ++stats->visits[level];
  }
  const Level& lv = h.level(level);
  if (level + 1 == h.size()) {
    u = h.coarsest_solver().solve(b);
    return;
  }
  GmresWorkspace workspace;
  apply_smoother(lv.op, lv.inv_diag, u, b, cfg.smoother, cfg.smoother.pre_steps,
                 workspace);

  const TransferPair& pair = *lv.transfer;
  const ComplexVector r = lv.op.residual(u, b);
  const ComplexVector rc = pair.restriction.multiply(r);
  ComplexVector ec = ComplexVector::Zero(rc.size());
  for (int g = 0; g < cfg.gamma; ++g) cycle(h, level + 1, ec, rc, cfg, stats);
  u += pair.prolongation.multiply(ec);

  apply_smoother(lv.op, lv.inv_diag, u, b, cfg.smoother, cfg.smoother.steps,
                 workspace);
}

SolveResult solve(const Hierarchy& h, const ComplexVector& b, const CycleConfig& cfg) {
  cfg.validate();
  const CsrMatrix& a = h.level(0).op;
  if (b.size() != a.rows())
    throw Error("solve: right-hand side has length " + std::to_string(b.size()) +
                ", expected " + std::to_string(a.rows()));
  if (!b.allFinite()) throw Error("solve: right-hand side is not finite");

  SolveResult result;
  result.u = ComplexVector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    result.status = SolveStatus::converged;
    return result;
  }
  for (int c = 0; c < cfg.max_cycles; ++c) {
    cycle(h, 0, result.u, b, cfg);
    const double rel = a.residual(result.u, b).norm() / bnorm;
    result.cycles = c + 1;
    result.residual_history.push_back(rel);
    if (!std::isfinite(rel) || rel > cfg.divergence_threshold) {
      result.status = SolveStatus::diverged;
      return result;
    }
    if (rel <= cfg.tol) {
      result.status = SolveStatus::converged;
      return result;
    }
  }
  result.status = SolveStatus::max_cycles;
  return result;
}

}  // namespace helmmg
