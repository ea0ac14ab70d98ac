#pragma once

// Multilevel hierarchy and V-/W-cycle iteration.
//
// Level 0 smooths and computes residuals with the unshifted operator A. The
// coarse operators come from a Galerkin chain that starts either from the
// shifted Laplacian C (CoarsenOn::csl) or from A itself.

#include <optional>
#include <string>
#include <vector>

#include "helmmg/linalg.hpp"
#include "helmmg/problem.hpp"
#include "helmmg/smoothing.hpp"
#include "helmmg/transfer.hpp"

namespace helmmg {

enum class CoarsenOn { csl, original };

std::string to_string(CoarsenOn mode);
CoarsenOn parse_coarsen_on(const std::string& text);

struct Level {
  CsrMatrix op;
  int nodes_per_dim = 0;
  ComplexVector inv_diag;
  /// Transfer to the next coarser level; absent on the coarsest level.
  std::optional<TransferPair> transfer;
};

struct HierarchyOptions {
  /// Coarsening stops once nodes per dimension drops below this.
  int coarsest_below = 10;
  /// Upper bound on the number of levels (0 = unlimited).
  int max_levels = 0;
};

class Hierarchy {
 public:
  /// `fine` is used for smoothing/residuals on level 0; the Galerkin chain
  /// starts from `coarsen_source`.
  Hierarchy(const CsrMatrix& fine, const CsrMatrix& coarsen_source,
            int nodes_per_dim, TransferScheme scheme,
            HierarchyOptions options = {});

  std::size_t size() const { return levels_.size(); }
  const Level& level(std::size_t l) const { return levels_.at(l); }
  const std::vector<Level>& levels() const { return levels_; }
  const DenseLu& coarsest_solver() const { return coarsest_lu_; }
  TransferScheme scheme() const { return scheme_; }

  /// Nodes per dimension on each level, finest first.
  std::vector<int> level_sizes() const;

 private:
  std::vector<Level> levels_;
  DenseLu coarsest_lu_;
  TransferScheme scheme_;
};

Hierarchy build_hierarchy(const ProblemSpec& spec, TransferScheme scheme,
                          CoarsenOn coarsen_on, HierarchyOptions options = {});

/// True if repeated node-coincident halving of n reaches fewer than
/// `coarsest_below` nodes with every intermediate count odd.
bool coarsens_cleanly(int nodes_per_dim, int coarsest_below = 10);

/// Smallest n >= min_nodes that coarsens cleanly.
int hierarchy_compatible_nodes(int min_nodes, int coarsest_below = 10);

struct CycleConfig {
  int gamma = 1;  ///< 1 = V-cycle, 2 = W-cycle
  SmootherConfig smoother;
  double tol = 1e-5;
  int max_cycles = 1000;
  double divergence_threshold = 1e8;

  void validate() const;
};

/// Per-level visit counters, filled when passed to cycle().
struct CycleStats {
  std::vector<long> visits;
};

/// One multigrid cycle starting at `level`; updates u in place.
void cycle(const Hierarchy& h, std::size_t level, ComplexVector& u,
           const ComplexVector& b, const CycleConfig& cfg,
           CycleStats* stats = nullptr);

enum class SolveStatus { converged, max_cycles, diverged };
std::string to_string(SolveStatus status);

struct SolveResult {
  ComplexVector u;
  int cycles = 0;
  /// Relative residual ||b - A u|| / ||b|| after each cycle.
  std::vector<double> residual_history;
  SolveStatus status = SolveStatus::max_cycles;

  double final_relative_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
};

/// Stationary iteration u <- cycle(u) from u = 0 until the relative residual
/// reaches cfg.tol, cfg.max_cycles is hit, or the residual exceeds the
/// divergence threshold.
SolveResult solve(const Hierarchy& h, const ComplexVector& b, const CycleConfig& cfg);

}  // namespace helmmg
