#pragma once

// Inter-grid transfer on node-coincident grids: fine node 2j sits on coarse
// node j. Two interpolation stencils are available:
//
//   linear  even nodes copy the coarse value, odd nodes average neighbours.
//   bezier  even nodes use (1/8, 6/8, 1/8) over coarse j-1, j, j+1 (the
//           quadratic rational Bezier weights); odd nodes average neighbours.
//           At the ends the missing 1/8 folds onto the coincident node.
//
// 2D operators are tensor products; restriction is (1/4) P^T.

#include <string>

#include "helmmg/linalg.hpp"

namespace helmmg {

enum class TransferScheme { linear, bezier };

std::string to_string(TransferScheme scheme);
TransferScheme parse_transfer_scheme(const std::string& text);

/// Coarse node count for an odd fine count: (n + 1) / 2.
int coarse_nodes(int fine_nodes);

/// n_fine x (n_fine + 1)/2 interpolation matrix with real entries.
CsrMatrix build_prolongation_1d(int fine_nodes, TransferScheme scheme);

struct TransferPair {
  CsrMatrix prolongation;  ///< fine x coarse
  CsrMatrix restriction;   ///< coarse x fine, exactly (1/4) prolongation^T
  TransferScheme scheme = TransferScheme::bezier;
  int fine_nodes_per_dim = 0;
  int coarse_nodes_per_dim = 0;
};

TransferPair build_transfer_2d(int fine_nodes_per_dim, TransferScheme scheme);

/// R * A * P.
CsrMatrix galerkin_coarse(const CsrMatrix& fine_operator, const TransferPair& pair);

}  // namespace helmmg
