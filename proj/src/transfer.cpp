#include "helmmg/transfer.hpp"

#include <vector>

namespace helmmg {

std::string to_string(TransferScheme scheme) {
  return scheme == TransferScheme::linear ? "linear" : "bezier";
}

TransferScheme parse_transfer_scheme(const std::string& text) {
  if (text == "linear") return TransferScheme::linear;
  if (text == "bezier") return TransferScheme::bezier;
  throw Error("unknown transfer scheme '" + text + "' (expected linear or bezier)");
}

int coarse_nodes(int fine_nodes) {
  if (fine_nodes < 3 || fine_nodes % 2 == 0)
    throw Error("coarsening needs an odd fine node count >= 3, got " +
                std::to_string(fine_nodes));
  return (fine_nodes + 1) / 2;
}

CsrMatrix build_prolongation_1d(int fine_nodes, TransferScheme scheme) {
  const int m = coarse_nodes(fine_nodes);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(3) * fine_nodes);
  for (int i = 0; i < fine_nodes; ++i) {
    if (i % 2 == 1) {
      t.push_back({i, (i - 1) / 2, 0.5});
      t.push_back({i, (i + 1) / 2, 0.5});
      continue;
    }
    const int c = i / 2;
    if (scheme == TransferScheme::linear) {
      t.push_back({i, c, 1.0});
      continue;
    }
    double centre = 6.0 / 8.0;
    if (c - 1 >= 0) t.push_back({i, c - 1, 1.0 / 8.0});
    else centre += 1.0 / 8.0;
    if (c + 1 < m) t.push_back({i, c + 1, 1.0 / 8.0});
    else centre += 1.0 / 8.0;
    t.push_back({i, c, centre});
  }
  return CsrMatrix::from_triplets(fine_nodes, m, std::move(t));
}

TransferPair build_transfer_2d(int fine_nodes_per_dim, TransferScheme scheme) {
  const CsrMatrix p1 = build_prolongation_1d(fine_nodes_per_dim, scheme);
  TransferPair pair;
  // Lexicographic ordering with x fastest: index = j*n + i, so P = P_y (x) P_x.
  pair.prolongation = kron(p1, p1);
  pair.restriction = pair.prolongation.transpose().scaled(0.25);
  pair.scheme = scheme;
  pair.fine_nodes_per_dim = fine_nodes_per_dim;
  pair.coarse_nodes_per_dim = coarse_nodes(fine_nodes_per_dim);
  return pair;
}

CsrMatrix galerkin_coarse(const CsrMatrix& fine_operator, const TransferPair& pair) {
  return sparse_triple_product(pair.restriction, fine_operator, pair.prolongation);
}

}  // namespace helmmg
