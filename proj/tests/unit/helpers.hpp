#pragma once

#include <vector>

#include "helmmg/linalg.hpp"
#include "helmmg/rng.hpp"

namespace testing {

using namespace helmmg;

inline Complex random_complex(SplitMix64& rng) {
  return {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
}

inline ComplexVector random_vector(Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = random_complex(rng);
  return v;
}

inline DenseMatrix random_dense(Index rows, Index cols, std::uint64_t seed) {
  SplitMix64 rng(seed);
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = random_complex(rng);
  return m;
}

// Roughly `density` of the entries are nonzero.
inline CsrMatrix random_sparse(Index rows, Index cols, double density, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Triplet> t;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (rng.uniform() < density) t.push_back({i, j, random_complex(rng)});
  return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

inline double relative_error(const DenseMatrix& a, const DenseMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double relative_error(const ComplexVector& a, const ComplexVector& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace testing
