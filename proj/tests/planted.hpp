#pragma once

// Matrices with a known psd factorization of size k.

#include <random>

#include "psdrank/polyform.hpp"
#include "test_support.hpp"

namespace psdrank::testing {

inline DenseMatrix planted_psd_product(std::mt19937_64& rng, Index p, Index q, Index k) {
  std::vector<SymMatrix> a, b;
  for (Index i = 0; i < p; ++i) a.push_back(random_psd(rng, k));
  for (Index j = 0; j < q; ++j) b.push_back(random_psd(rng, k));
  DenseMatrix m(p, q);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < q; ++j) m(i, j) = inner(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
  return m;
}

}  // namespace psdrank::testing
