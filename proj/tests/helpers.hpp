#pragma once

#include "trisep/rng.hpp"
#include "trisep/tensor_core.hpp"

namespace testing_support {

using namespace trisep;

// Random PSD operator of the given rank, trace 1.
inline DensityOperator random_density(const TriDims& dims, int rank, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix g = rng.gaussian_matrix(dims.total(), rank);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityOperator(dims, m, true);
}

inline Matrix random_hermitian(int n, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix g = rng.gaussian_matrix(n, n);
  return g + g.adjoint();
}

inline Vector basis(int n, int k) { return Vector::Unit(n, k); }

}  // namespace testing_support
