// ppt_support.hpp: PPT verdicts over all bipartitions and local support analysis.

#pragma once

#include "trisep/numlin.hpp"
#include "trisep/tensor_core.hpp"

#include <array>

namespace trisep {

inline constexpr double kDefaultPptTol = 1e-9;

struct PptReport {
  // Minimum eigenvalue of rho^{t_S} for S in nontrivial_subsets() order
  // (A, B, C, AB, AC, BC).
  std::array<double, 6> min_eigs{};
  // Minimum eigenvalue of rho itself; a negative value flags a non-PSD input.
  double plain_min_eig = 0.0;
  bool ppt = false;
  double tol = kDefaultPptTol;

  double worst() const;
};

// Complementary partitions must agree to 1e-10 * max(1, ||rho||_F); a larger
// discrepancy raises InternalConsistencyError.
PptReport ppt_check(const DensityOperator& rho, double tol = kDefaultPptTol);

struct SupportProfile {
  std::array<int, 3> dims{};        // M_A, M_B, M_C
  std::array<Matrix, 3> isometries; // d_X x M_X, orthonormal columns spanning each marginal's range

  bool full(const TriDims& ambient) const {
    return dims[0] == ambient.a && dims[1] == ambient.b && dims[2] == ambient.c;
  }
};

SupportProfile local_support(const DensityOperator& rho, const RankTolerance& tol = {});

// (V_A (x) V_B (x) V_C)^dagger rho (V_A (x) V_B (x) V_C) on C^{M_A} (x) C^{M_B} (x) C^{M_C}.
DensityOperator compress_to_support(const DensityOperator& rho, const SupportProfile& support);
// Inverse of compress_to_support for operators living on the support.
DensityOperator embed_from_support(const DensityOperator& compressed, const SupportProfile& support);

}  // namespace trisep
