// canonical.hpp: canonical form of rank-N PPT states on C^2 (x) C^3 (x) C^N.
//
// In the filtered frame (Charlie filtered by F^{-1/2}, pivot rotated to
// |1_A, 2_B>) the state has block grid
//     block(p, q) = W_p^dagger W_q,   W = (DC, DB, D, C, B, I),
// with B, C, D mutually commuting normal operators on Charlie's space, and the
// unfiltered state is (I (x) sqrt(F)) [W^dagger W] (I (x) sqrt(F)).

#pragma once

#include "trisep/numlin.hpp"
#include "trisep/ppt_support.hpp"
#include "trisep/tensor_core.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace trisep {

struct Pivot {
  Vector a;  // unit vector on Alice
  Vector b;  // unit vector on Bob
};

// (|1_A>, |2_B>).
Pivot default_pivot();

// Unitary U with U v = |k> for a unit vector v.
Matrix rotation_to_basis(const Vector& v, int k);

struct CanonicalForm {
  Matrix B;
  Matrix C;
  Matrix D;
  Matrix F;  // Hermitian positive definite
  Pivot pivot = default_pivot();
  // Local unitaries taking the pivot to (|1_A>, |2_B>); identity for the default pivot.
  Matrix rot_a = Matrix::Identity(2, 2);
  Matrix rot_b = Matrix::Identity(3, 3);

  int n() const { return static_cast<int>(F.rows()); }
  // The Charlie filter F^{-1/2} applied during extraction.
  Matrix charlie_filter() const;
  // (DC, DB, D, C, B, I).
  std::array<Matrix, 6> row_blocks() const;
};

// Norms of [B,B^+], [C,C^+], [D,D^+], [C,B], [C,B^+], [C,D], [C,D^+], [B,D], [B,D^+].
std::array<double, 9> commutator_norms(const CanonicalForm& cf);
// The same commutators divided by commutator_scale of their arguments.
std::array<double, 9> scaled_commutator_norms(const CanonicalForm& cf);

struct CanonicalResiduals {
  // Frobenius deviation of each 6x6 block (pivot frame) from the rebuilt form.
  std::array<std::array<double, 6>, 6> blocks{};
  double delta = 0.0;        // ||E_2 - (DB)^+(DB)||, filtered frame
  double delta_tilde = 0.0;  // ||E_1 - (DC)^+(DC)||, filtered frame
  std::array<double, 9> commutators{};

  double max_block() const;
};

struct CanonicalOptions {
  double residual_tol = 1e-8;    // block residuals relative to ||rho||_F
  double commutator_tol = 1e-9;  // scaled commutator norms
  double ppt_tol = kDefaultPptTol;
  RankTolerance rank{};
  double eigen_floor = 1e-12;    // pivot block eigenvalues below floor * lambda_max are rank loss
};

struct CanonicalExtraction {
  CanonicalForm form;
  CanonicalResiduals residuals;
};

CanonicalExtraction extract_canonical(const DensityOperator& rho, const Pivot& pivot = default_pivot(),
                                      const CanonicalOptions& opts = {});

DensityOperator build_from_canonical(const CanonicalForm& cf, bool normalize, double commutator_tol = 1e-9);

struct PivotSearchOptions {
  int max_trials = 64;
  std::uint64_t seed = 0;
  RankTolerance rank{};
  // Hits with sigma_min / sigma_max below this keep the search going; the best
  // rank-N candidate is returned if nothing better turns up.
  double min_conditioning = 1e-6;
};

struct PivotHit {
  Pivot pivot;
  RankKernel block_rank;
  bool computational = false;
  int trials = 0;
};

std::optional<PivotHit> find_full_rank_pivot(const DensityOperator& rho, const PivotSearchOptions& opts = {});

// The 5N vectors |xy>|v> - |12> M |v> (M = DC, DB, D, C, B) as columns,
// expressed in the filtered pivot frame.
Matrix structural_kernel_vectors(const CanonicalForm& cf);

// rho mapped into the filtered pivot frame of `cf`.
Matrix filtered_pivot_frame(const DensityOperator& rho, const CanonicalForm& cf);

// Maps filtered-frame vectors back to the frame of the original state.
Matrix to_original_frame(const CanonicalForm& cf, const Matrix& filtered_vectors);

}  // namespace trisep
