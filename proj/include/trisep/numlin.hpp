// numlin.hpp: tolerance-aware dense linear algebra used by every higher-level
// routine: rank/kernel decisions, Hermitian spectra, joint diagonalization of
// commuting normal matrices, matrix-pencil roots and range-restricted inverse
// quadratic forms.

#pragma once

#include "trisep/tensor_core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace trisep {

// Rank threshold = rel_tol * sigma_max * max(rows, cols), unless an absolute
// threshold is given.
struct RankTolerance {
  double rel_tol = 1e-9;
  std::optional<double> abs_threshold;
};

struct RankKernel {
  int rank = 0;
  Matrix kernel_basis;              // orthonormal columns spanning the right kernel
  Eigen::VectorXd singular_values;  // descending
  double threshold = 0.0;

  int kernel_dim() const { return static_cast<int>(kernel_basis.cols()); }
  // Smallest kept singular value over the threshold (infinite when nothing is
  // kept or the threshold is zero).
  double kept_margin() const;
  // Threshold over the largest dropped singular value (infinite when nothing
  // was dropped or that value is exactly zero).
  double dropped_margin() const;
};

RankKernel rank_kernel(const Matrix& m, const RankTolerance& tol = {});

struct HermitianEig {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // unitary, columns match values
};

// Symmetrizes (H + H^dagger)/2 before solving; inputs whose anti-Hermitian part
// exceeds tol * max(1, ||H||_F) raise HermiticityError.
HermitianEig hermitian_eig(const Matrix& h, double hermiticity_tol = 1e-10);

// Principal square root and inverse square root of a Hermitian PSD matrix.
Matrix psd_sqrt(const Matrix& h);

struct JointDiagOptions {
  double tol = 1e-9;          // commutator / normality tolerance (relative)
  double cluster_rel = 1e-7;  // eigenvalue gap below cluster_rel * spread groups a cluster
  std::uint64_t seed = 0;
};

struct JointSpectrum {
  Matrix basis;                      // unitary; column n is |f_n>
  std::vector<Vector> eigenvalues;   // eigenvalues[k](n) = <f_n|M_k|f_n>
  std::vector<double> residuals;     // per input: max_n ||M f_n - lambda_n f_n||
};

// Pairwise commutator and normality tests use scale max(1, ||X||_F ||Y||_F).
double commutator_scale(const Matrix& x, const Matrix& y);

JointSpectrum joint_diagonalize(std::span<const Matrix> ops, const JointDiagOptions& opts = {});

enum class PencilStatus { Regular, IdenticallySingular };

struct PencilRoots {
  std::vector<Complex> roots;
  PencilStatus status = PencilStatus::Regular;
};

// Finite roots of det(M0 + alpha M1) = 0 through the generalized eigenproblem
// (-M0) v = alpha M1 v. Identically singular pencils return no roots and the
// IdenticallySingular status (every alpha then has a nontrivial kernel).
PencilRoots pencil_roots(const Matrix& m0, const Matrix& m1);

// Smallest singular value and its right singular vector.
struct SmallestSingular {
  double value;
  Vector vector;
};
SmallestSingular smallest_singular(const Matrix& m);

struct RangeOptions {
  RankTolerance rank{};
  double range_tol = 1e-8;  // allowed ||v - P_range v|| / ||v||
  double zero_tol = 1e-14;  // ||v|| below this is degenerate
};

struct RangeQuadratic {
  double lambda;            // 1 / <v|rho^+|v>
  double range_residual;    // ||v - P_range v|| / ||v||
};

RangeQuadratic range_inverse_quadratic(const Matrix& rho, const Vector& v, const RangeOptions& opts = {});

}  // namespace trisep
