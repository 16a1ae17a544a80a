// kernel_search.hpp: product vectors in the kernel of a tripartite operator,
// projector subtraction, and the range vectors derived from a kernel triple.
//
// A product |e,f,g> lies in the kernel iff it is orthogonal to a range basis
// {psi_i}. Contracting one party with a chosen vector and parametrizing a
// second as u0 + alpha u1 turns the constraints into a pencil
// (M0 + alpha M1) s = 0 on the third party's vector s.

#pragma once

#include "trisep/numlin.hpp"
#include "trisep/tensor_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trisep {

enum class KernelStrategy {
  Auto,
  LocalSupport,     // a kernel vector of one marginal, padded with arbitrary factors
  Underdetermined,  // Alice fixed (or random), Bob parametrized, Charlie solved; rank < dC
  AliceSweep,       // Alice swept until the constraints drop to dC, then Bob/Charlie pencil
  CharlieSweep,     // Charlie swept on a random line, Alice parametrized, Bob solved
  RandomBob,        // Bob random, Alice parametrized, Charlie solved from a square pencil
  Generic,          // all party arrangements with random and swept free vectors
};

const char* strategy_name(KernelStrategy s);
KernelStrategy parse_strategy(const std::string& name);

struct KernelSearchOptions {
  KernelStrategy strategy = KernelStrategy::Auto;
  std::uint64_t seed = 0;
  // Alice's vector for the Underdetermined path; random when unset.
  std::optional<Vector> alice;
  double tol = 1e-8;          // target: ||rho|e,f,g>|| <= tol * ||rho||_F
  double accept_tol = 1e-6;   // best candidate is still returned up to this, flagged off-target
  RankTolerance rank{};
  int generic_trials = 8;
  int polish_rounds = 4;
};

struct ProductKernelVector {
  Vector e;  // unit, Alice
  Vector f;  // unit, Bob
  Vector g;  // unit, Charlie
  double residual = 0.0;  // ||rho |e,f,g>||
  std::optional<Complex> alpha;  // pencil root behind the parametrized factor
  KernelStrategy strategy = KernelStrategy::Auto;
  bool within_target = false;    // residual <= tol * ||rho||_F

  StateVector vector(const TriDims& dims) const { return product_vector(e, f, g, dims); }
};

// Throws KernelEmptyError for full-rank rho and NoProductKernelVectorError
// (carrying the best residual seen) when no candidate is within accept_tol.
ProductKernelVector find_product_kernel_vector(const DensityOperator& rho, const KernelSearchOptions& opts = {});

struct Subtraction {
  DensityOperator rho;  // rho - lambda |v><v|
  double lambda = 0.0;
};

// lambda = 1 / <v|rho^+|v>, the largest t keeping rho - t|v><v| positive.
Subtraction subtract_projector(const DensityOperator& rho, const Vector& v, const RangeOptions& opts = {});
Subtraction subtract_projector(const DensityOperator& rho, const StateVector& v, const RangeOptions& opts = {});

struct DerivedRangeVectors {
  // rho|e^,f,g> = |e^> |psi_bc>; residual is the leftover along |e>.
  Vector psi_bc;
  double bc_residual = 0.0;
  // Only when dB = 2: rho|e,f^,g> = |f^> |psi_ac>.
  std::optional<Vector> psi_ac;
  double ac_residual = 0.0;
  // One per orthonormal complement direction g^_i of g: the g^_i component of
  // rho|e,f,g^_i> on Alice-Bob. Only the leftover along |g> must vanish.
  std::vector<Vector> psi_ab;
  std::vector<double> ab_residuals;
  Matrix g_complement;  // columns g^_i

  double max_residual() const;
};

// Requires dA = 2. Throws StructureViolationError when a residual exceeds
// tol * ||rho||_F.
DerivedRangeVectors derived_range_vectors(const DensityOperator& rho, const ProductKernelVector& kv,
                                          double tol = 1e-8);

// Orthonormal basis of the complement of a nonzero vector, as columns.
Matrix orthogonal_complement(const Vector& v);

}  // namespace trisep
