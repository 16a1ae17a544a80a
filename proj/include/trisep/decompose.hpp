// decompose.hpp: explicit product-state decompositions of rank-N canonical
// states and the end-to-end separability certificate.

#pragma once

#include "trisep/canonical.hpp"
#include "trisep/numlin.hpp"
#include "trisep/ppt_support.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace trisep {

struct ProductTerm {
  double weight = 0.0;
  Vector a;  // unit, C^dA
  Vector b;  // unit, C^dB
  Vector c;  // unit, C^dC
};

struct ProductDecomposition {
  TriDims dims;
  std::vector<ProductTerm> terms;

  // Sum of w |a,b,c><a,b,c| using the factors as stored.
  Matrix reconstruct() const;
  double total_weight() const;
};

struct VerificationReport {
  double residual = 0.0;                      // ||rho - sum||_F
  double relative = 0.0;                      // residual / ||rho||_F
  std::array<double, 3> marginal_residuals{}; // per-party reduced-operator mismatch
  double tol = 0.0;
  bool passed = false;
};

// Passes when residual <= tol * ||rho||_F. Negative or non-finite weights
// raise InvalidDecompositionError.
VerificationReport verify_decomposition(const DensityOperator& rho, const ProductDecomposition& dec,
                                        double tol = 1e-8);

// Joint eigenbasis {f_n} of B, C, D; term n is the product of
// conj(d_n, 1), conj(c_n, b_n, 1) and sqrt(F)|f_n>, mapped back through the
// pivot rotation. Weights are the squared norms of the unnormalized factors.
ProductDecomposition decompose_canonical(const CanonicalForm& cf, const JointDiagOptions& opts = {});

struct CertifyOptions {
  CanonicalOptions canonical{};
  PivotSearchOptions pivot{};
  double ppt_tol = kDefaultPptTol;
  double joint_tol = 1e-9;
  double reconstruction_tol = 1e-8;  // relative to ||rho||_F
  std::uint64_t seed = 0;
};

struct SeparabilityCertificate {
  ProductDecomposition decomposition;
  PptReport ppt;
  double reconstruction_residual = 0.0;
  double state_norm = 0.0;
  CanonicalForm canonical;
  CanonicalResiduals canonical_residuals;
  std::array<int, 3> support_dims{};
  bool charlie_compressed = false;
  bool computational_pivot = true;
  std::vector<std::string> pruned;  // one line per dropped zero-weight term
  CertifyOptions options;

  bool verified() const;
};

// Core step: pivot search, canonical extraction and decomposition of a
// state that already satisfies r(rho) = N on dims (2,3,N).
SeparabilityCertificate decompose_rank_n(const DensityOperator& rho, const CertifyOptions& opts = {});

// Full pipeline: PPT check, Charlie support compression, rank check, then
// decompose_rank_n. Every refusal is an exception naming the failed
// precondition; no entanglement claim is ever made.
SeparabilityCertificate certify_rank_n_separability(const DensityOperator& rho, const CertifyOptions& opts = {});

}  // namespace trisep
