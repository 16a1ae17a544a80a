// statezoo.hpp: seeded generators for test states. Every generator is a pure
// function of its arguments; randomness comes from Rng ("trisep-rng-v1").

#pragma once

#include "trisep/canonical.hpp"
#include "trisep/decompose.hpp"
#include "trisep/tensor_core.hpp"

#include <cstdint>
#include <string>

namespace trisep {

struct CanonicalParams {
  double eigen_radius = 1.0;      // eigenvalues of B, C, D uniform in this complex disk
  double f_condition_cap = 3.0;   // cond(F) <= cap
};

struct CanonicalSample {
  DensityOperator rho;  // trace 1
  CanonicalForm truth;  // F rescaled so that truth rebuilds rho exactly
};

// One Haar U shared by B, C, D, so the three commute up to rounding.
CanonicalSample random_canonical_state(int n, std::uint64_t seed, const CanonicalParams& params = {});

struct SeparableSample {
  DensityOperator rho;
  ProductDecomposition truth;
};

// k random product projectors with Dirichlet(1) weights.
SeparableSample random_separable_state(const TriDims& dims, int k, std::uint64_t seed);
// Same vectors drawn the same way, equal weights 1/k.
SeparableSample product_projector_sum(const TriDims& dims, int k, std::uint64_t seed);

// p |Phi><Phi| + (1 - p) I / D with |Phi> = (|0>|phi0> + |1>|phi1>) / sqrt(2),
// phi0 and phi1 orthonormal on Bob-Charlie, then a random Alice unitary.
Matrix npt_family(const TriDims& dims, const Matrix& alice_unitary, const Vector& phi0, const Vector& phi1, double p);

// Smallest p where the Alice partial transpose of npt_family turns negative,
// by bisection on its minimum eigenvalue.
double npt_threshold(const TriDims& dims, const Matrix& alice_unitary, const Vector& phi0, const Vector& phi1,
                     double tol = 1e-12);

struct NptSample {
  DensityOperator rho;
  double p = 0.0;
  double threshold = 0.0;
};

NptSample random_npt_state(const TriDims& dims, std::uint64_t seed);

enum class GenKind { Canonical, Separable, NptMixture, ProductProjectorSum };

const char* gen_kind_name(GenKind k);
GenKind parse_gen_kind(const std::string& name);  // accepts "npt" for NptMixture

struct GenSpec {
  GenKind kind = GenKind::Canonical;
  TriDims dims{2, 3, 2};
  int rank = 0;  // 0: the kind's default (N for canonical and separable)
  std::uint64_t seed = 0;
  CanonicalParams params{};
};

DensityOperator generate(const GenSpec& spec);

}  // namespace trisep
