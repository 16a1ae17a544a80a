// rng.hpp: the project's versioned pseudo-random stream.
//
// Algorithm "trisep-rng-v1":
//   engine   std::mt19937_64 seeded with the 64-bit seed (fully specified by ISO C++)
//   uniform  (engine() >> 11) * 2^-53, in [0, 1)
//   normal   Box-Muller, one output per two uniforms: sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//   complex  (normal() + i normal()) / sqrt(2)
// Standard-library distributions are avoided because their output is
// implementation-defined; this keeps seeds reproducible across toolchains.

#pragma once

#include "trisep/tensor_core.hpp"

#include <cstdint>
#include <random>

namespace trisep {

class Rng {
 public:
  static constexpr const char* kAlgorithm = "trisep-rng-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();
  Complex complex_normal();

  // Uniform point in the closed complex disk of the given radius.
  Complex disk(double radius);

  Vector gaussian_vector(int n);
  Vector unit_vector(int n);
  Matrix gaussian_matrix(int rows, int cols);
  // Haar unitary: Gram-Schmidt on Gaussian columns.
  Matrix haar_unitary(int n);

  // Child stream for a named sub-task; keeps sibling streams independent of
  // how many draws a previous sub-task made.
  Rng fork(std::uint64_t salt);

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive per-item seeds from a batch seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace trisep
