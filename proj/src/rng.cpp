#include "trisep/rng.hpp"

#include <cmath>
#include <numbers>

namespace trisep {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::numbers::sqrt2;
}

Complex Rng::disk(double radius) {
  const double r = radius * std::sqrt(uniform());
  const double theta = 2.0 * std::numbers::pi * uniform();
  return std::polar(r, theta);
}

Vector Rng::gaussian_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal();
  return v;
}

Vector Rng::unit_vector(int n) {
  Vector v = gaussian_vector(n);
  return v / v.norm();
}

Matrix Rng::gaussian_matrix(int rows, int cols) {
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = complex_normal();
  }
  return m;
}

Matrix Rng::haar_unitary(int n) {
  Matrix q = gaussian_matrix(n, n);
  for (int j = 0; j < n; ++j) {
    // two passes of modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        const Complex overlap = q.col(k).dot(q.col(j));
        q.col(j) -= overlap * q.col(k);
      }
    }
    q.col(j) /= q.col(j).norm();
  }
  return q;
}

Rng Rng::fork(std::uint64_t salt) {
  return Rng(mix_seed(engine_(), salt));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace trisep
