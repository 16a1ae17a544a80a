// tensor_core.hpp: index conventions and basic operators on C^dA (x) C^dB (x) C^dC.
//
// Basis kets |i_A, j_B, k_C> are laid out row-major with Alice slowest:
//   flat = (i_A * dB + j_B) * dC + k_C.
// Every block grid, file format and product vector in the project uses it.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trisep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Party : int { A = 0, B = 1, C = 2 };

inline constexpr std::array<Party, 3> kParties{Party::A, Party::B, Party::C};

const char* party_name(Party p);

struct TriDims {
  int a = 2;
  int b = 3;
  int c = 1;

  int total() const { return a * b * c; }
  int operator[](Party p) const;

  friend bool operator==(const TriDims&, const TriDims&) = default;
};

// Validating constructor; non-positive extents raise DimsError.
TriDims make_dims(int a, int b, int c);

// "2x3x4" <-> TriDims.
std::string to_string(const TriDims& dims);
TriDims parse_dims(std::string_view text);

int flat_index(int i_a, int j_b, int k_c, const TriDims& dims);
std::array<int, 3> split_index(int flat, const TriDims& dims);

struct StateVector {
  TriDims dims;
  Vector amplitudes;
};

// Elementary tensor a (x) b (x) c. Dims are taken from the factor sizes.
StateVector product_vector(const Vector& a, const Vector& b, const Vector& c);
// Same, but every factor must match `dims` (DimsError otherwise).
StateVector product_vector(const Vector& a, const Vector& b, const Vector& c, const TriDims& dims);

// A complex square operator tagged with its tripartite dims. `normalized`
// records whether the trace-1 convention has been applied; intermediates
// (filtered states, partial transposes) carry false.
struct DensityOperator {
  TriDims dims;
  Matrix matrix;
  bool normalized = false;

  DensityOperator(const TriDims& dims, Matrix matrix, bool normalized = false);

  int dim() const { return dims.total(); }
  double frobenius() const { return matrix.norm(); }
  Complex trace() const { return matrix.trace(); }
  DensityOperator normalized_copy() const;
};

class PartySubset {
 public:
  constexpr PartySubset() = default;
  static constexpr PartySubset of(std::initializer_list<Party> parties) {
    PartySubset s;
    for (Party p : parties) s.mask_ |= 1u << static_cast<unsigned>(p);
    return s;
  }
  static constexpr PartySubset from_mask(unsigned mask) {
    PartySubset s;
    s.mask_ = mask & 7u;
    return s;
  }

  constexpr bool contains(Party p) const { return (mask_ >> static_cast<unsigned>(p)) & 1u; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool full() const { return mask_ == 7u; }
  constexpr unsigned mask() const { return mask_; }
  constexpr PartySubset complement() const { return from_mask(~mask_); }

  // "A", "AB", "BC", ... ("" for the empty subset).
  std::string label() const;

  friend constexpr bool operator==(PartySubset, PartySubset) = default;

 private:
  unsigned mask_ = 0;
};

// The six nontrivial partitions in report order: A, B, C, AB, AC, BC.
const std::array<PartySubset, 6>& nontrivial_subsets();

Matrix partial_transpose(const Matrix& m, const TriDims& dims, PartySubset subset);
DensityOperator partial_transpose(const DensityOperator& rho, PartySubset subset);

// Vectors pinned on one or two parties; conditional_operator returns
// <v|rho|v> as an operator on the remaining parties (in A, B, C order).
struct Pins {
  std::optional<Vector> a;
  std::optional<Vector> b;
  std::optional<Vector> c;

  const std::optional<Vector>& operator[](Party p) const;
};

Matrix conditional_operator(const DensityOperator& rho, const Pins& pins);

// Single-party marginal: partial trace over the two other parties.
Matrix reduced_operator(const DensityOperator& rho, Party keep);

// The 6x6 grid of N x N blocks E_pq, p = i_A*3 + j_B. Requires dims (2,3,N).
class BlockGrid {
 public:
  static constexpr int kOuter = 6;

  explicit BlockGrid(int n);

  int n() const { return n_; }
  Matrix& at(int p, int q) { return blocks_[static_cast<std::size_t>(p * kOuter + q)]; }
  const Matrix& at(int p, int q) const { return blocks_[static_cast<std::size_t>(p * kOuter + q)]; }

 private:
  int n_;
  std::vector<Matrix> blocks_;
};

BlockGrid block_grid(const DensityOperator& rho);
DensityOperator from_block_grid(const BlockGrid& grid, bool normalized = false);

// Kronecker product of three factors, Alice outermost.
Matrix kron3(const Matrix& a, const Matrix& b, const Matrix& c);
Vector kron3(const Vector& a, const Vector& b, const Vector& c);

struct FilterResult {
  DensityOperator op;
  std::array<double, 3> condition_numbers;
};

// (L_A (x) L_B (x) L_C) rho (L_A (x) L_B (x) L_C)^dagger. Each factor must be
// invertible; condition numbers above `max_condition` raise FilterSingularError.
FilterResult apply_local_filter(const DensityOperator& rho, const Matrix& l_a, const Matrix& l_b,
                                const Matrix& l_c, double max_condition = 1e12);

// Frobenius comparison relative to max(1, ||x||_F).
inline constexpr double kDefaultMatrixTol = 1e-10;
bool approx_equal(const Matrix& x, const Matrix& y, double tol = kDefaultMatrixTol);

}  // namespace trisep
