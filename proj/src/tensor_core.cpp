#include "trisep/tensor_core.hpp"

#include "trisep/errors.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <charconv>
#include <cmath>
#include <limits>

namespace trisep {

const char* party_name(Party p) {
  switch (p) {
    case Party::A: return "A";
    case Party::B: return "B";
    case Party::C: return "C";
  }
  return "?";
}

int TriDims::operator[](Party p) const {
  switch (p) {
    case Party::A: return a;
    case Party::B: return b;
    case Party::C: return c;
  }
  return 0;
}

TriDims make_dims(int a, int b, int c) {
  if (a < 1 || b < 1 || c < 1) {
    throw DimsError("dims must be positive, got " + std::to_string(a) + "x" + std::to_string(b) +
                    "x" + std::to_string(c));
  }
  return TriDims{a, b, c};
}

std::string to_string(const TriDims& dims) {
  return std::to_string(dims.a) + "x" + std::to_string(dims.b) + "x" + std::to_string(dims.c);
}

TriDims parse_dims(std::string_view text) {
  std::array<int, 3> parts{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t end = text.find('x', pos);
    if ((i < 2) == (end == std::string_view::npos)) {
      throw DimsError("dims must look like 2x3xN, got '" + std::string(text) + "'");
    }
    std::string_view field = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw DimsError("dims must look like 2x3xN, got '" + std::string(text) + "'");
    }
    pos = end + 1;
  }
  return make_dims(parts[0], parts[1], parts[2]);
}

int flat_index(int i_a, int j_b, int k_c, const TriDims& dims) {
  if (i_a < 0 || i_a >= dims.a || j_b < 0 || j_b >= dims.b || k_c < 0 || k_c >= dims.c) {
    throw IndexError("basis index (" + std::to_string(i_a) + "," + std::to_string(j_b) + "," +
                     std::to_string(k_c) + ") out of range for dims " + to_string(dims));
  }
  return (i_a * dims.b + j_b) * dims.c + k_c;
}

std::array<int, 3> split_index(int flat, const TriDims& dims) {
  if (flat < 0 || flat >= dims.total()) {
    throw IndexError("flat index " + std::to_string(flat) + " out of range for dims " + to_string(dims));
  }
  const int k = flat % dims.c;
  const int rest = flat / dims.c;
  return {rest / dims.b, rest % dims.b, k};
}

StateVector product_vector(const Vector& a, const Vector& b, const Vector& c) {
  TriDims dims = make_dims(static_cast<int>(a.size()), static_cast<int>(b.size()),
                           static_cast<int>(c.size()));
  return StateVector{dims, kron3(a, b, c)};
}

StateVector product_vector(const Vector& a, const Vector& b, const Vector& c, const TriDims& dims) {
  if (a.size() != dims.a || b.size() != dims.b || c.size() != dims.c) {
    throw DimsError("product_vector: factor sizes " + std::to_string(a.size()) + "x" +
                    std::to_string(b.size()) + "x" + std::to_string(c.size()) + " do not match " +
                    to_string(dims));
  }
  return StateVector{dims, kron3(a, b, c)};
}

DensityOperator::DensityOperator(const TriDims& d, Matrix m, bool is_normalized)
    : dims(d), matrix(std::move(m)), normalized(is_normalized) {
  if (matrix.rows() != dims.total() || matrix.cols() != dims.total()) {
    throw DimsError("operator of size " + std::to_string(matrix.rows()) + "x" +
                    std::to_string(matrix.cols()) + " does not match dims " + to_string(dims));
  }
}

DensityOperator DensityOperator::normalized_copy() const {
  const double tr = matrix.trace().real();
  if (!(tr > 0.0)) throw ArgumentError("cannot normalize an operator with nonpositive trace");
  return DensityOperator(dims, matrix / tr, true);
}

std::string PartySubset::label() const {
  std::string out;
  for (Party p : kParties) {
    if (contains(p)) out += party_name(p);
  }
  return out;
}

const std::array<PartySubset, 6>& nontrivial_subsets() {
  static const std::array<PartySubset, 6> subsets{
      PartySubset::of({Party::A}),          PartySubset::of({Party::B}),
      PartySubset::of({Party::C}),          PartySubset::of({Party::A, Party::B}),
      PartySubset::of({Party::A, Party::C}), PartySubset::of({Party::B, Party::C})};
  return subsets;
}

Matrix partial_transpose(const Matrix& m, const TriDims& dims, PartySubset subset) {
  if (subset.empty() || subset.full()) {
    throw SubsetError("partial transpose needs a nonempty proper subset, got '" + subset.label() + "'");
  }
  const int d = dims.total();
  if (m.rows() != d || m.cols() != d) throw DimsError("partial_transpose: size does not match dims");

  Matrix out(d, d);
  for (int r = 0; r < d; ++r) {
    const auto ri = split_index(r, dims);
    for (int c = 0; c < d; ++c) {
      auto rr = ri;
      auto cc = split_index(c, dims);
      for (Party p : kParties) {
        if (subset.contains(p)) std::swap(rr[static_cast<int>(p)], cc[static_cast<int>(p)]);
      }
      out(flat_index(rr[0], rr[1], rr[2], dims), flat_index(cc[0], cc[1], cc[2], dims)) = m(r, c);
    }
  }
  return out;
}

DensityOperator partial_transpose(const DensityOperator& rho, PartySubset subset) {
  return DensityOperator(rho.dims, partial_transpose(rho.matrix, rho.dims, subset), false);
}

const std::optional<Vector>& Pins::operator[](Party p) const {
  switch (p) {
    case Party::A: return a;
    case Party::B: return b;
    default: return c;
  }
}

Matrix conditional_operator(const DensityOperator& rho, const Pins& pins) {
  int pinned = 0;
  std::array<Matrix, 3> factors;
  for (Party p : kParties) {
    const int d = rho.dims[p];
    if (const auto& v = pins[p]) {
      if (v->size() != d) {
        throw DimsError(std::string("pinned vector for party ") + party_name(p) + " has size " +
                        std::to_string(v->size()) + ", expected " + std::to_string(d));
      }
      factors[static_cast<int>(p)] = *v;
      ++pinned;
    } else {
      factors[static_cast<int>(p)] = Matrix::Identity(d, d);
    }
  }
  if (pinned == 0) throw ArgumentError("conditional_operator: pin at least one party");
  if (pinned == 3) {
    throw ArgumentError("conditional_operator: all three parties pinned; use a quadratic form instead");
  }
  const Matrix v = kron3(factors[0], factors[1], factors[2]);
  return v.adjoint() * rho.matrix * v;
}

Matrix reduced_operator(const DensityOperator& rho, Party keep) {
  const TriDims& dims = rho.dims;
  const int d = dims[keep];
  Matrix out = Matrix::Zero(d, d);
  const int total = dims.total();
  for (int r = 0; r < total; ++r) {
    const auto ri = split_index(r, dims);
    for (int c = 0; c < total; ++c) {
      const auto ci = split_index(c, dims);
      bool traced_match = true;
      for (Party p : kParties) {
        if (p != keep && ri[static_cast<int>(p)] != ci[static_cast<int>(p)]) traced_match = false;
      }
      if (traced_match) out(ri[static_cast<int>(keep)], ci[static_cast<int>(keep)]) += rho.matrix(r, c);
    }
  }
  return out;
}

BlockGrid::BlockGrid(int n) : n_(n), blocks_(kOuter * kOuter, Matrix::Zero(n, n)) {}

BlockGrid block_grid(const DensityOperator& rho) {
  if (rho.dims.a != 2 || rho.dims.b != 3) {
    throw DimsError("block_grid needs dims 2x3xN, got " + to_string(rho.dims));
  }
  const int n = rho.dims.c;
  BlockGrid grid(n);
  for (int p = 0; p < BlockGrid::kOuter; ++p) {
    for (int q = 0; q < BlockGrid::kOuter; ++q) grid.at(p, q) = rho.matrix.block(p * n, q * n, n, n);
  }
  return grid;
}

DensityOperator from_block_grid(const BlockGrid& grid, bool normalized) {
  const int n = grid.n();
  Matrix m(6 * n, 6 * n);
  for (int p = 0; p < BlockGrid::kOuter; ++p) {
    for (int q = 0; q < BlockGrid::kOuter; ++q) m.block(p * n, q * n, n, n) = grid.at(p, q);
  }
  return DensityOperator(TriDims{2, 3, n}, std::move(m), normalized);
}

Matrix kron3(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Matrix ab = Eigen::kroneckerProduct(a, b).eval();
  return Eigen::kroneckerProduct(ab, c).eval();
}

Vector kron3(const Vector& a, const Vector& b, const Vector& c) {
  Vector out(a.size() * b.size() * c.size());
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const Complex ab = a(i) * b(j);
      for (Eigen::Index k = 0; k < c.size(); ++k) out(idx++) = ab * c(k);
    }
  }
  return out;
}

namespace {

double condition_number(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

FilterResult apply_local_filter(const DensityOperator& rho, const Matrix& l_a, const Matrix& l_b,
                                const Matrix& l_c, double max_condition) {
  const std::array<const Matrix*, 3> factors{&l_a, &l_b, &l_c};
  std::array<double, 3> conds{};
  for (Party p : kParties) {
    const Matrix& f = *factors[static_cast<int>(p)];
    const int d = rho.dims[p];
    if (f.rows() != d || f.cols() != d) {
      throw DimsError(std::string("filter factor for party ") + party_name(p) + " must be " +
                      std::to_string(d) + "x" + std::to_string(d));
    }
    conds[static_cast<int>(p)] = condition_number(f);
    if (!(conds[static_cast<int>(p)] <= max_condition)) {
      throw FilterSingularError(std::string("filter factor for party ") + party_name(p) +
                                " is singular (condition number " +
                                std::to_string(conds[static_cast<int>(p)]) + ")");
    }
  }
  const Matrix l = kron3(l_a, l_b, l_c);
  return FilterResult{DensityOperator(rho.dims, l * rho.matrix * l.adjoint(), false), conds};
}

bool approx_equal(const Matrix& x, const Matrix& y, double tol) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
  return (x - y).norm() <= tol * std::max(1.0, x.norm());
}

}  // namespace trisep
