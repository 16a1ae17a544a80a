#include "trisep/canonical.hpp"

#include "trisep/errors.hpp"
#include "trisep/rng.hpp"

#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

namespace trisep {

namespace {

Matrix pivot_rotation(const CanonicalForm& cf) {
  return kron3(cf.rot_a, cf.rot_b, Matrix::Identity(cf.n(), cf.n()));
}

Matrix charlie_lift(const Matrix& op) {
  return Eigen::kroneckerProduct(Matrix::Identity(6, 6), op).eval();
}

bool is_basis_vector(const Vector& v, int k) {
  Vector e = Vector::Zero(v.size());
  e(k) = 1.0;
  return (v - e).norm() == 0.0;
}

// (I (x) sqrt F) W^+ W (I (x) sqrt F) in the pivot frame.
Matrix pivot_frame_state(const CanonicalForm& cf) {
  const int n = cf.n();
  const auto rows = cf.row_blocks();
  Matrix w(n, 6 * n);
  for (int p = 0; p < 6; ++p) w.middleCols(p * n, n) = rows[static_cast<std::size_t>(p)];
  const Matrix lift = charlie_lift(psd_sqrt(cf.F));
  return lift * (w.adjoint() * w) * lift;
}

}  // namespace

Pivot default_pivot() {
  Vector a = Vector::Zero(2);
  Vector b = Vector::Zero(3);
  a(1) = 1.0;
  b(2) = 1.0;
  return Pivot{a, b};
}

Matrix rotation_to_basis(const Vector& v, int k) {
  const Eigen::Index d = v.size();
  if (k < 0 || k >= d) throw IndexError("rotation_to_basis: target index out of range");
  const double norm = v.norm();
  if (!(norm > 0.0)) throw DegenerateVectorError("rotation_to_basis: zero vector");
  const Vector u = v / norm;
  if (is_basis_vector(u, static_cast<int>(k))) return Matrix::Identity(d, d);

  // Complete u to an orthonormal basis, then place u in column k.
  Matrix seed(d, d);
  seed.col(0) = u;
  seed.rightCols(d - 1) = Matrix::Identity(d, d).leftCols(d - 1);
  Eigen::HouseholderQR<Matrix> qr(seed);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  q.col(0) = u;
  Matrix basis(d, d);
  basis.col(k) = u;
  for (Eigen::Index src = 1, dst = 0; src < d; ++src, ++dst) {
    if (dst == k) ++dst;
    basis.col(dst) = q.col(src);
  }
  return basis.adjoint();
}

Matrix CanonicalForm::charlie_filter() const {
  const HermitianEig eig = hermitian_eig(F);
  const Eigen::VectorXd inv_roots = eig.values.cwiseSqrt().cwiseInverse();
  return eig.vectors * inv_roots.asDiagonal() * eig.vectors.adjoint();
}

std::array<Matrix, 6> CanonicalForm::row_blocks() const {
  const int dim = n();
  return {D * C, D * B, D, C, B, Matrix::Identity(dim, dim)};
}

std::array<double, 9> commutator_norms(const CanonicalForm& cf) {
  auto comm = [](const Matrix& x, const Matrix& y) { return (x * y - y * x).norm(); };
  const Matrix bd = cf.B.adjoint(), cd = cf.C.adjoint(), dd = cf.D.adjoint();
  return {comm(cf.B, bd), comm(cf.C, cd), comm(cf.D, dd), comm(cf.C, cf.B), comm(cf.C, bd),
          comm(cf.C, cf.D), comm(cf.C, dd), comm(cf.B, cf.D), comm(cf.B, dd)};
}

std::array<double, 9> scaled_commutator_norms(const CanonicalForm& cf) {
  auto norms = commutator_norms(cf);
  const std::array<std::pair<const Matrix*, const Matrix*>, 9> pairs{
      std::pair{&cf.B, &cf.B}, std::pair{&cf.C, &cf.C}, std::pair{&cf.D, &cf.D},
      std::pair{&cf.C, &cf.B}, std::pair{&cf.C, &cf.B}, std::pair{&cf.C, &cf.D},
      std::pair{&cf.C, &cf.D}, std::pair{&cf.B, &cf.D}, std::pair{&cf.B, &cf.D}};
  for (std::size_t i = 0; i < norms.size(); ++i) {
    norms[i] /= commutator_scale(*pairs[i].first, *pairs[i].second);
  }
  return norms;
}

double CanonicalResiduals::max_block() const {
  double worst = 0.0;
  for (const auto& row : blocks) worst = std::max(worst, *std::max_element(row.begin(), row.end()));
  return worst;
}

CanonicalExtraction extract_canonical(const DensityOperator& rho, const Pivot& pivot,
                                      const CanonicalOptions& opts) {
  if (rho.dims.a != 2 || rho.dims.b != 3) {
    throw DimsError("canonical extraction needs dims 2x3xN, got " + to_string(rho.dims));
  }
  const int n = rho.dims.c;
  const PptReport ppt = ppt_check(rho, opts.ppt_tol);
  if (!ppt.ppt) {
    throw NotPptError("state is not PPT (most negative partial-transpose eigenvalue " +
                      std::to_string(ppt.worst()) + ")");
  }
  const RankKernel rk = rank_kernel(rho.matrix, opts.rank);
  if (rk.rank != n) {
    throw RankMismatchError("rank " + std::to_string(rk.rank) + " differs from N = " + std::to_string(n));
  }

  CanonicalForm cf;
  cf.pivot = pivot;
  cf.rot_a = rotation_to_basis(pivot.a, 1);
  cf.rot_b = rotation_to_basis(pivot.b, 2);
  const Matrix rotation = kron3(cf.rot_a, cf.rot_b, Matrix::Identity(n, n));
  const Matrix corner = rotation * rho.matrix * rotation.adjoint();

  const Matrix e6 = corner.block(5 * n, 5 * n, n, n);
  const HermitianEig pivot_eig = hermitian_eig(e6, 1e-8);
  const double lmax = pivot_eig.values(n - 1);
  const RankKernel pivot_rank = rank_kernel(e6, opts.rank);
  if (!(lmax > 0.0) || pivot_eig.values(0) <= opts.eigen_floor * lmax || pivot_rank.rank < n) {
    throw PivotRankError("pivot block has rank " + std::to_string(pivot_rank.rank) + " < N = " +
                         std::to_string(n) + " (smallest eigenvalue " + std::to_string(pivot_eig.values(0)) + ")");
  }
  cf.F = 0.5 * (e6 + e6.adjoint());

  const Matrix lift = charlie_lift(cf.charlie_filter());
  const Matrix filtered = lift * corner * lift;
  cf.D = filtered.block(5 * n, 2 * n, n, n);
  cf.C = filtered.block(5 * n, 3 * n, n, n);
  cf.B = filtered.block(5 * n, 4 * n, n, n);

  CanonicalExtraction out{cf, {}};
  CanonicalResiduals& res = out.residuals;
  const Matrix rebuilt = pivot_frame_state(cf);
  std::vector<std::pair<int, int>> offending;
  const double block_tol = opts.residual_tol * rho.frobenius();
  for (int p = 0; p < 6; ++p) {
    for (int q = 0; q < 6; ++q) {
      const double r = (corner.block(p * n, q * n, n, n) - rebuilt.block(p * n, q * n, n, n)).norm();
      res.blocks[p][q] = r;
      if (r > block_tol) offending.emplace_back(p, q);
    }
  }
  const Matrix db = cf.D * cf.B;
  const Matrix dc = cf.D * cf.C;
  res.delta = (filtered.block(n, n, n, n) - db.adjoint() * db).norm();
  res.delta_tilde = (filtered.block(0, 0, n, n) - dc.adjoint() * dc).norm();
  res.commutators = commutator_norms(cf);

  if (!offending.empty()) {
    std::string coords;
    for (const auto& [p, q] : offending) coords += " (" + std::to_string(p) + "," + std::to_string(q) + ")";
    throw NotCanonicalizableError("blocks deviate from the canonical outer-product form:" + coords,
                                  std::move(offending));
  }
  const double filtered_tol = opts.residual_tol * filtered.norm();
  if (res.delta > filtered_tol || res.delta_tilde > filtered_tol) {
    throw NotCanonicalizableError("Delta residuals do not vanish (" + std::to_string(res.delta) + ", " +
                                      std::to_string(res.delta_tilde) + ")",
                                  {{1, 1}, {0, 0}});
  }
  const auto scaled = scaled_commutator_norms(cf);
  const auto worst = std::max_element(scaled.begin(), scaled.end());
  if (*worst > opts.commutator_tol) {
    throw NotCanonicalizableError("commutator #" + std::to_string(worst - scaled.begin()) +
                                      " does not vanish (scaled norm " + std::to_string(*worst) + ")",
                                  {});
  }
  return out;
}

DensityOperator build_from_canonical(const CanonicalForm& cf, bool normalize, double commutator_tol) {
  const int n = cf.n();
  if (n < 1 || cf.F.cols() != n || cf.B.rows() != n || cf.B.cols() != n || cf.C.rows() != n ||
      cf.C.cols() != n || cf.D.rows() != n || cf.D.cols() != n) {
    throw InvalidCanonicalError("B, C, D and F must all be N x N");
  }
  if ((cf.F - cf.F.adjoint()).norm() > 1e-10 * std::max(1.0, cf.F.norm())) {
    throw InvalidCanonicalError("F is not Hermitian");
  }
  const HermitianEig f_eig = hermitian_eig(cf.F);
  if (!(f_eig.values(0) > 0.0)) throw InvalidCanonicalError("F is not positive definite");
  const auto scaled = scaled_commutator_norms(cf);
  const auto worst = std::max_element(scaled.begin(), scaled.end());
  if (*worst > commutator_tol) {
    throw InvalidCanonicalError("commutator #" + std::to_string(worst - scaled.begin()) +
                                " does not vanish (scaled norm " + std::to_string(*worst) + ")");
  }
  const Matrix rotation = pivot_rotation(cf);
  const Matrix m = rotation.adjoint() * pivot_frame_state(cf) * rotation;
  DensityOperator rho(TriDims{2, 3, n}, 0.5 * (m + m.adjoint()), false);
  return normalize ? rho.normalized_copy() : rho;
}

std::optional<PivotHit> find_full_rank_pivot(const DensityOperator& rho, const PivotSearchOptions& opts) {
  if (rho.dims.a != 2 || rho.dims.b != 3) {
    throw DimsError("pivot search needs dims 2x3xN, got " + to_string(rho.dims));
  }
  const int n = rho.dims.c;
  std::optional<PivotHit> best;
  double best_conditioning = -1.0;
  int trials = 0;

  auto consider = [&](const Vector& a, const Vector& b, bool computational) -> bool {
    ++trials;
    Pins pins;
    pins.a = a;
    pins.b = b;
    const Matrix block = conditional_operator(rho, pins);
    RankKernel rk = rank_kernel(block, opts.rank);
    if (rk.rank != n) return false;
    const double conditioning = rk.singular_values(n - 1) / rk.singular_values(0);
    if (conditioning > best_conditioning) {
      best_conditioning = conditioning;
      best = PivotHit{Pivot{a, b}, std::move(rk), computational, trials};
    }
    return conditioning >= opts.min_conditioning;
  };

  // Computational sweep, starting at the (|1>, |2>) corner.
  const std::array<std::pair<int, int>, 6> sweep{{{1, 2}, {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}}};
  for (const auto& [ia, jb] : sweep) {
    Vector a = Vector::Zero(2);
    Vector b = Vector::Zero(3);
    a(ia) = 1.0;
    b(jb) = 1.0;
    if (consider(a, b, true)) return best;
  }
  Rng rng(opts.seed);
  for (int t = 0; t < opts.max_trials; ++t) {
    const Vector a = rng.unit_vector(2);
    const Vector b = rng.unit_vector(3);
    if (consider(a, b, false)) return best;
  }
  return best;
}

Matrix structural_kernel_vectors(const CanonicalForm& cf) {
  const int n = cf.n();
  const auto rows = cf.row_blocks();
  Matrix out = Matrix::Zero(6 * n, 5 * n);
  for (int family = 0; family < 5; ++family) {
    const Matrix& m = rows[static_cast<std::size_t>(family)];
    for (int k = 0; k < n; ++k) {
      const int col = family * n + k;
      out(family * n + k, col) = 1.0;
      out.block(5 * n, col, n, 1) = -m.col(k);
    }
  }
  return out;
}

Matrix filtered_pivot_frame(const DensityOperator& rho, const CanonicalForm& cf) {
  const Matrix rotation = pivot_rotation(cf);
  const Matrix lift = charlie_lift(cf.charlie_filter());
  return lift * rotation * rho.matrix * rotation.adjoint() * lift;
}

Matrix to_original_frame(const CanonicalForm& cf, const Matrix& filtered_vectors) {
  return pivot_rotation(cf).adjoint() * charlie_lift(cf.charlie_filter()) * filtered_vectors;
}

}  // namespace trisep
