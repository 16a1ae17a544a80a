#include "trisep/numlin.hpp"

#include "trisep/errors.hpp"
#include "trisep/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace trisep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double RankKernel::kept_margin() const {
  if (rank == 0 || threshold <= 0.0) return kInf;
  return singular_values(rank - 1) / threshold;
}

double RankKernel::dropped_margin() const {
  if (rank >= singular_values.size()) return kInf;
  const double s = singular_values(rank);
  return s > 0.0 ? threshold / s : kInf;
}

RankKernel rank_kernel(const Matrix& m, const RankTolerance& tol) {
  RankKernel out;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (rows == 0 || cols == 0) {
    out.kernel_basis = Matrix::Identity(cols, cols);
    out.singular_values.resize(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values(0);
  out.threshold = tol.abs_threshold ? *tol.abs_threshold
                                    : tol.rel_tol * smax * static_cast<double>(std::max(rows, cols));
  int rank = 0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values(i) > out.threshold) ++rank;
  }
  out.rank = rank;
  out.kernel_basis = svd.matrixV().rightCols(cols - rank);
  return out;
}

HermitianEig hermitian_eig(const Matrix& h, double hermiticity_tol) {
  if (h.rows() != h.cols()) throw DimsError("hermitian_eig: matrix is not square");
  const double asym = (h - h.adjoint()).norm();
  if (asym > hermiticity_tol * std::max(1.0, h.norm())) {
    throw HermiticityError("matrix is not Hermitian: ||H - H^dagger||_F = " + std::to_string(asym));
  }
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix psd_sqrt(const Matrix& h) {
  const HermitianEig eig = hermitian_eig(h);
  const Eigen::VectorXd roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

double commutator_scale(const Matrix& x, const Matrix& y) {
  return std::max(1.0, x.norm() * y.norm());
}

namespace {

struct JointDiagContext {
  std::span<const Matrix> ops;
  const JointDiagOptions& opts;
  Rng rng;
  double gap_threshold;
  int max_depth;
  Matrix basis;
  Eigen::Index filled = 0;
};

bool restricted_scalar(const JointDiagContext& ctx, const Matrix& q) {
  const Eigen::Index m = q.cols();
  for (const Matrix& op : ctx.ops) {
    const Matrix r = q.adjoint() * op * q;
    const Complex mean = r.trace() / static_cast<double>(m);
    const Matrix off = r - mean * Matrix::Identity(m, m);
    if (off.norm() > ctx.opts.tol * std::max(1.0, op.norm())) return false;
  }
  return true;
}

Matrix generic_combination(JointDiagContext& ctx, const Matrix& q) {
  const Eigen::Index m = q.cols();
  Matrix h = Matrix::Zero(m, m);
  for (const Matrix& op : ctx.ops) {
    const Complex w = ctx.rng.complex_normal();
    const Matrix r = q.adjoint() * op * q;
    h += w * r + std::conj(w) * r.adjoint();
  }
  return h;
}

void refine(JointDiagContext& ctx, const Matrix& q, int depth) {
  const Eigen::Index m = q.cols();
  if (m == 1 || depth >= ctx.max_depth || restricted_scalar(ctx, q)) {
    ctx.basis.middleCols(ctx.filled, m) = q;
    ctx.filled += m;
    return;
  }
  const HermitianEig eig = hermitian_eig(generic_combination(ctx, q), 1e-8);
  const Matrix rotated = q * eig.vectors;
  if (depth == 0) {
    const double spread = eig.values(m - 1) - eig.values(0);
    ctx.gap_threshold = ctx.opts.cluster_rel * spread;
  }
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= m; ++i) {
    const bool boundary = i == m || (eig.values(i) - eig.values(i - 1)) >= ctx.gap_threshold;
    if (!boundary) continue;
    const Eigen::Index size = i - start;
    const Matrix cluster = rotated.middleCols(start, size);
    if (size == 1) {
      ctx.basis.col(ctx.filled++) = cluster.col(0);
    } else {
      refine(ctx, cluster, depth + 1);
    }
    start = i;
  }
}

}  // namespace

JointSpectrum joint_diagonalize(std::span<const Matrix> ops, const JointDiagOptions& opts) {
  if (ops.empty()) throw ArgumentError("joint_diagonalize: no operators given");
  const Eigen::Index n = ops.front().rows();
  for (const Matrix& op : ops) {
    if (op.rows() != n || op.cols() != n) throw DimsError("joint_diagonalize: operators must share a square size");
  }

  int worst_i = -1, worst_j = -1;
  double worst_ratio = 0.0, worst_norm = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i; j < ops.size(); ++j) {
      const Matrix& y = (i == j) ? Matrix(ops[i].adjoint()) : ops[j];
      const double norm = (ops[i] * y - y * ops[i]).norm();
      const double ratio = norm / commutator_scale(ops[i], ops[j]);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst_norm = norm;
        worst_i = static_cast<int>(i);
        worst_j = static_cast<int>(j);
      }
    }
  }
  if (worst_ratio > opts.tol) {
    const std::string what = worst_i == worst_j
                                 ? "operator " + std::to_string(worst_i) + " is not normal"
                                 : "operators " + std::to_string(worst_i) + " and " +
                                       std::to_string(worst_j) + " do not commute";
    throw NotCommutingError(what + " (commutator norm " + std::to_string(worst_norm) + ")", worst_i,
                            worst_j, worst_norm);
  }

  JointDiagContext ctx{ops, opts, Rng(opts.seed), 0.0, std::max<int>(1, static_cast<int>(ops.size())),
                       Matrix(n, n), 0};
  refine(ctx, Matrix::Identity(n, n), 0);

  JointSpectrum out;
  out.basis = std::move(ctx.basis);
  for (const Matrix& op : ops) {
    Vector lambda(n);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Vector mf = op * out.basis.col(k);
      lambda(k) = out.basis.col(k).dot(mf);
      worst = std::max(worst, (mf - lambda(k) * out.basis.col(k)).norm());
    }
    out.eigenvalues.push_back(std::move(lambda));
    out.residuals.push_back(worst);
  }
  return out;
}

SmallestSingular smallest_singular(const Matrix& m) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) throw DimsError("smallest_singular: empty matrix");
  if (m.rows() < cols) {
    // Wide matrices always have a kernel; pad to square so the SVD exposes it.
    Matrix padded = Matrix::Zero(cols, cols);
    padded.topRows(m.rows()) = m;
    return smallest_singular(padded);
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  return SmallestSingular{svd.singularValues()(cols - 1), svd.matrixV().col(cols - 1)};
}

PencilRoots pencil_roots(const Matrix& m0, const Matrix& m1) {
  const Eigen::Index k = m0.rows();
  if (m0.cols() != k || m1.rows() != k || m1.cols() != k) {
    throw DimsError("pencil_roots: M0 and M1 must be square and of equal size");
  }
  PencilRoots out;
  if (k == 0) return out;

  const double n0 = m0.norm();
  const double n1 = m1.norm();
  const double scale = std::max(n0, n1);
  if (scale == 0.0) {
    out.status = PencilStatus::IdenticallySingular;
    return out;
  }

  // det(M0 + a M1) vanishes identically iff it vanishes at generic a.
  const double ratio = n1 > 0.0 ? std::max(n0, 1e-300) / n1 : 1.0;
  const std::array<Complex, 3> probes{Complex(0.6180339887, 0.3090169944),
                                      Complex(-1.2247448714, 0.7071067812),
                                      Complex(0.3333333333, -1.4142135624)};
  bool singular_everywhere = true;
  for (const Complex& probe : probes) {
    const Complex a = probe * ratio;
    const double probe_scale = n0 + std::abs(a) * n1;
    if (smallest_singular(m0 + a * m1).value > 1e-11 * static_cast<double>(k) * probe_scale) {
      singular_everywhere = false;
      break;
    }
  }
  if (singular_everywhere) {
    out.status = PencilStatus::IdenticallySingular;
    return out;
  }

  Matrix a = -m0;
  Matrix b = m1;
  std::vector<Complex> alpha(static_cast<std::size_t>(k));
  std::vector<Complex> beta(static_cast<std::size_t>(k));
  const lapack_int n = static_cast<lapack_int>(k);
  const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, b.data(), n,
                                        alpha.data(), beta.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw InternalConsistencyError("zggev failed with info " + std::to_string(info));

  const double beta_floor = 10.0 * static_cast<double>(k) * std::numeric_limits<double>::epsilon() * n1;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (std::abs(beta[i]) <= beta_floor || std::abs(beta[i]) == 0.0) continue;
    out.roots.push_back(alpha[i] / beta[i]);
  }
  return out;
}

RangeQuadratic range_inverse_quadratic(const Matrix& rho, const Vector& v, const RangeOptions& opts) {
  if (rho.rows() != rho.cols() || rho.rows() != v.size()) {
    throw DimsError("range_inverse_quadratic: vector size does not match operator");
  }
  const double vnorm = v.norm();
  if (!(vnorm > opts.zero_tol)) throw DegenerateVectorError("range_inverse_quadratic: vector is (numerically) zero");

  const HermitianEig eig = hermitian_eig(rho, 1e-8);
  const Eigen::Index n = rho.rows();
  const double lmax = std::max(0.0, eig.values(n - 1));
  const double threshold = opts.rank.abs_threshold ? *opts.rank.abs_threshold
                                                   : opts.rank.rel_tol * lmax * static_cast<double>(n);
  double quad = 0.0;
  Vector projected = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(eig.values(i) > threshold) || eig.values(i) <= 0.0) continue;
    const Complex coeff = eig.vectors.col(i).dot(v);
    projected += coeff * eig.vectors.col(i);
    quad += std::norm(coeff) / eig.values(i);
  }
  const double residual = (v - projected).norm() / vnorm;
  if (residual > opts.range_tol || !(quad > 0.0)) {
    throw NotInRangeError("vector is not in the range of the operator (relative residual " +
                          std::to_string(residual) + ")");
  }
  return RangeQuadratic{1.0 / quad, residual};
}

}  // namespace trisep
