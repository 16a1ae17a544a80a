#include "trisep/decompose.hpp"

#include "trisep/errors.hpp"

#include <cmath>
#include <sstream>

namespace trisep {

namespace {

// Unit vector with its largest-magnitude entry real and positive.
Vector fix_phase(const Vector& v) {
  Eigen::Index pivot = 0;
  v.cwiseAbs().maxCoeff(&pivot);
  const Complex phase = std::abs(v(pivot)) > 0.0 ? std::conj(v(pivot)) / std::abs(v(pivot)) : Complex(1.0);
  return (phase * v) / v.norm();
}

ProductTerm make_term(const Vector& a, const Vector& b, const Vector& c) {
  const double na = a.norm(), nb = b.norm(), nc = c.norm();
  return ProductTerm{na * na * nb * nb * nc * nc, fix_phase(a), fix_phase(b), fix_phase(c)};
}

}  // namespace

Matrix ProductDecomposition::reconstruct() const {
  const int d = dims.total();
  Matrix out = Matrix::Zero(d, d);
  for (const ProductTerm& t : terms) {
    const Vector v = kron3(t.a, t.b, t.c);
    out.noalias() += t.weight * (v * v.adjoint());
  }
  return out;
}

double ProductDecomposition::total_weight() const {
  double total = 0.0;
  for (const ProductTerm& t : terms) total += t.weight;
  return total;
}

VerificationReport verify_decomposition(const DensityOperator& rho, const ProductDecomposition& dec, double tol) {
  if (!(rho.dims == dec.dims)) {
    throw DimsError("decomposition dims " + to_string(dec.dims) + " do not match state dims " + to_string(rho.dims));
  }
  for (std::size_t i = 0; i < dec.terms.size(); ++i) {
    const ProductTerm& t = dec.terms[i];
    if (!std::isfinite(t.weight) || t.weight < 0.0) {
      throw InvalidDecompositionError("term " + std::to_string(i) + " has invalid weight " + std::to_string(t.weight));
    }
    if (t.a.size() != dec.dims.a || t.b.size() != dec.dims.b || t.c.size() != dec.dims.c) {
      throw DimsError("term " + std::to_string(i) + " has factors of the wrong size");
    }
  }
  VerificationReport report;
  report.tol = tol;
  const DensityOperator sum(dec.dims, dec.reconstruct(), false);
  report.residual = (rho.matrix - sum.matrix).norm();
  const double norm = rho.frobenius();
  report.relative = norm > 0.0 ? report.residual / norm : report.residual;
  for (Party p : kParties) {
    report.marginal_residuals[static_cast<int>(p)] = (reduced_operator(rho, p) - reduced_operator(sum, p)).norm();
  }
  report.passed = report.residual <= tol * norm;
  return report;
}

ProductDecomposition decompose_canonical(const CanonicalForm& cf, const JointDiagOptions& opts) {
  const int n = cf.n();
  const std::array<Matrix, 3> ops{cf.B, cf.C, cf.D};
  const JointSpectrum spectrum = joint_diagonalize(ops, opts);
  const Matrix sqrt_f = psd_sqrt(cf.F);
  const Matrix undo_a = cf.rot_a.adjoint();
  const Matrix undo_b = cf.rot_b.adjoint();

  ProductDecomposition dec{TriDims{2, 3, n}, {}};
  dec.terms.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Complex b = spectrum.eigenvalues[0](k);
    const Complex c = spectrum.eigenvalues[1](k);
    const Complex d = spectrum.eigenvalues[2](k);
    // <f_n|rho'|f_n> = |u><u| with u = conj(dc, db, d, c, b, 1) = conj(d, 1) (x) conj(c, b, 1).
    Vector alice(2);
    alice << std::conj(d), 1.0;
    Vector bob(3);
    bob << std::conj(c), std::conj(b), 1.0;
    const Vector charlie = sqrt_f * spectrum.basis.col(k);
    dec.terms.push_back(make_term(undo_a * alice, undo_b * bob, charlie));
  }
  return dec;
}

bool SeparabilityCertificate::verified() const {
  if (decomposition.terms.empty()) return false;
  for (const ProductTerm& t : decomposition.terms) {
    if (!(t.weight > 0.0)) return false;
  }
  return reconstruction_residual <= options.reconstruction_tol * state_norm;
}

SeparabilityCertificate decompose_rank_n(const DensityOperator& rho, const CertifyOptions& opts) {
  if (rho.dims.a != 2 || rho.dims.b != 3) {
    throw DimsError("rank-N decomposition needs dims 2x3xN, got " + to_string(rho.dims));
  }
  PivotSearchOptions pivot_opts = opts.pivot;
  pivot_opts.seed = opts.seed;
  const auto hit = find_full_rank_pivot(rho, pivot_opts);
  if (!hit) {
    throw PivotNotFoundError("no product pivot <e_A, f_B| with a rank-" + std::to_string(rho.dims.c) +
                             " conditional block after " + std::to_string(6 + pivot_opts.max_trials) + " trials");
  }

  CanonicalOptions canon_opts = opts.canonical;
  canon_opts.ppt_tol = opts.ppt_tol;
  CanonicalExtraction extraction = extract_canonical(rho, hit->pivot, canon_opts);

  SeparabilityCertificate cert;
  cert.options = opts;
  cert.computational_pivot = hit->computational;
  cert.support_dims = {rho.dims.a, rho.dims.b, rho.dims.c};
  cert.ppt = ppt_check(rho, opts.ppt_tol);

  ProductDecomposition dec = decompose_canonical(extraction.form, JointDiagOptions{opts.joint_tol, 1e-7, opts.seed});
  std::vector<ProductTerm> kept;
  for (std::size_t i = 0; i < dec.terms.size(); ++i) {
    if (dec.terms[i].weight > 0.0) {
      kept.push_back(std::move(dec.terms[i]));
    } else {
      cert.pruned.push_back("term " + std::to_string(i) + ": weight " + std::to_string(dec.terms[i].weight) +
                            " is not positive");
    }
  }
  dec.terms = std::move(kept);

  cert.canonical = std::move(extraction.form);
  cert.canonical_residuals = extraction.residuals;
  cert.decomposition = std::move(dec);
  cert.state_norm = rho.frobenius();
  cert.reconstruction_residual = (rho.matrix - cert.decomposition.reconstruct()).norm();
  if (cert.reconstruction_residual > opts.reconstruction_tol * cert.state_norm) {
    throw DecompositionFailedError("reconstruction residual " + std::to_string(cert.reconstruction_residual) +
                                       " exceeds tolerance",
                                   cert.reconstruction_residual);
  }
  return cert;
}

SeparabilityCertificate certify_rank_n_separability(const DensityOperator& rho, const CertifyOptions& opts) {
  if (rho.dims.a != 2 || rho.dims.b != 3) {
    throw DimsError("certification needs dims 2x3xN, got " + to_string(rho.dims));
  }
  const PptReport ppt = ppt_check(rho, opts.ppt_tol);
  if (!ppt.ppt) {
    throw NotPptError("state is not PPT (most negative eigenvalue over all partial transposes " +
                      std::to_string(ppt.worst()) + ")");
  }

  const SupportProfile support = local_support(rho, opts.canonical.rank);
  const int n = rho.dims.c;
  const int charlie_support = support.dims[2];
  if (charlie_support == 0) throw RankMismatchError("state is the zero operator");

  // Only Charlie is compressed: the canonical form needs the 2x3 Alice-Bob grid,
  // and the pivot search copes with smaller Alice/Bob supports on its own.
  SupportProfile charlie_only;
  charlie_only.dims = {2, 3, charlie_support};
  charlie_only.isometries = {Matrix::Identity(2, 2), Matrix::Identity(3, 3), support.isometries[2]};
  const bool compress = charlie_support < n;
  const DensityOperator working = compress ? compress_to_support(rho, charlie_only) : rho;

  const int rank = rank_kernel(working.matrix, opts.canonical.rank).rank;
  if (rank != charlie_support) {
    std::ostringstream msg;
    msg << "rank " << rank << " differs from the Charlie support dimension " << charlie_support;
    if (compress) msg << " (ambient N = " << n << ")";
    throw RankMismatchError(msg.str());
  }

  SeparabilityCertificate cert = decompose_rank_n(working, opts);
  cert.ppt = ppt;
  cert.support_dims = support.dims;
  cert.charlie_compressed = compress;
  if (compress) {
    for (ProductTerm& t : cert.decomposition.terms) t.c = support.isometries[2] * t.c;
    cert.decomposition.dims = rho.dims;
    cert.state_norm = rho.frobenius();
    cert.reconstruction_residual = (rho.matrix - cert.decomposition.reconstruct()).norm();
    if (cert.reconstruction_residual > opts.reconstruction_tol * cert.state_norm) {
      throw DecompositionFailedError("reconstruction residual after re-embedding exceeds tolerance",
                                     cert.reconstruction_residual);
    }
  }
  return cert;
}

}  // namespace trisep
