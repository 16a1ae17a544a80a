#include "trisep/statezoo.hpp"

#include "trisep/errors.hpp"
#include "trisep/numlin.hpp"
#include "trisep/rng.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace trisep {

namespace {

std::vector<ProductTerm> random_product_terms(const TriDims& dims, int k, Rng& rng) {
  std::vector<ProductTerm> terms;
  terms.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    ProductTerm t;
    t.a = rng.unit_vector(dims.a);
    t.b = rng.unit_vector(dims.b);
    t.c = rng.unit_vector(dims.c);
    terms.push_back(std::move(t));
  }
  return terms;
}

SeparableSample assemble(const TriDims& dims, std::vector<ProductTerm> terms) {
  ProductDecomposition dec{dims, std::move(terms)};
  Matrix m = dec.reconstruct();
  return SeparableSample{DensityOperator(dims, std::move(m), true), std::move(dec)};
}

}  // namespace

CanonicalSample random_canonical_state(int n, std::uint64_t seed, const CanonicalParams& params) {
  if (n < 1) throw ArgumentError("canonical state needs N >= 1");
  Rng rng(seed);
  const Matrix u = rng.haar_unitary(n);
  Vector b(n), c(n), d(n);
  for (int i = 0; i < n; ++i) b(i) = rng.disk(params.eigen_radius);
  for (int i = 0; i < n; ++i) c(i) = rng.disk(params.eigen_radius);
  for (int i = 0; i < n; ++i) d(i) = rng.disk(params.eigen_radius);

  CanonicalForm cf;
  cf.B = u * b.asDiagonal() * u.adjoint();
  cf.C = u * c.asDiagonal() * u.adjoint();
  cf.D = u * d.asDiagonal() * u.adjoint();

  const Matrix v = rng.haar_unitary(n);
  Eigen::VectorXd spectrum(n);
  for (int i = 0; i < n; ++i) spectrum(i) = std::pow(params.f_condition_cap, rng.uniform());
  cf.F = v * spectrum.cast<Complex>().asDiagonal() * v.adjoint();
  cf.F = 0.5 * (cf.F + cf.F.adjoint()).eval();

  DensityOperator raw = build_from_canonical(cf, false);
  const double trace = raw.trace().real();
  cf.F /= trace;
  raw.matrix /= trace;
  raw.normalized = true;
  return CanonicalSample{std::move(raw), std::move(cf)};
}

SeparableSample random_separable_state(const TriDims& dims, int k, std::uint64_t seed) {
  if (k < 1) throw ArgumentError("separable state needs k >= 1 terms");
  Rng rng(seed);
  std::vector<ProductTerm> terms = random_product_terms(dims, k, rng);
  double total = 0.0;
  for (ProductTerm& t : terms) {
    t.weight = -std::log(1.0 - rng.uniform());
    total += t.weight;
  }
  for (ProductTerm& t : terms) t.weight /= total;
  return assemble(dims, std::move(terms));
}

SeparableSample product_projector_sum(const TriDims& dims, int k, std::uint64_t seed) {
  if (k < 1) throw ArgumentError("projector sum needs k >= 1 terms");
  Rng rng(seed);
  std::vector<ProductTerm> terms = random_product_terms(dims, k, rng);
  for (ProductTerm& t : terms) t.weight = 1.0 / k;
  return assemble(dims, std::move(terms));
}

Matrix npt_family(const TriDims& dims, const Matrix& alice_unitary, const Vector& phi0, const Vector& phi1,
                  double p) {
  const int dbc = dims.b * dims.c;
  if (dims.a != 2) throw DimsError("the NPT family needs a qubit Alice");
  if (phi0.size() != dbc || phi1.size() != dbc) throw DimsError("Bob-Charlie vectors have the wrong size");
  Vector phi(dims.total());
  phi << phi0, phi1;
  phi /= std::sqrt(2.0);
  const Matrix local = Eigen::kroneckerProduct(alice_unitary, Matrix::Identity(dbc, dbc)).eval();
  phi = local * phi;
  const int d = dims.total();
  return p * (phi * phi.adjoint()) + ((1.0 - p) / d) * Matrix::Identity(d, d);
}

double npt_threshold(const TriDims& dims, const Matrix& alice_unitary, const Vector& phi0, const Vector& phi1,
                     double tol) {
  const PartySubset alice = PartySubset::of({Party::A});
  auto min_eig = [&](double p) {
    const Matrix pt = partial_transpose(npt_family(dims, alice_unitary, phi0, phi1, p), dims, alice);
    return hermitian_eig(pt).values(0);
  };
  double lo = 0.0, hi = 1.0;
  if (min_eig(hi) >= 0.0) throw InternalConsistencyError("NPT family never turns negative");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (min_eig(mid) < 0.0 ? hi : lo) = mid;
  }
  return hi;
}

NptSample random_npt_state(const TriDims& dims, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix ua = rng.haar_unitary(dims.a);
  const Matrix ubc = rng.haar_unitary(dims.b * dims.c);
  const Vector phi0 = ubc.col(0), phi1 = ubc.col(1);
  NptSample out{DensityOperator(dims, Matrix::Identity(dims.total(), dims.total()), false), 0.0, 0.0};
  out.threshold = npt_threshold(dims, ua, phi0, phi1);
  out.p = out.threshold + (1.0 - out.threshold) * (0.1 + 0.9 * rng.uniform());
  out.rho = DensityOperator(dims, npt_family(dims, ua, phi0, phi1, out.p), true);
  return out;
}

const char* gen_kind_name(GenKind k) {
  switch (k) {
    case GenKind::Canonical: return "canonical";
    case GenKind::Separable: return "separable";
    case GenKind::NptMixture: return "npt_mixture";
    case GenKind::ProductProjectorSum: return "product_projector_sum";
  }
  return "unknown";
}

GenKind parse_gen_kind(const std::string& name) {
  if (name == "canonical") return GenKind::Canonical;
  if (name == "separable") return GenKind::Separable;
  if (name == "npt" || name == "npt_mixture") return GenKind::NptMixture;
  if (name == "product_projector_sum") return GenKind::ProductProjectorSum;
  throw ArgumentError("unknown state kind '" + name + "'");
}

DensityOperator generate(const GenSpec& spec) {
  switch (spec.kind) {
    case GenKind::Canonical: {
      if (spec.dims.a != 2 || spec.dims.b != 3) {
        throw DimsError("canonical states live on 2x3xN, got " + to_string(spec.dims));
      }
      if (spec.rank != 0 && spec.rank != spec.dims.c) {
        throw ArgumentError("canonical states have rank N = " + std::to_string(spec.dims.c));
      }
      return random_canonical_state(spec.dims.c, spec.seed, spec.params).rho;
    }
    case GenKind::Separable:
      return random_separable_state(spec.dims, spec.rank > 0 ? spec.rank : spec.dims.c, spec.seed).rho;
    case GenKind::ProductProjectorSum:
      return product_projector_sum(spec.dims, spec.rank > 0 ? spec.rank : spec.dims.c, spec.seed).rho;
    case GenKind::NptMixture:
      return random_npt_state(spec.dims, spec.seed).rho;
  }
  throw ArgumentError("unknown state kind");
}

}  // namespace trisep
