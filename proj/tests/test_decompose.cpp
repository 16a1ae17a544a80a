#include "helpers.hpp"
#include "oracles.hpp"

#include "trisep/decompose.hpp"
#include "trisep/errors.hpp"
#include "trisep/statezoo.hpp"

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

using namespace trisep;
using testing_support::basis;

namespace {

Matrix corner_projector() {
  const Vector pivot = kron3(basis(2, 1), basis(3, 2), Vector::Ones(1));
  return pivot * pivot.adjoint();
}

// Independent rebuild from the stored terms.
Matrix sum_of_projectors(const ProductDecomposition& dec) {
  const int d = dec.dims.total();
  Matrix m = Matrix::Zero(d, d);
  for (const ProductTerm& t : dec.terms) {
    const Vector v = kron3(t.a, t.b, t.c);
    m += t.weight * v * v.adjoint();
  }
  return m;
}

void check_certificate(const DensityOperator& rho, const SeparabilityCertificate& cert) {
  CHECK(cert.verified());
  const double norm = rho.frobenius();
  CHECK((sum_of_projectors(cert.decomposition) - rho.matrix).norm() <= 1e-8 * norm);
  CHECK(cert.reconstruction_residual <= 1e-8 * norm);
  const DensityOperator rebuilt(rho.dims, cert.decomposition.reconstruct());
  for (PartySubset s : nontrivial_subsets())
    CHECK(oracle::min_eig(partial_transpose(rebuilt.matrix, rho.dims, s)) >= -1e-9);
  for (const ProductTerm& t : cert.decomposition.terms) {
    CHECK(t.weight > 0.0);
    CHECK(t.a.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.b.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.c.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("corner state decomposes into N equal terms") {
  for (int n = 1; n <= 5; ++n) {
    const DensityOperator rho(TriDims{2, 3, n},
                              Eigen::kroneckerProduct(corner_projector(), Matrix(Matrix::Identity(n, n) / n)).eval(), true);
    const SeparabilityCertificate cert = certify_rank_n_separability(rho);
    check_certificate(rho, cert);
    REQUIRE(cert.decomposition.terms.size() == static_cast<std::size_t>(n));
    Matrix cs(n, n);
    for (int k = 0; k < n; ++k) {
      const ProductTerm& t = cert.decomposition.terms[static_cast<std::size_t>(k)];
      CHECK(t.weight == doctest::Approx(1.0 / n).epsilon(1e-12));
      CHECK(std::abs(t.a(1)) == doctest::Approx(1.0));
      CHECK(std::abs(t.b(2)) == doctest::Approx(1.0));
      cs.col(k) = t.c;
    }
    CHECK((cs.adjoint() * cs - Matrix::Identity(n, n)).norm() < 1e-12);
  }
}

TEST_CASE("N = 1 with b = c = d = 1") {
  CanonicalForm cf;
  cf.B = cf.C = cf.D = cf.F = Matrix::Ones(1, 1);
  const ProductDecomposition dec = decompose_canonical(cf);
  REQUIRE(dec.terms.size() == 1);
  const ProductTerm& t = dec.terms[0];
  CHECK((t.a - Vector::Ones(2) / std::sqrt(2.0)).norm() < 1e-14);
  CHECK((t.b - Vector::Ones(3) / std::sqrt(3.0)).norm() < 1e-14);
  CHECK(t.weight == doctest::Approx(6.0));
  const DensityOperator rho = build_from_canonical(cf, false);
  CHECK((dec.reconstruct() - rho.matrix).norm() < 1e-13);
}

TEST_CASE("random canonical states are certified with N terms") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    const CanonicalSample s = random_canonical_state(n, seed);
    const SeparabilityCertificate cert = certify_rank_n_separability(s.rho);
    check_certificate(s.rho, cert);
    CHECK(cert.decomposition.terms.size() == static_cast<std::size_t>(n));
    CHECK(cert.decomposition.total_weight() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cert.computational_pivot);
    CHECK_FALSE(cert.charlie_compressed);
    CHECK(cert.pruned.empty());

    // the filtered Charlie vectors F^{-1/2} c_n are orthonormal
    const Matrix filter = cert.canonical.charlie_filter();
    Matrix fs(n, n);
    for (int k = 0; k < n; ++k) fs.col(k) = (filter * cert.decomposition.terms[static_cast<std::size_t>(k)].c).normalized();
    CHECK((fs.adjoint() * fs - Matrix::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("verify_decomposition") {
  const SeparableSample s = random_separable_state(TriDims{2, 3, 3}, 4, 8);
  SUBCASE("exact decomposition") {
    const VerificationReport r = verify_decomposition(s.rho, s.truth);
    CHECK(r.passed);
    CHECK(r.residual < 1e-15);
    for (double m : r.marginal_residuals) CHECK(m < 1e-15);
  }
  SUBCASE("weight perturbation shows up one for one") {
    for (double eps : {1e-3, 1e-5, 0.25}) {
      ProductDecomposition dec = s.truth;
      dec.terms[1].weight += eps;
      const VerificationReport r = verify_decomposition(s.rho, dec);
      CHECK(r.residual == doctest::Approx(eps).epsilon(1e-9));
      CHECK_FALSE(r.passed);
    }
  }
  SUBCASE("cross-check against a different state") {
    const SeparableSample other = random_separable_state(TriDims{2, 3, 3}, 4, 9);
    const VerificationReport r = verify_decomposition(other.rho, s.truth);
    CHECK(r.residual == doctest::Approx((other.rho.matrix - s.rho.matrix).norm()).epsilon(1e-12));
  }
  SUBCASE("invalid weights and dims") {
    ProductDecomposition neg = s.truth;
    neg.terms[0].weight = -0.1;
    CHECK_THROWS_AS(verify_decomposition(s.rho, neg), InvalidDecompositionError);
    ProductDecomposition nan = s.truth;
    nan.terms[0].weight = std::nan("");
    CHECK_THROWS_AS(verify_decomposition(s.rho, nan), InvalidDecompositionError);
    const SeparableSample wrong = random_separable_state(TriDims{2, 3, 2}, 2, 1);
    CHECK_THROWS_AS(verify_decomposition(s.rho, wrong.truth), DimsError);
  }
  CHECK(sum_of_projectors(s.truth).isApprox(s.truth.reconstruct(), 1e-14));
}

TEST_CASE("separable states in generic position are certified") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 5);
    const SeparableSample s = product_projector_sum(TriDims{2, 3, n}, n, seed);
    Pins corner;
    corner.a = basis(2, 1);
    corner.b = basis(3, 2);
    REQUIRE(rank_kernel(conditional_operator(s.rho, corner)).rank == n);
    const SeparabilityCertificate cert = certify_rank_n_separability(s.rho);
    check_certificate(s.rho, cert);
    CHECK(cert.decomposition.terms.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("Charlie support below dC is compressed and re-embedded") {
  const int dc = 5, n = 3;
  Rng rng(31);
  const Matrix vc = rng.haar_unitary(dc).leftCols(n);
  Matrix m = Matrix::Zero(6 * dc, 6 * dc);
  for (int k = 0; k < n; ++k) {
    const Vector v = kron3(rng.unit_vector(2), rng.unit_vector(3), Vector(vc * rng.unit_vector(n)));
    m += v * v.adjoint();
  }
  const DensityOperator rho(TriDims{2, 3, dc}, m / m.trace().real(), true);
  const SeparabilityCertificate cert = certify_rank_n_separability(rho);
  check_certificate(rho, cert);
  CHECK(cert.charlie_compressed);
  CHECK(cert.support_dims == std::array<int, 3>{2, 3, n});
  CHECK(cert.decomposition.terms.size() == static_cast<std::size_t>(n));
  for (const ProductTerm& t : cert.decomposition.terms) CHECK(t.c.size() == dc);
}

TEST_CASE("certification refusals") {
  CHECK_THROWS_AS(certify_rank_n_separability(random_npt_state(TriDims{2, 3, 3}, 4).rho), NotPptError);
  CHECK_THROWS_AS(certify_rank_n_separability(random_separable_state(TriDims{2, 3, 3}, 5, 2).rho), RankMismatchError);
  CHECK_THROWS_AS(certify_rank_n_separability(random_separable_state(TriDims{2, 2, 3}, 3, 2).rho), DimsError);

  // every term has Alice |0>: the default corner fails, the sweep moves on
  const int n = 3;
  Rng rng(5);
  Matrix m = Matrix::Zero(6 * n, 6 * n);
  for (int k = 0; k < n; ++k) {
    const Vector v = kron3(basis(2, 0), rng.unit_vector(3), rng.unit_vector(n));
    m += v * v.adjoint();
  }
  const DensityOperator flat(TriDims{2, 3, n}, m / m.trace().real(), true);
  const SeparabilityCertificate cert = certify_rank_n_separability(flat);
  check_certificate(flat, cert);
  CHECK(std::abs(cert.canonical.pivot.a(0)) == doctest::Approx(1.0));
}
