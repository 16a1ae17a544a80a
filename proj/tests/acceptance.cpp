// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Every state is seeded, so runs are reproducible.

#include "oracles.hpp"

#include "trisep/canonical.hpp"
#include "trisep/decompose.hpp"
#include "trisep/errors.hpp"
#include "trisep/kernel_search.hpp"
#include "trisep/ppt_support.hpp"
#include "trisep/rng.hpp"
#include "trisep/statezoo.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace trisep;

namespace {

constexpr std::uint64_t kBaseSeed = 20240601;
constexpr std::array<int, 6> kCanonicalSizes{1, 2, 3, 4, 6, 8};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void fail(const std::string& why) {
    pass = false;
    if (failures.size() < 5) failures.push_back(why);
  }
};

// Reconstructions of every certificate issued anywhere in this binary.
std::vector<DensityOperator> g_issued;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::uint64_t seed_for(int criterion, int i) { return mix_seed(kBaseSeed + criterion, static_cast<std::uint64_t>(i)); }

CanonicalSample canonical_case(int i) {
  const int n = kCanonicalSizes[static_cast<std::size_t>(i) % kCanonicalSizes.size()];
  return random_canonical_state(n, seed_for(1, i));
}

SeparabilityCertificate certify(const DensityOperator& rho, std::uint64_t seed) {
  CertifyOptions opts;
  opts.seed = seed;
  SeparabilityCertificate cert = certify_rank_n_separability(rho, opts);
  g_issued.emplace_back(rho.dims, cert.decomposition.reconstruct(), false);
  return cert;
}

Outcome canonical_round_trip() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  double worst_comm = 0.0, worst_rebuild = 0.0;
  for (int i = 0; i < 200; ++i) {
    const CanonicalSample s = canonical_case(i);
    try {
      const CanonicalExtraction ex = extract_canonical(s.rho);
      for (double c : scaled_commutator_norms(ex.form)) {
        worst_comm = std::max(worst_comm, c);
        if (c > 1e-9) out.fail("state " + std::to_string(i) + ": scaled commutator " + fmt(c));
      }
      const double r = (build_from_canonical(ex.form, false).matrix - s.rho.matrix).norm();
      worst_rebuild = std::max(worst_rebuild, r);
      if (r > 1e-8) out.fail("state " + std::to_string(i) + ": rebuild residual " + fmt(r));
    } catch (const Error& e) {
      out.fail("state " + std::to_string(i) + ": " + e.name() + ": " + e.what());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > 60.0) out.fail("runtime " + fmt(secs) + " s exceeds 60 s");
  out.detail = "200 states, max scaled commutator " + fmt(worst_comm) + ", max rebuild residual " +
               fmt(worst_rebuild) + ", " + fmt(secs) + " s";
  return out;
}

Outcome theorem_pipeline() {
  Outcome out;
  double worst = 0.0;
  int verified = 0;
  for (int i = 0; i < 200; ++i) {
    const CanonicalSample s = canonical_case(i);
    try {
      const auto cert = certify(s.rho, seed_for(2, i));
      const int n = s.rho.dims.c;
      worst = std::max(worst, cert.reconstruction_residual);
      bool ok = cert.verified() && cert.reconstruction_residual <= 1e-8;
      if (static_cast<int>(cert.decomposition.terms.size()) != n) {
        ok = false;
        out.fail("state " + std::to_string(i) + ": " + std::to_string(cert.decomposition.terms.size()) +
                 " terms for N = " + std::to_string(n));
      }
      for (const ProductTerm& t : cert.decomposition.terms) ok = ok && t.weight > 0.0;
      if (!ok) out.fail("state " + std::to_string(i) + ": certificate does not verify (residual " +
                        fmt(cert.reconstruction_residual) + ")");
      verified += ok ? 1 : 0;
    } catch (const Error& e) {
      out.fail("state " + std::to_string(i) + ": " + e.name() + ": " + e.what());
    }
  }
  out.detail = std::to_string(verified) + "/200 verified, max reconstruction residual " + fmt(worst);
  return out;
}

Outcome kernel_structure() {
  Outcome out;
  double worst = 0.0, worst_pt = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CanonicalSample s = canonical_case(1000 + i);
    const int n = s.rho.dims.c;
    try {
      const CanonicalForm cf = extract_canonical(s.rho).form;
      const Matrix filtered = filtered_pivot_frame(s.rho, cf);
      const double scale = filtered.norm();
      Matrix vecs = structural_kernel_vectors(cf);
      vecs.colwise().normalize();
      for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
        const double r = (filtered * vecs.col(k)).norm() / scale;
        worst = std::max(worst, r);
        if (r > 1e-8) out.fail("state " + std::to_string(i) + ": structural vector " + std::to_string(k) + " " + fmt(r));
      }
      Matrix orig = to_original_frame(cf, vecs);
      orig.colwise().normalize();
      for (Eigen::Index k = 0; k < orig.cols(); ++k) {
        const double r = (s.rho.matrix * orig.col(k)).norm();
        worst = std::max(worst, r);
        if (r > 1e-8) out.fail("state " + std::to_string(i) + ": original-frame vector " + std::to_string(k) + " " + fmt(r));
      }
      // |0_A 2_B>|h> - |1_A 2_B> D|h> in the kernel of the Bob partial transpose.
      const Matrix pt = partial_transpose(filtered, TriDims{2, 3, n}, PartySubset::of({Party::B}));
      for (int k = 0; k < n; ++k) {
        const Vector h = Vector::Unit(n, k);
        Vector v = Vector::Zero(6 * n);
        v.segment(2 * n, n) = h;
        v.segment(5 * n, n) = -cf.D * h;
        const double r = (pt * v).norm() / (scale * v.norm());
        worst_pt = std::max(worst_pt, r);
        if (r > 1e-8) out.fail("state " + std::to_string(i) + ": t_B family vector " + std::to_string(k) + " " + fmt(r));
      }
    } catch (const Error& e) {
      out.fail("state " + std::to_string(i) + ": " + e.name() + ": " + e.what());
    }
  }
  out.detail = "50 states, max structural residual " + fmt(worst) + ", max t_B residual " + fmt(worst_pt);
  return out;
}

Outcome product_kernel_vectors() {
  Outcome out;
  std::map<std::string, int> strategies;
  double worst = 0.0;
  auto run = [&](const char* label, const TriDims& dims, int rank, int count, int salt) {
    for (int i = 0; i < count; ++i) {
      const SeparableSample s = product_projector_sum(dims, rank, seed_for(salt, i));
      KernelSearchOptions opts;
      opts.seed = seed_for(salt + 100, i);
      try {
        const ProductKernelVector kv = find_product_kernel_vector(s.rho, opts);
        const double r = (s.rho.matrix * kron3(kv.e, kv.f, kv.g)).norm();
        worst = std::max(worst, r);
        ++strategies[strategy_name(kv.strategy)];
        if (r > 1e-8) out.fail(std::string(label) + " state " + std::to_string(i) + ": residual " + fmt(r));
      } catch (const Error& e) {
        out.fail(std::string(label) + " state " + std::to_string(i) + ": " + e.name() + ": " + e.what());
      }
    }
  };
  run("cubic", TriDims{2, 2, 3}, 4, 100, 50);
  run("quintic", TriDims{2, 3, 5}, 5, 100, 51);

  int fixed_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const SeparableSample s = random_separable_state(TriDims{2, 2, 3}, 2, seed_for(52, i));
    Rng rng(seed_for(53, i));
    for (int j = 0; j < 20; ++j) {
      KernelSearchOptions opts;
      opts.strategy = KernelStrategy::Underdetermined;
      opts.alice = rng.unit_vector(2);
      opts.seed = seed_for(54, i * 20 + j);
      try {
        const ProductKernelVector kv = find_product_kernel_vector(s.rho, opts);
        const double r = (s.rho.matrix * kron3(kv.e, kv.f, kv.g)).norm();
        const double overlap = std::abs(kv.e.dot(*opts.alice));
        worst = std::max(worst, r);
        if (r > 1e-8 || std::abs(overlap - 1.0) > 1e-12) {
          out.fail("rank-2 state " + std::to_string(i) + " Alice vector " + std::to_string(j) + ": residual " + fmt(r));
        } else {
          ++fixed_ok;
        }
      } catch (const Error& e) {
        out.fail("rank-2 state " + std::to_string(i) + " Alice vector " + std::to_string(j) + ": " + e.name());
      }
    }
  }
  std::ostringstream detail;
  detail << "100 cubic + 100 quintic states, " << fixed_ok << "/1000 fixed-Alice runs, max residual " << fmt(worst)
         << "; paths:";
  for (const auto& [name, count] : strategies) detail << " " << name << "=" << count;
  out.detail = detail.str();
  return out;
}

Outcome subtraction_contract() {
  Outcome out;
  constexpr std::array<TriDims, 4> kShapes{TriDims{2, 2, 3}, TriDims{2, 3, 3}, TriDims{2, 3, 4}, TriDims{2, 3, 5}};
  double worst_lambda = 0.0, worst_neg = 0.0, worst_final = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + i % 5;
    const TriDims dims = kShapes[static_cast<std::size_t>(i / 5) % kShapes.size()];
    const SeparableSample s = random_separable_state(dims, k, seed_for(6, i));
    const double floor = 1e-10 * s.rho.frobenius();
    DensityOperator current = s.rho;
    int rank = oracle::rank_abs(current.matrix, floor);
    if (rank != k) {
      out.fail("state " + std::to_string(i) + ": start rank " + std::to_string(rank) + " != " + std::to_string(k));
      continue;
    }
    try {
      for (int step = 0; step < k; ++step) {
        const ProductTerm& t = s.truth.terms[static_cast<std::size_t>(k - 1 - step)];
        const Vector v = kron3(t.a, t.b, t.c);
        const double expected = oracle::max_subtractable(current.matrix, v, floor);
        RangeOptions ro;
        ro.rank.abs_threshold = floor;
        const Subtraction sub = subtract_projector(current, v, ro);
        const double dl = std::abs(sub.lambda - expected);
        worst_lambda = std::max(worst_lambda, dl);
        if (dl > 1e-9) out.fail("state " + std::to_string(i) + " step " + std::to_string(step) + ": lambda off by " + fmt(dl));
        const double neg = oracle::min_eig(sub.rho.matrix);
        worst_neg = std::min(worst_neg, neg);
        if (neg < -1e-9) out.fail("state " + std::to_string(i) + " step " + std::to_string(step) + ": min eig " + fmt(neg));
        const int next = oracle::rank_abs(sub.rho.matrix, floor);
        if (next != rank - 1) {
          out.fail("state " + std::to_string(i) + " step " + std::to_string(step) + ": rank " + std::to_string(rank) +
                   " -> " + std::to_string(next));
        }
        rank = next;
        current = sub.rho;
      }
      const double left = current.matrix.norm();
      worst_final = std::max(worst_final, left);
      if (left > k * 1e-9) out.fail("state " + std::to_string(i) + ": remainder " + fmt(left));
    } catch (const Error& e) {
      out.fail("state " + std::to_string(i) + ": " + e.name() + ": " + e.what());
    }
  }
  out.detail = "100 states, max |lambda - bisection| " + fmt(worst_lambda) + ", min eigenvalue " + fmt(worst_neg) +
               ", max remainder " + fmt(worst_final);
  return out;
}

Outcome oracle_equivalence() {
  Outcome out;
  int pencils_ok = 0;
  for (int i = 0; i < 500; ++i) {
    Rng rng(seed_for(7, i));
    const int k = 1 + i % 3;
    const Matrix m0 = rng.gaussian_matrix(k, k);
    const Matrix m1 = rng.gaussian_matrix(k, k);
    const PencilRoots got = pencil_roots(m0, m1);
    const std::vector<Complex> want = oracle::poly_roots(oracle::det_poly(m0, m1));
    if (got.status != PencilStatus::Regular || !oracle::same_multiset(got.roots, want, 1e-8)) {
      out.fail("pencil " + std::to_string(i) + ": roots disagree with the determinant polynomial");
    } else {
      ++pencils_ok;
    }
  }

  int triples_ok = 0, degenerate = 0;
  for (int i = 0; i < 200; ++i) {
    Rng rng(seed_for(77, i));
    const int n = 1 + i % 6;
    const Matrix u = rng.haar_unitary(n);
    std::vector<std::vector<Complex>> truth(static_cast<std::size_t>(n), std::vector<Complex>(3));
    for (auto& t : truth)
      for (auto& x : t) x = rng.disk(1.0);
    const bool engineered = i % 2 == 0 && n > 1;
    if (engineered) {
      ++degenerate;
      // Full repeat of one triple, plus a shared B eigenvalue across a pair.
      truth[1] = truth[0];
      if (n > 3) truth[3][0] = truth[2][0];
    }
    std::array<Matrix, 3> ops;
    for (int op = 0; op < 3; ++op) {
      Vector diag(n);
      for (int j = 0; j < n; ++j) diag(j) = truth[static_cast<std::size_t>(j)][static_cast<std::size_t>(op)];
      ops[static_cast<std::size_t>(op)] = u * diag.asDiagonal() * u.adjoint();
    }
    try {
      const JointSpectrum js = joint_diagonalize(ops, JointDiagOptions{1e-9, 1e-7, seed_for(78, i)});
      std::vector<std::vector<Complex>> got(static_cast<std::size_t>(n), std::vector<Complex>(3));
      for (int j = 0; j < n; ++j)
        for (int op = 0; op < 3; ++op) got[static_cast<std::size_t>(j)][static_cast<std::size_t>(op)] = js.eigenvalues[static_cast<std::size_t>(op)](j);
      const double unitarity = (js.basis.adjoint() * js.basis - Matrix::Identity(n, n)).norm();
      if (!oracle::same_tuples(truth, got, 1e-9) || unitarity > 1e-10) {
        out.fail("triple " + std::to_string(i) + (engineered ? " (degenerate)" : "") + ": eigenvalues not recovered");
      } else {
        ++triples_ok;
      }
    } catch (const Error& e) {
      out.fail("triple " + std::to_string(i) + ": " + e.name() + ": " + e.what());
    }
  }
  if (degenerate < 50) out.fail("only " + std::to_string(degenerate) + " degenerate triples");
  out.detail = std::to_string(pencils_ok) + "/500 pencils, " + std::to_string(triples_ok) + "/200 triples (" +
               std::to_string(degenerate) + " degenerate)";
  return out;
}

Outcome negative_controls() {
  Outcome out;
  int npt_refused = 0, broken_refused = 0;
  for (int i = 0; i < 50; ++i) {
    const TriDims dims{2, 3, 2 + i % 5};
    const NptSample s = random_npt_state(dims, seed_for(8, i));
    try {
      certify(s.rho, seed_for(80, i));
      out.fail("NPT state " + std::to_string(i) + " received a certificate");
    } catch (const NotPptError&) {
      ++npt_refused;
    } catch (const Error& e) {
      out.fail("NPT state " + std::to_string(i) + ": refused with " + e.name() + " instead of NotPptError");
    }
  }
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + i % 5;
    // N product terms with Charlie confined to an (N-1)-dimensional subspace.
    Rng rng(seed_for(81, i));
    const Matrix iso = rng.haar_unitary(n).leftCols(n - 1);
    ProductDecomposition dec{TriDims{2, 3, n}, {}};
    for (int t = 0; t < n; ++t) {
      dec.terms.push_back(ProductTerm{1.0 / n, rng.unit_vector(2), rng.unit_vector(3),
                                      (iso * rng.unit_vector(n - 1)).normalized()});
    }
    const DensityOperator rho(dec.dims, dec.reconstruct(), true);
    const int rank = oracle::rank_abs(rho.matrix, 1e-10);
    if (rank != n) {
      out.fail("broken-pivot state " + std::to_string(i) + " has rank " + std::to_string(rank));
      continue;
    }
    if (!ppt_check(rho).ppt) {
      out.fail("broken-pivot state " + std::to_string(i) + " is not PPT");
      continue;
    }
    try {
      certify(rho, seed_for(82, i));
      out.fail("broken-pivot state " + std::to_string(i) + " received a certificate");
    } catch (const Error& e) {
      if (std::string(e.what()).empty()) {
        out.fail("broken-pivot state " + std::to_string(i) + ": refusal without a reason");
      } else {
        ++broken_refused;
      }
    }
  }
  out.detail = std::to_string(npt_refused) + "/50 NPT refused with NotPptError, " + std::to_string(broken_refused) +
               "/20 broken-pivot states refused with a reason";
  return out;
}

Outcome ppt_closure() {
  Outcome out;
  double worst = 0.0;
  for (std::size_t i = 0; i < g_issued.size(); ++i) {
    const PptReport report = ppt_check(g_issued[i]);
    const double w = std::min(report.worst(), report.plain_min_eig);
    worst = std::min(worst, w);
    if (!report.ppt || w < -1e-9) out.fail("certificate " + std::to_string(i) + ": min eigenvalue " + fmt(w));
  }
  if (g_issued.empty()) out.fail("no certificates were issued");
  out.detail = std::to_string(g_issued.size()) + " certificates, most negative partial-transpose eigenvalue " + fmt(worst);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Closure (3) runs last so it sees every certificate issued by the others.
  const std::vector<Criterion> order{
      {1, "canonical round trip", canonical_round_trip},
      {2, "rank-N pipeline certificates", theorem_pipeline},
      {4, "structural kernel vectors", kernel_structure},
      {5, "product kernel vectors", product_kernel_vectors},
      {6, "projector subtraction", subtraction_contract},
      {7, "pencil and joint-diagonalization oracles", oracle_equivalence},
      {8, "negative controls", negative_controls},
      {3, "separable implies PPT on certificates", ppt_closure},
  };
  std::map<int, std::pair<const char*, Outcome>> results;
  for (const Criterion& c : order) results.emplace(c.id, std::make_pair(c.name, c.run()));

  bool all = true;
  for (const auto& [id, entry] : results) {
    const auto& [name, outcome] = entry;
    all = all && outcome.pass;
    std::printf("%s criterion %d (%s): %s\n", outcome.pass ? "PASS" : "FAIL", id, name, outcome.detail.c_str());
    for (const std::string& f : outcome.failures) std::printf("    %s\n", f.c_str());
  }
  return all ? 0 : 1;
}
