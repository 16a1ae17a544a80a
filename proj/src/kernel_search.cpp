#include "trisep/kernel_search.hpp"

#include "trisep/canonical.hpp"
#include "trisep/errors.hpp"
#include "trisep/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace trisep {

namespace {

constexpr std::array<std::pair<KernelStrategy, const char*>, 7> kStrategyNames{{
    {KernelStrategy::Auto, "auto"},
    {KernelStrategy::LocalSupport, "local-support"},
    {KernelStrategy::Underdetermined, "underdetermined"},
    {KernelStrategy::AliceSweep, "alice-sweep"},
    {KernelStrategy::CharlieSweep, "charlie-sweep"},
    {KernelStrategy::RandomBob, "random-bob"},
    {KernelStrategy::Generic, "generic"},
}};

// vary: parametrized as u0 + alpha u1; solve: read off a pencil nullspace;
// fixed: contracted with a chosen vector first.
struct Arrangement {
  Party vary;
  Party solve;
  Party fixed;
};

struct Candidate {
  std::array<Vector, 3> factors;  // indexed by Party
  std::optional<Complex> alpha;
  double residual = std::numeric_limits<double>::infinity();
};

int idx(Party p) { return static_cast<int>(p); }

class Search {
 public:
  Search(const DensityOperator& rho, const KernelSearchOptions& opts)
      : rho_(rho), opts_(opts), dims_(rho.dims), rng_(opts.seed), norm_(rho.frobenius()) {
    const HermitianEig eig = hermitian_eig(rho.matrix, 1e-8);
    rank_ = rank_kernel(rho.matrix, opts.rank).rank;
    // Rows are the functionals <psi_i|, one per range direction.
    functionals_ = eig.vectors.rightCols(rank_).adjoint();
  }

  int rank() const { return rank_; }
  double target() const { return opts_.tol * norm_; }
  Rng& rng() { return rng_; }

  double residual(const std::array<Vector, 3>& f) const {
    return (rho_.matrix * kron3(f[0], f[1], f[2])).norm();
  }

  // Constraint matrix after contracting `fixed` with q: rows are range
  // functionals, columns run over (vary, solve) with solve fastest.
  Matrix contract(const Arrangement& arr, const Vector& q) const {
    const int dv = dims_[arr.vary];
    const int ds = dims_[arr.solve];
    Matrix k = Matrix::Zero(rank_, dv * ds);
    for (int flat = 0; flat < dims_.total(); ++flat) {
      const std::array<int, 3> x = split_index(flat, dims_);
      const int col = x[idx(arr.vary)] * ds + x[idx(arr.solve)];
      k.col(col) += functionals_.col(flat) * q(x[idx(arr.fixed)]);
    }
    return k;
  }

  // Candidates with `fixed` contracted to q. `forced_rank` overrides the
  // numerical rank of the contracted constraints (used after a sweep root).
  void solve_fixed(const Arrangement& arr, const Vector& q, std::optional<int> forced_rank) {
    const int dv = dims_[arr.vary];
    const int ds = dims_[arr.solve];
    const Matrix k = contract(arr, q);

    Matrix rows;  // independent constraints, compressed
    if (k.rows() == 0) {
      rows = Matrix(0, k.cols());
    } else {
      Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeThinU);
      int rq = forced_rank ? *forced_rank : rank_kernel(k, opts_.rank).rank;
      rq = std::min<int>(rq, static_cast<int>(svd.matrixU().cols()));
      rows = svd.matrixU().leftCols(rq).adjoint() * k;
    }
    const int rq = static_cast<int>(rows.rows());
    if (rq > ds) return;

    Vector u0 = Vector::Zero(dv), u1 = Vector::Zero(dv);
    if (dv == 2) {
      u0(0) = 1.0;
      u1(1) = 1.0;
    } else {
      u0 = rng_.unit_vector(dv);
      u1 = rng_.unit_vector(dv);
    }
    Matrix m0 = Matrix::Zero(rq, ds), m1 = Matrix::Zero(rq, ds);
    for (int p = 0; p < dv; ++p) {
      m0 += u0(p) * rows.middleCols(p * ds, ds);
      m1 += u1(p) * rows.middleCols(p * ds, ds);
    }

    auto emit = [&](const Vector& pv, const Vector& sv, std::optional<Complex> alpha) {
      Candidate c;
      c.factors[idx(arr.vary)] = pv.normalized();
      c.factors[idx(arr.solve)] = sv.normalized();
      c.factors[idx(arr.fixed)] = q.normalized();
      c.alpha = alpha;
      c.residual = residual(c.factors);
      candidates_.push_back(std::move(c));
    };

    if (rq < ds) {
      const RankKernel rk = rank_kernel(m0, RankTolerance{opts_.rank.rel_tol, 0.0});
      emit(u0, rk.kernel_basis.col(rk.kernel_basis.cols() - 1), Complex(0.0));
      return;
    }
    const PencilRoots roots = pencil_roots(m0, m1);
    if (roots.status == PencilStatus::IdenticallySingular) {
      emit(u0, smallest_singular(m0).vector, Complex(0.0));
      return;
    }
    for (const Complex& alpha : roots.roots) {
      emit(u0 + alpha * u1, smallest_singular(m0 + alpha * m1).vector, alpha);
    }
    // The root at infinity: the parametrized factor is u1 itself.
    emit(u1, smallest_singular(m1).vector, std::nullopt);
  }

  // Moves `fixed` along q0 + beta q1 looking for beta where the contracted
  // constraints drop to dims[solve], then solves there.
  void sweep(const Arrangement& arr, const Vector& q0, const Vector& q1) {
    const int ds = dims_[arr.solve];
    const Matrix k0 = contract(arr, q0);
    const Matrix k1 = contract(arr, q1);
    const Matrix generic = k0 + rng_.complex_normal() * k1;
    const int generic_rank = rank_kernel(generic, opts_.rank).rank;
    if (generic_rank <= ds) {
      solve_fixed(arr, q0, std::nullopt);
      return;
    }
    if (generic_rank != ds + 1) return;

    // Restrict to the joint row space so the pencil has full generic rank.
    Matrix stacked(k0.rows(), 2 * k0.cols());
    stacked << k0, k1;
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    const int rs = rank_kernel(stacked, opts_.rank).rank;
    if (rs != generic_rank) return;
    const Matrix basis = svd.matrixU().leftCols(rs).adjoint();
    const Matrix a0 = (basis * k0).transpose();  // columns x rs
    const Matrix a1 = (basis * k1).transpose();
    if (a0.rows() < rs) return;

    // beta with a nonzero y, A(beta) y = 0; a random row projection squares
    // the pencil, spurious roots are rejected by the residual check later.
    const Matrix proj = rng_.gaussian_matrix(rs, static_cast<int>(a0.rows()));
    const PencilRoots roots = pencil_roots(proj * a0, proj * a1);
    for (const Complex& beta : roots.roots) solve_fixed(arr, q0 + beta * q1, ds);
    solve_fixed(arr, q1, ds);
  }

  // Alternating smallest-singular updates; each step cannot increase the residual.
  void polish(Candidate& c) const {
    for (int round = 0; round < opts_.polish_rounds; ++round) {
      if (c.residual <= 1e-14 * norm_) return;
      for (Party p : kParties) {
        const int dp = dims_[p];
        Matrix g(dims_.total(), dp);
        for (int j = 0; j < dp; ++j) {
          std::array<Vector, 3> f = c.factors;
          f[idx(p)] = Vector::Unit(dp, j);
          g.col(j) = rho_.matrix * kron3(f[0], f[1], f[2]);
        }
        std::array<Vector, 3> f = c.factors;
        f[idx(p)] = smallest_singular(g).vector.normalized();
        const double r = residual(f);
        if (r < c.residual) {
          c.factors = std::move(f);
          c.residual = r;
        }
      }
    }
  }

  // Best candidate: smallest residual, ties by smallest |alpha|.
  std::optional<Candidate> best() {
    for (Candidate& c : candidates_) {
      if (c.residual > target() && c.residual < 1e-3 * std::max(norm_, 1e-300)) polish(c);
    }
    const Candidate* out = nullptr;
    const double tie = 1e-15 * std::max(norm_, 1e-300) * dims_.total();
    auto alpha_size = [](const Candidate& c) {
      return c.alpha ? std::abs(*c.alpha) : std::numeric_limits<double>::infinity();
    };
    for (const Candidate& c : candidates_) {
      if (!std::isfinite(c.residual)) continue;
      if (!out || c.residual < out->residual - tie ||
          (std::abs(c.residual - out->residual) <= tie && alpha_size(c) < alpha_size(*out))) {
        out = &c;
      }
    }
    if (!out) return std::nullopt;
    return *out;
  }

  bool has_target() {
    const auto b = best();
    return b && b->residual <= target();
  }

  double best_residual() {
    const auto b = best();
    return b ? b->residual : std::numeric_limits<double>::infinity();
  }

  // Kernel vector of a single-party marginal, if one exists.
  void local_support() {
    for (Party p : kParties) {
      const Matrix marginal = reduced_operator(rho_, p);
      const RankKernel rk = rank_kernel(marginal, opts_.rank);
      if (rk.kernel_dim() == 0) continue;
      Candidate c;
      for (Party other : kParties) c.factors[idx(other)] = Vector::Unit(dims_[other], 0);
      c.factors[idx(p)] = rk.kernel_basis.col(0).normalized();
      c.residual = residual(c.factors);
      candidates_.push_back(std::move(c));
      return;
    }
  }

  void underdetermined() {
    const Vector alice = opts_.alice ? opts_.alice->normalized() : rng_.unit_vector(dims_.a);
    if (alice.size() != dims_.a) throw DimsError("fixed Alice vector has the wrong size");
    solve_fixed(Arrangement{Party::B, Party::C, Party::A}, alice, std::nullopt);
  }

  void alice_sweep() {
    sweep(Arrangement{Party::B, Party::C, Party::A}, rng_.unit_vector(dims_.a), rng_.unit_vector(dims_.a));
  }

  void charlie_sweep() {
    sweep(Arrangement{Party::A, Party::B, Party::C}, rng_.unit_vector(dims_.c), rng_.unit_vector(dims_.c));
  }

  void random_bob() { solve_fixed(Arrangement{Party::A, Party::C, Party::B}, rng_.unit_vector(dims_.b), std::nullopt); }

  void generic() {
    static constexpr std::array<Arrangement, 6> kArrangements{{
        {Party::A, Party::C, Party::B},
        {Party::B, Party::C, Party::A},
        {Party::A, Party::B, Party::C},
        {Party::C, Party::B, Party::A},
        {Party::B, Party::A, Party::C},
        {Party::C, Party::A, Party::B},
    }};
    for (int trial = 0; trial < opts_.generic_trials; ++trial) {
      for (const Arrangement& arr : kArrangements) {
        const int dq = dims_[arr.fixed];
        const Vector q0 = rng_.unit_vector(dq);
        solve_fixed(arr, q0, std::nullopt);
        sweep(arr, q0, rng_.unit_vector(dq));
      }
      if (has_target()) return;
    }
  }

 private:
  const DensityOperator& rho_;
  const KernelSearchOptions& opts_;
  TriDims dims_;
  Rng rng_;
  double norm_;
  int rank_ = 0;
  Matrix functionals_;
  std::vector<Candidate> candidates_;
};

KernelStrategy table_strategy(int rank, const TriDims& d) {
  if (d.a == 2 && d.b == 2 && d.c == 3 && rank == 2) return KernelStrategy::Underdetermined;
  if (d.a == 2 && d.b == 2 && d.c == 3 && rank == 4) return KernelStrategy::AliceSweep;
  if (d.a == 2 && d.b == 3 && d.c == 3 && rank == 4) return KernelStrategy::CharlieSweep;
  if (d.a == 2 && d.b == 3 && d.c == 5 && rank == 5) return KernelStrategy::RandomBob;
  return KernelStrategy::Generic;
}

void run_strategy(Search& s, KernelStrategy strategy) {
  switch (strategy) {
    case KernelStrategy::LocalSupport: s.local_support(); break;
    case KernelStrategy::Underdetermined: s.underdetermined(); break;
    case KernelStrategy::AliceSweep: s.alice_sweep(); break;
    case KernelStrategy::CharlieSweep: s.charlie_sweep(); break;
    case KernelStrategy::RandomBob: s.random_bob(); break;
    case KernelStrategy::Generic: s.generic(); break;
    case KernelStrategy::Auto: break;
  }
}

Vector contract_party(const Vector& x, const TriDims& dims, Party p, const Vector& bra) {
  // (<bra|_p (x) I) x, result on the two remaining parties in flat order.
  const int dp = dims[p];
  Vector out = Vector::Zero(dims.total() / dp);
  for (int flat = 0; flat < dims.total(); ++flat) {
    const std::array<int, 3> i = split_index(flat, dims);
    int rest = 0;
    for (Party q : kParties) {
      if (q == p) continue;
      rest = rest * dims[q] + i[idx(q)];
    }
    out(rest) += std::conj(bra(i[idx(p)])) * x(flat);
  }
  return out;
}

}  // namespace

const char* strategy_name(KernelStrategy s) {
  for (const auto& [value, name] : kStrategyNames) {
    if (value == s) return name;
  }
  return "unknown";
}

KernelStrategy parse_strategy(const std::string& name) {
  for (const auto& [value, text] : kStrategyNames) {
    if (name == text) return value;
  }
  throw ArgumentError("unknown kernel strategy '" + name + "'");
}

ProductKernelVector find_product_kernel_vector(const DensityOperator& rho, const KernelSearchOptions& opts) {
  Search search(rho, opts);
  if (search.rank() >= rho.dim()) throw KernelEmptyError("operator has full rank " + std::to_string(search.rank()));

  KernelStrategy used = opts.strategy;
  if (opts.strategy == KernelStrategy::Auto) {
    used = KernelStrategy::LocalSupport;
    search.local_support();
    if (!search.has_target()) {
      used = table_strategy(search.rank(), rho.dims);
      run_strategy(search, used);
    }
    if (!search.has_target() && used != KernelStrategy::Generic) {
      used = KernelStrategy::Generic;
      search.generic();
    }
  } else {
    run_strategy(search, opts.strategy);
  }

  const auto best = search.best();
  if (!best || best->residual > opts.accept_tol * rho.frobenius()) {
    const double r = search.best_residual();
    throw NoProductKernelVectorError("no product kernel vector within the acceptance tolerance (best residual " +
                                         std::to_string(r) + ")",
                                     r);
  }
  ProductKernelVector out;
  out.e = best->factors[0];
  out.f = best->factors[1];
  out.g = best->factors[2];
  out.residual = best->residual;
  out.alpha = best->alpha;
  out.strategy = used;
  out.within_target = best->residual <= search.target();
  return out;
}

Subtraction subtract_projector(const DensityOperator& rho, const Vector& v, const RangeOptions& opts) {
  const RangeQuadratic q = range_inverse_quadratic(rho.matrix, v, opts);
  Matrix out = rho.matrix - q.lambda * (v * v.adjoint());
  out = 0.5 * (out + out.adjoint()).eval();
  return Subtraction{DensityOperator(rho.dims, std::move(out), false), q.lambda};
}

Subtraction subtract_projector(const DensityOperator& rho, const StateVector& v, const RangeOptions& opts) {
  if (!(v.dims == rho.dims)) throw DimsError("vector dims do not match the operator");
  return subtract_projector(rho, v.amplitudes, opts);
}

Matrix orthogonal_complement(const Vector& v) {
  const Matrix basis = rotation_to_basis(v, 0).adjoint();
  return basis.rightCols(v.size() - 1);
}

double DerivedRangeVectors::max_residual() const {
  double out = std::max(bc_residual, ac_residual);
  for (double r : ab_residuals) out = std::max(out, r);
  return out;
}

DerivedRangeVectors derived_range_vectors(const DensityOperator& rho, const ProductKernelVector& kv, double tol) {
  const TriDims& d = rho.dims;
  if (d.a != 2) throw DimsError("derived range vectors need a qubit Alice, got " + to_string(d));
  if (kv.e.size() != d.a || kv.f.size() != d.b || kv.g.size() != d.c) {
    throw DimsError("kernel triple does not match the operator dims");
  }
  DerivedRangeVectors out;

  const Vector e_hat = orthogonal_complement(kv.e).col(0);
  const Vector x = rho.matrix * kron3(e_hat, kv.f, kv.g);
  out.psi_bc = contract_party(x, d, Party::A, e_hat);
  out.bc_residual = contract_party(x, d, Party::A, kv.e).norm();

  if (d.b == 2) {
    const Vector f_hat = orthogonal_complement(kv.f).col(0);
    const Vector y = rho.matrix * kron3(kv.e, f_hat, kv.g);
    out.psi_ac = contract_party(y, d, Party::B, f_hat);
    out.ac_residual = contract_party(y, d, Party::B, kv.f).norm();
  }

  out.g_complement = orthogonal_complement(kv.g);
  for (Eigen::Index i = 0; i < out.g_complement.cols(); ++i) {
    const Vector g_hat = out.g_complement.col(i);
    const Vector z = rho.matrix * kron3(kv.e, kv.f, g_hat);
    out.psi_ab.push_back(contract_party(z, d, Party::C, g_hat));
    out.ab_residuals.push_back(contract_party(z, d, Party::C, kv.g).norm());
  }

  const double limit = tol * rho.frobenius();
  if (out.max_residual() > limit) {
    throw StructureViolationError("range vector factorization residual " + std::to_string(out.max_residual()) +
                                  " exceeds " + std::to_string(limit));
  }
  return out;
}

}  // namespace trisep
