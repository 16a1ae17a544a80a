#include "trisep/ppt_support.hpp"

#include "trisep/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trisep {

double PptReport::worst() const {
  return std::min(plain_min_eig, *std::min_element(min_eigs.begin(), min_eigs.end()));
}

PptReport ppt_check(const DensityOperator& rho, double tol) {
  PptReport report;
  report.tol = tol;
  report.plain_min_eig = hermitian_eig(rho.matrix).values(0);

  const auto& subsets = nontrivial_subsets();
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const Matrix pt = partial_transpose(rho.matrix, rho.dims, subsets[i]);
    report.min_eigs[i] = hermitian_eig(pt).values(0);
  }

  // t_S and t_{complement S} are full transposes of each other.
  const double consistency = 1e-10 * std::max(1.0, rho.frobenius());
  for (std::size_t i = 0; i < 3; ++i) {
    const double gap = std::abs(report.min_eigs[i] - report.min_eigs[5 - i]);
    if (gap > consistency) {
      throw InternalConsistencyError("partial transposes t_" + subsets[i].label() + " and t_" +
                                     subsets[5 - i].label() + " disagree by " + std::to_string(gap));
    }
  }

  report.ppt = report.worst() >= -tol;
  return report;
}

SupportProfile local_support(const DensityOperator& rho, const RankTolerance& tol) {
  SupportProfile profile;
  for (Party p : kParties) {
    const Matrix marginal = reduced_operator(rho, p);
    const HermitianEig eig = hermitian_eig(marginal, 1e-8);
    const RankKernel rk = rank_kernel(marginal, tol);
    // Eigenvalues ascend; the top `rank` eigenvectors span the marginal's range.
    profile.dims[static_cast<int>(p)] = rk.rank;
    profile.isometries[static_cast<int>(p)] = eig.vectors.rightCols(rk.rank);
  }
  return profile;
}

DensityOperator compress_to_support(const DensityOperator& rho, const SupportProfile& support) {
  const Matrix v = kron3(support.isometries[0], support.isometries[1], support.isometries[2]);
  const TriDims dims{support.dims[0], support.dims[1], support.dims[2]};
  if (dims.total() == 0) throw DimsError("cannot compress onto an empty support");
  return DensityOperator(dims, v.adjoint() * rho.matrix * v, rho.normalized);
}

DensityOperator embed_from_support(const DensityOperator& compressed, const SupportProfile& support) {
  const Matrix v = kron3(support.isometries[0], support.isometries[1], support.isometries[2]);
  const TriDims dims{static_cast<int>(support.isometries[0].rows()),
                     static_cast<int>(support.isometries[1].rows()),
                     static_cast<int>(support.isometries[2].rows())};
  if (compressed.matrix.rows() != v.cols()) throw DimsError("embed_from_support: size does not match support");
  return DensityOperator(dims, v * compressed.matrix * v.adjoint(), compressed.normalized);
}

}  // namespace trisep
