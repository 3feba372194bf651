#pragma once

#include <utility>
#include <vector>

#include "tvdeblur/conv.hpp"
#include "tvdeblur/partition.hpp"

namespace tvdeblur {

/// Certificate for c-diagonal block dominance of A^T A: a symmetric b-by-b
/// matrix M with M_ii = smallest eigenvalue of (A^T A)_ii (the tightest
/// scalar with (A^T A)_ii >= M_ii I) and M_ij = ||(A^T A)_ij||_2 for i != j,
/// plus the achieved slack c = min_i (M_ii - sum_{j != i} M_ij).
struct DominanceCertificate {
  int b = 0;
  std::vector<double> m_matrix;  // b x b, column-major
  double c = 0.0;
  bool dominant = false;
  bool all_converged = true;
  std::vector<std::pair<int, int>> nonconverged;  // (i, j) pairs that hit max iterations

  double m(int i, int j) const { return m_matrix[static_cast<size_t>(j) * b + i]; }
};

/// Matrix-free computation of the certificate by power iteration on local
/// gather/convolve/scatter compositions (tolerance 1e-8 relative change,
/// at most 10000 iterations per quantity; non-convergence is flagged).
/// Block pairs farther apart than the 2r PSF footprint are skipped as
/// exact zeros. The diagonal shift uses the Frobenius norm of the block,
/// assembled from q local matvecs.
DominanceCertificate dominance_check(const ConvOperator& op, const BlockPartition& part);

}  // namespace tvdeblur
