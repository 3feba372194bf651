#include "tvdeblur/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvdeblur/kernels.hpp"
#include "tvdeblur/rng.hpp"

namespace tvdeblur {

namespace {

constexpr double kTol = 1e-8;
constexpr int kMaxIter = 10000;
constexpr uint64_t kStartSeed = 0x646f6d31u;  // start vectors for the power iterations

/// out = [A^T A]_{dst,src} v, matrix-free over local rects:
/// embed v on src block, convolve onto src+r, correlate back onto dst.
struct PairApply {
  const ConvOperator& op;
  Rect src, dst, mid;
  PatchFrame fwd_frame, adj_frame;
  std::vector<double> u;

  PairApply(const ConvOperator& o, const Rect& s, const Rect& d) : op(o), src(s), dst(d) {
    mid = src.grown(op.psf.radius).clipped(op.n);
    u.resize(mid.size());
  }

  void apply(const double* v, double* out) {
    const int r = op.psf.radius;
    fwd_frame.reset(src.grown(2 * r));
    fwd_frame.load_rect(src, v);
    corr_on_rect(fwd_frame, op.psf.weights, r, mid, u.data());
    adj_frame.reset(dst.grown(r));
    adj_frame.load_rect_clipped(mid, u.data());
    corr_on_rect(adj_frame, op.psf.flipped, r, dst, out);
  }
};

void random_unit(std::vector<double>& v, uint32_t i, uint32_t j) {
  RngStream stream(StreamId{kStartSeed, i, stream_purpose::power_iter, j, 0});
  stream.fill_normals(v);
  const double norm = std::sqrt(kernels::sumsq(v.data(), static_cast<int>(v.size())));
  for (double& x : v) x /= norm;
}

void normalize(std::vector<double>& v) {
  const double norm = std::sqrt(kernels::sumsq(v.data(), static_cast<int>(v.size())));
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

/// Smallest eigenvalue of the SPD diagonal block, via power iteration on
/// (s I - C) with s = ||C||_F.
double smallest_eig_diag(const ConvOperator& op, const Rect& block, int block_id, bool& converged) {
  const int q = block.size();
  PairApply C(op, block, block);
  std::vector<double> e(q, 0.0), col(q);

  double frob_sq = 0.0;
  for (int k = 0; k < q; ++k) {
    e[k] = 1.0;
    C.apply(e.data(), col.data());
    e[k] = 0.0;
    frob_sq += kernels::sumsq(col.data(), q);
  }
  const double s = std::sqrt(frob_sq);
  if (s == 0.0) {
    converged = true;
    return 0.0;
  }

  std::vector<double> v(q), y(q), w(q);
  random_unit(v, static_cast<uint32_t>(block_id), static_cast<uint32_t>(block_id));
  double theta = s;
  double theta_prev = std::numeric_limits<double>::infinity();
  int stalled = 0;
  converged = false;
  for (int it = 0; it < kMaxIter; ++it) {
    C.apply(v.data(), y.data());
    theta = s - kernels::dot(v.data(), y.data(), q);  // Rayleigh quotient of sI - C
    double resid_sq = 0.0;
    for (int k = 0; k < q; ++k) {
      w[k] = s * v[k] - y[k];
      const double rk = w[k] - theta * v[k];
      resid_sq += rk * rk;
    }
    if (std::sqrt(resid_sq) <= kTol * std::max(s, 1e-30)) {
      converged = true;
      break;
    }
    // Clustered bottom eigenvalues: the iterate keeps rotating inside the
    // cluster while the Rayleigh value has fully settled.
    stalled = std::abs(theta - theta_prev) <= 1e-13 * std::max(std::abs(theta), 1e-30) ? stalled + 1 : 0;
    if (stalled >= 10) {
      converged = true;
      break;
    }
    theta_prev = theta;
    normalize(w);
    v.swap(w);
  }
  return s - theta;
}

/// Spectral norm of the off-diagonal block B = [A^T A]_{i,j}, via power
/// iteration on B^T B.
double offdiag_norm(const ConvOperator& op, const Rect& bi, const Rect& bj, int i, int j,
                    bool& converged) {
  const int q = bj.size();
  PairApply B(op, bj, bi);   // block j -> block i
  PairApply Bt(op, bi, bj);  // adjoint direction
  std::vector<double> v(q), y(bi.size()), z(q);
  random_unit(v, static_cast<uint32_t>(i), static_cast<uint32_t>(j));
  double sigma = 0.0;
  double sigma_prev = std::numeric_limits<double>::infinity();
  int stalled = 0;
  converged = false;
  for (int it = 0; it < kMaxIter; ++it) {
    B.apply(v.data(), y.data());
    const double sigma_sq = kernels::sumsq(y.data(), static_cast<int>(y.size()));
    sigma = std::sqrt(sigma_sq);
    if (sigma <= 1e-300) {
      converged = true;
      return 0.0;
    }
    Bt.apply(y.data(), z.data());
    double resid_sq = 0.0;
    for (int k = 0; k < q; ++k) {
      const double rk = z[k] - sigma_sq * v[k];
      resid_sq += rk * rk;
    }
    if (std::sqrt(resid_sq) <= kTol * sigma_sq) {
      converged = true;
      break;
    }
    stalled = std::abs(sigma - sigma_prev) <= 1e-13 * std::max(sigma, 1e-30) ? stalled + 1 : 0;
    if (stalled >= 10) {
      converged = true;
      break;
    }
    sigma_prev = sigma;
    normalize(z);
    v.swap(z);
  }
  return sigma;
}

int chebyshev_gap(const Rect& a, const Rect& b) {
  const int row_gap = std::max({0, a.r0 - (b.r1() - 1), b.r0 - (a.r1() - 1)});
  const int col_gap = std::max({0, a.c0 - (b.c1() - 1), b.c0 - (a.c1() - 1)});
  return std::max(row_gap, col_gap);
}

}  // namespace

DominanceCertificate dominance_check(const ConvOperator& op, const BlockPartition& part) {
  if (op.n != part.n) throw std::invalid_argument("dominance_check: partition side mismatch");
  DominanceCertificate cert;
  cert.b = part.b;
  cert.m_matrix.assign(static_cast<size_t>(part.b) * part.b, 0.0);
  auto m_at = [&](int i, int j) -> double& { return cert.m_matrix[static_cast<size_t>(j) * part.b + i]; };

  for (int i = 0; i < part.b; ++i) {
    bool ok;
    m_at(i, i) = smallest_eig_diag(op, part.block_rect(i), i, ok);
    if (!ok) {
      cert.all_converged = false;
      cert.nonconverged.emplace_back(i, i);
    }
  }

  for (int i = 0; i < part.b; ++i) {
    const Rect bi = part.block_rect(i);
    for (int j = i + 1; j < part.b; ++j) {
      const Rect bj = part.block_rect(j);
      // Blocks farther apart than the PSF footprint have an exactly zero
      // interaction block.
      if (chebyshev_gap(bi, bj) > 2 * part.r) continue;
      bool ok;
      const double sigma = offdiag_norm(op, bi, bj, i, j, ok);
      if (!ok) {
        cert.all_converged = false;
        cert.nonconverged.emplace_back(i, j);
      }
      m_at(i, j) = sigma;
      m_at(j, i) = sigma;
    }
  }

  double c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < part.b; ++i) {
    double off = 0.0;
    for (int j = 0; j < part.b; ++j)
      if (j != i) off += cert.m(i, j);
    c = std::min(c, cert.m(i, i) - off);
  }
  cert.c = c;
  cert.dominant = c > 0.0;
  return cert;
}

}  // namespace tvdeblur
