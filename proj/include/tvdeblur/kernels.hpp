#pragma once

#include <cstdint>

namespace tvdeblur::kernels {

// Numeric inner loops used by the convolution operators, the potentials,
// and the samplers. Every kernel has a scalar reference implementation and
// may have SIMD variants; the active variant is selected at runtime from
// CPU features (override with set_backend() or TVDEBLUR_KERNEL=scalar|avx2).
//
// Contract: elementwise kernels (vsub, mala_step, drift_resid, scale_sub)
// are bit-identical across backends. Reductions and corr2d may differ in
// summation order between backends; they agree to tight relative tolerance
// and are deterministic within one backend.

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name(Backend b);
bool backend_available(Backend b);
void set_backend(Backend b);  // throws std::invalid_argument if unavailable
void reset_backend();         // re-run auto-detection (honors TVDEBLUR_KERNEL)

struct KernelTable {
  // Valid 2D correlation with a K-by-K tap table:
  //   out(i, j) = sum_{u,v in [0,K)} w[v*K + u] * src[(j+v)*src_stride + i + u]
  // for i in [0, out_rows), j in [0, out_cols). Caller guarantees that all
  // reads stay inside the src buffer. Column-major everywhere.
  void (*corr2d)(const double* src, int src_stride, const double* w, int K, double* out,
                 int out_rows, int out_cols, int out_stride);

  // Compensated (Neumaier) reductions.
  double (*sum)(const double* a, int len);
  double (*sumsq)(const double* a, int len);
  double (*dot)(const double* a, const double* b, int len);

  // out = a - b
  void (*vsub)(const double* a, const double* b, double* out, int len);
  // z = x + tau*g + s*xi   (MALA proposal step)
  void (*mala_step)(const double* x, const double* g, const double* xi, double tau, double s,
                    double* z, int len);
  // out = (a - b) - tau*g  (reverse-kernel drift residual)
  void (*drift_resid)(const double* a, const double* b, const double* g, double tau, double* out,
                      int len);
};

const KernelTable& table();

inline void corr2d(const double* src, int src_stride, const double* w, int K, double* out,
                   int out_rows, int out_cols, int out_stride) {
  table().corr2d(src, src_stride, w, K, out, out_rows, out_cols, out_stride);
}
inline double sum(const double* a, int len) { return table().sum(a, len); }
inline double sumsq(const double* a, int len) { return table().sumsq(a, len); }
inline double dot(const double* a, const double* b, int len) { return table().dot(a, b, len); }
inline void vsub(const double* a, const double* b, double* out, int len) {
  table().vsub(a, b, out, len);
}
inline void mala_step(const double* x, const double* g, const double* xi, double tau, double s,
                      double* z, int len) {
  table().mala_step(x, g, xi, tau, s, z, len);
}
inline void drift_resid(const double* a, const double* b, const double* g, double tau, double* out,
                        int len) {
  table().drift_resid(a, b, g, tau, out, len);
}

namespace scalar_impl {
extern const KernelTable kTable;
}
namespace avx2_impl {
extern const KernelTable kTable;  // defined only when the AVX2 TU is built
}

}  // namespace tvdeblur::kernels
