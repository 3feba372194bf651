#include <cmath>

#include "tvdeblur/kernels.hpp"

namespace tvdeblur::kernels {
namespace {

void corr2d_scalar(const double* src, int src_stride, const double* w, int K, double* out,
                   int out_rows, int out_cols, int out_stride) {
  for (int j = 0; j < out_cols; ++j) {
    const double* scol = src + static_cast<size_t>(j) * src_stride;
    double* ocol = out + static_cast<size_t>(j) * out_stride;
    for (int i = 0; i < out_rows; ++i) {
      double acc = 0.0;
      const double* sp = scol + i;
      for (int v = 0; v < K; ++v) {
        const double* srow = sp + static_cast<size_t>(v) * src_stride;
        const double* wrow = w + static_cast<size_t>(v) * K;
        for (int u = 0; u < K; ++u) acc += wrow[u] * srow[u];
      }
      ocol[i] = acc;
    }
  }
}

// Neumaier-compensated accumulation keeps potential differences stable
// enough for the 1e-10 local/global equivalence checks.
struct Compensated {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

double sum_scalar(const double* a, int len) {
  Compensated acc;
  for (int i = 0; i < len; ++i) acc.add(a[i]);
  return acc.value();
}

double sumsq_scalar(const double* a, int len) {
  Compensated acc;
  for (int i = 0; i < len; ++i) acc.add(a[i] * a[i]);
  return acc.value();
}

double dot_scalar(const double* a, const double* b, int len) {
  Compensated acc;
  for (int i = 0; i < len; ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

void vsub_scalar(const double* a, const double* b, double* out, int len) {
  for (int i = 0; i < len; ++i) out[i] = a[i] - b[i];
}

void mala_step_scalar(const double* x, const double* g, const double* xi, double tau, double s,
                      double* z, int len) {
  for (int i = 0; i < len; ++i) z[i] = (x[i] + tau * g[i]) + s * xi[i];
}

void drift_resid_scalar(const double* a, const double* b, const double* g, double tau, double* out,
                        int len) {
  for (int i = 0; i < len; ++i) out[i] = (a[i] - b[i]) - tau * g[i];
}

}  // namespace

namespace scalar_impl {
const KernelTable kTable = {
    corr2d_scalar, sum_scalar, sumsq_scalar, dot_scalar,
    vsub_scalar,   mala_step_scalar, drift_resid_scalar,
};
}  // namespace scalar_impl

}  // namespace tvdeblur::kernels
