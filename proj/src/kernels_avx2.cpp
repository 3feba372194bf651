// AVX2 + FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and is only entered after the runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "tvdeblur/kernels.hpp"

namespace tvdeblur::kernels {
namespace {

void corr2d_avx2(const double* src, int src_stride, const double* w, int K, double* out,
                 int out_rows, int out_cols, int out_stride) {
  for (int j = 0; j < out_cols; ++j) {
    const double* scol = src + static_cast<size_t>(j) * src_stride;
    double* ocol = out + static_cast<size_t>(j) * out_stride;
    int i = 0;
    for (; i + 4 <= out_rows; i += 4) {
      __m256d acc = _mm256_setzero_pd();
      const double* sp = scol + i;
      for (int v = 0; v < K; ++v) {
        const double* srow = sp + static_cast<size_t>(v) * src_stride;
        const double* wrow = w + static_cast<size_t>(v) * K;
        for (int u = 0; u < K; ++u)
          acc = _mm256_fmadd_pd(_mm256_set1_pd(wrow[u]), _mm256_loadu_pd(srow + u), acc);
      }
      _mm256_storeu_pd(ocol + i, acc);
    }
    for (; i < out_rows; ++i) {
      double acc = 0.0;
      const double* sp = scol + i;
      for (int v = 0; v < K; ++v) {
        const double* srow = sp + static_cast<size_t>(v) * src_stride;
        const double* wrow = w + static_cast<size_t>(v) * K;
        for (int u = 0; u < K; ++u) acc = std::fma(wrow[u], srow[u], acc);
      }
      ocol[i] = acc;
    }
  }
}

struct Compensated4 {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d t = _mm256_add_pd(sum, x);
    const __m256d mask = _mm256_set1_pd(-0.0);
    const __m256d abs_sum = _mm256_andnot_pd(mask, sum);
    const __m256d abs_x = _mm256_andnot_pd(mask, x);
    const __m256d big_first = _mm256_add_pd(_mm256_sub_pd(sum, t), x);
    const __m256d small_first = _mm256_add_pd(_mm256_sub_pd(x, t), sum);
    const __m256d corr = _mm256_blendv_pd(small_first, big_first, _mm256_cmp_pd(abs_sum, abs_x, _CMP_GE_OQ));
    comp = _mm256_add_pd(comp, corr);
    sum = t;
  }

  // Lane merge: compensated scalar pass over the 4 partial sums, then the
  // 4 partial compensations.
  double value() const {
    alignas(32) double s[4], c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    double total = 0.0, comp_total = 0.0;
    auto add1 = [&](double x) {
      const double t = total + x;
      if (std::abs(total) >= std::abs(x))
        comp_total += (total - t) + x;
      else
        comp_total += (x - t) + total;
      total = t;
    };
    for (double v : s) add1(v);
    for (double v : c) add1(v);
    return total + comp_total;
  }
};

double scalar_tail_sum(const double* a, int start, int len, double init) {
  double total = init, comp = 0.0;
  for (int i = start; i < len; ++i) {
    const double x = a[i];
    const double t = total + x;
    if (std::abs(total) >= std::abs(x))
      comp += (total - t) + x;
    else
      comp += (x - t) + total;
    total = t;
  }
  return total + comp;
}

double sum_avx2(const double* a, int len) {
  Compensated4 acc;
  int i = 0;
  for (; i + 4 <= len; i += 4) acc.add(_mm256_loadu_pd(a + i));
  return scalar_tail_sum(a, i, len, acc.value());
}

double sumsq_avx2(const double* a, int len) {
  Compensated4 acc;
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc.add(_mm256_mul_pd(v, v));
  }
  double total = acc.value(), comp = 0.0;
  for (; i < len; ++i) {
    const double x = a[i] * a[i];
    const double t = total + x;
    if (std::abs(total) >= std::abs(x))
      comp += (total - t) + x;
    else
      comp += (x - t) + total;
    total = t;
  }
  return total + comp;
}

double dot_avx2(const double* a, const double* b, int len) {
  Compensated4 acc;
  int i = 0;
  for (; i + 4 <= len; i += 4)
    acc.add(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double total = acc.value(), comp = 0.0;
  for (; i < len; ++i) {
    const double x = a[i] * b[i];
    const double t = total + x;
    if (std::abs(total) >= std::abs(x))
      comp += (total - t) + x;
    else
      comp += (x - t) + total;
    total = t;
  }
  return total + comp;
}

// The elementwise kernels below intentionally use mul/add (not FMA) so they
// round exactly like the scalar reference.

void vsub_avx2(const double* a, const double* b, double* out, int len) {
  int i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < len; ++i) out[i] = a[i] - b[i];
}

void mala_step_avx2(const double* x, const double* g, const double* xi, double tau, double s,
                    double* z, int len) {
  const __m256d vt = _mm256_set1_pd(tau);
  const __m256d vs = _mm256_set1_pd(s);
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d drift = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vt, _mm256_loadu_pd(g + i)));
    _mm256_storeu_pd(z + i, _mm256_add_pd(drift, _mm256_mul_pd(vs, _mm256_loadu_pd(xi + i))));
  }
  for (; i < len; ++i) z[i] = (x[i] + tau * g[i]) + s * xi[i];
}

void drift_resid_avx2(const double* a, const double* b, const double* g, double tau, double* out,
                      int len) {
  const __m256d vt = _mm256_set1_pd(tau);
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(d, _mm256_mul_pd(vt, _mm256_loadu_pd(g + i))));
  }
  for (; i < len; ++i) out[i] = (a[i] - b[i]) - tau * g[i];
}

}  // namespace

namespace avx2_impl {
const KernelTable kTable = {
    corr2d_avx2, sum_avx2, sumsq_avx2, dot_avx2,
    vsub_avx2,   mala_step_avx2, drift_resid_avx2,
};
}  // namespace avx2_impl

}  // namespace tvdeblur::kernels
