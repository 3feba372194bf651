#pragma once

#include <cstdint>
#include <vector>

#include "tvdeblur/image.hpp"
#include "tvdeblur/psf.hpp"

namespace tvdeblur {

/// Zero-padded rectangular staging buffer for matrix-free convolution.
/// Covers `rect` (which may extend beyond the image; those cells stay 0)
/// in column-major order. Kernels read it via corr2d without bounds checks.
struct PatchFrame {
  Rect rect;
  std::vector<double> buf;

  void reset(const Rect& r) {
    rect = r;
    buf.assign(static_cast<size_t>(r.rows) * r.cols, 0.0);
  }

  double* cell(int row, int col) { return buf.data() + static_cast<size_t>(col - rect.c0) * rect.rows + (row - rect.r0); }
  const double* cell(int row, int col) const {
    return buf.data() + static_cast<size_t>(col - rect.c0) * rect.rows + (row - rect.r0);
  }

  /// Copy the image region rect ∩ [0,n)^2 into the buffer (rest stays 0).
  void load_image(const Image& img);
  /// Copy `values` (column-major over `src`) into the buffer.
  void load_rect(const Rect& src, const double* values);
  /// Like load_rect but copies only src ∩ rect (values outside are dropped).
  void load_rect_clipped(const Rect& src, const double* values);
  /// Zero the cells of `sub` (used to mask out a core block).
  void zero_rect(const Rect& sub);
};

/// out(column-major over `out_rect`) = correlation of `src.buf` with `taps`
/// centered at each out pixel: out(p) = sum_{|off|<=r} taps[off] src(p+off).
/// Requires out_rect grown by `radius` to be contained in src.rect.
void corr_on_rect(const PatchFrame& src, const std::vector<double>& taps, int radius,
                  const Rect& out_rect, double* out);

/// Matrix-free convolution operator A for an n-by-n image with zero padding
/// outside the grid. Immutable and shareable across threads.
struct ConvOperator {
  Psf psf;
  int n = 0;

  ConvOperator() = default;
  ConvOperator(Psf p, int side) : psf(std::move(p)), n(side) {
    if (side <= 0) throw std::invalid_argument("ConvOperator: image side must be positive");
  }
};

/// out(a,b) = sum_{mu,nu} w(mu,nu) x(a+mu, b+nu), zero outside the grid.
Image convolve(const ConvOperator& op, const Image& x);

/// Adjoint (correlation with the flipped kernel, zero padding); satisfies
/// <Ax, y> = <x, A^T y>.
Image convolve_adjoint(const ConvOperator& op, const Image& y);

/// y = A x_true + noise_std * xi with i.i.d. standard normal xi,
/// reproducible from (seed). The matching noise precision is 1/noise_std^2.
Image generate_data(const ConvOperator& op, const Image& x_true, double noise_std, uint64_t seed);

}  // namespace tvdeblur
