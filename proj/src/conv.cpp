#include "tvdeblur/conv.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "tvdeblur/kernels.hpp"
#include "tvdeblur/rng.hpp"

namespace tvdeblur {

void PatchFrame::load_image(const Image& img) {
  const Rect in = rect.clipped(img.n);
  for (int c = in.c0; c < in.c1(); ++c)
    std::memcpy(cell(in.r0, c), &img.data[img.index(in.r0, c)], sizeof(double) * in.rows);
}

void PatchFrame::load_rect(const Rect& src, const double* values) {
  for (int c = src.c0; c < src.c1(); ++c)
    std::memcpy(cell(src.r0, c), values + static_cast<size_t>(c - src.c0) * src.rows,
                sizeof(double) * src.rows);
}

void PatchFrame::load_rect_clipped(const Rect& src, const double* values) {
  const int r0 = std::max(src.r0, rect.r0), r1 = std::min(src.r1(), rect.r1());
  const int c0 = std::max(src.c0, rect.c0), c1 = std::min(src.c1(), rect.c1());
  if (r0 >= r1 || c0 >= c1) return;
  for (int c = c0; c < c1; ++c)
    std::memcpy(cell(r0, c), values + static_cast<size_t>(c - src.c0) * src.rows + (r0 - src.r0),
                sizeof(double) * (r1 - r0));
}

void PatchFrame::zero_rect(const Rect& sub) {
  for (int c = sub.c0; c < sub.c1(); ++c)
    std::memset(cell(sub.r0, c), 0, sizeof(double) * sub.rows);
}

void corr_on_rect(const PatchFrame& src, const std::vector<double>& taps, int radius,
                  const Rect& out_rect, double* out) {
  const int K = 2 * radius + 1;
  // First tap (-r,-r) of out pixel (r0,c0) reads src cell (r0-r, c0-r).
  const double* origin = src.buf.data() +
                         static_cast<size_t>(out_rect.c0 - radius - src.rect.c0) * src.rect.rows +
                         (out_rect.r0 - radius - src.rect.r0);
  kernels::corr2d(origin, src.rect.rows, taps.data(), K, out, out_rect.rows, out_rect.cols,
                  out_rect.rows);
}

namespace {
Image apply(const ConvOperator& op, const Image& x, const std::vector<double>& taps) {
  if (x.n != op.n) throw std::invalid_argument("convolve: image side does not match operator");
  const int r = op.psf.radius;
  PatchFrame pad;
  pad.reset(Rect{-r, -r, op.n + 2 * r, op.n + 2 * r});
  pad.load_image(x);
  Image out(op.n);
  corr_on_rect(pad, taps, r, Rect{0, 0, op.n, op.n}, out.data.data());
  return out;
}
}  // namespace

Image convolve(const ConvOperator& op, const Image& x) { return apply(op, x, op.psf.weights); }

Image convolve_adjoint(const ConvOperator& op, const Image& y) { return apply(op, y, op.psf.flipped); }

Image generate_data(const ConvOperator& op, const Image& x_true, double noise_std, uint64_t seed) {
  if (noise_std < 0.0) throw std::invalid_argument("generate_data: noise_std must be >= 0");
  Image y = convolve(op, x_true);
  if (noise_std > 0.0) {
    RngStream stream(StreamId{seed, 0, stream_purpose::data_noise, 0, 0});
    std::vector<double> xi(y.data.size());
    stream.fill_normals(xi);
    for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += noise_std * xi[i];
  }
  return y;
}

}  // namespace tvdeblur
