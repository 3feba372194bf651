#include "tvdeblur/psf.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace tvdeblur {

namespace {
std::vector<double> flip_taps(const std::vector<double>& w, int K) {
  std::vector<double> out(w.size());
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < K; ++i) out[(K - 1 - j) * K + (K - 1 - i)] = w[j * K + i];
  return out;
}
}  // namespace

Psf make_psf(int radius, std::vector<double> weights) {
  if (radius < 0) throw std::invalid_argument("make_psf: radius must be non-negative");
  const int K = 2 * radius + 1;
  if (static_cast<int>(weights.size()) != K * K)
    throw std::invalid_argument("make_psf: expected (2r+1)^2 weights");
  for (double v : weights)
    if (!std::isfinite(v)) throw std::invalid_argument("make_psf: weights must be finite");
  Psf psf;
  psf.radius = radius;
  psf.weights = std::move(weights);
  psf.flipped = flip_taps(psf.weights, K);
  return psf;
}

Psf delta_psf() { return make_psf(0, {1.0}); }

Psf gaussian_psf(int radius, double sigma) {
  if (radius < 0) throw std::invalid_argument("gaussian_psf: radius must be non-negative");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_psf: sigma must be positive");
  const int K = 2 * radius + 1;
  std::vector<double> w(static_cast<size_t>(K) * K);
  double total = 0.0;
  for (int nu = -radius; nu <= radius; ++nu)
    for (int mu = -radius; mu <= radius; ++mu) {
      const double v = std::exp(-(mu * mu + nu * nu) / (2.0 * sigma * sigma));
      w[(nu + radius) * K + (mu + radius)] = v;
      total += v;
    }
  for (double& v : w) v /= total;
  return make_psf(radius, std::move(w));
}

Psf motion_psf(int length, double angle_deg) {
  if (length < 1) throw std::invalid_argument("motion_psf: length must be >= 1");
  const double theta = angle_deg * M_PI / 180.0;
  const double cx = std::cos(theta);
  const double cy = std::sin(theta);
  const double dominant = std::max(std::abs(cx), std::abs(cy));
  // Step so that the dominant axis advances by one pixel per sample; the
  // paper's 17-pixel / 45-degree kernel then lands exactly on the diagonal.
  const double step_col = cx / dominant;
  const double step_row = -cy / dominant;  // image rows grow downward

  std::map<std::pair<int, int>, double> cells;
  int radius = 0;
  const double mass = 1.0 / length;
  for (int j = 0; j < length; ++j) {
    const double t = j - (length - 1) / 2.0;
    const int col = static_cast<int>(std::lround(t * step_col));
    const int row = static_cast<int>(std::lround(t * step_row));
    cells[{row, col}] += mass;
    radius = std::max({radius, std::abs(row), std::abs(col)});
  }

  const int K = 2 * radius + 1;
  std::vector<double> w(static_cast<size_t>(K) * K, 0.0);
  for (const auto& [rc, v] : cells) w[(rc.second + radius) * K + (rc.first + radius)] = v;
  return make_psf(radius, std::move(w));
}

}  // namespace tvdeblur
