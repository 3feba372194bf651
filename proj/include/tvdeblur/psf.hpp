#pragma once

#include <vector>

namespace tvdeblur {

/// Discrete point spread function of radius r: (2r+1)^2 weights indexed by
/// offsets (mu, nu) in {-r..r}^2 with mu the row offset and nu the column
/// offset. Stored column-major over the offset grid; flipped holds the
/// 180-degree rotated tap table used by the adjoint.
struct Psf {
  int radius = 0;
  std::vector<double> weights;
  std::vector<double> flipped;

  int K() const { return 2 * radius + 1; }
  double w(int mu, int nu) const { return weights[(nu + radius) * K() + (mu + radius)]; }
};

Psf make_psf(int radius, std::vector<double> weights);

/// Identity kernel (radius 0, single weight 1).
Psf delta_psf();

/// Normalized isotropic Gaussian: w(mu,nu) proportional to
/// exp(-(mu^2+nu^2)/(2 sigma^2)).
Psf gaussian_psf(int radius, double sigma);

/// Unit-mass motion-blur segment: `length` samples stepped along the
/// dominant axis of direction `angle_deg` (counterclockwise from +x with
/// rows pointing down) and rounded to the grid. length=1 gives the delta
/// kernel; length 17 at 45 degrees covers the 17-cell diagonal.
Psf motion_psf(int length, double angle_deg);

}  // namespace tvdeblur
