#include "tvdeblur/phantom.hpp"

#include <cmath>

namespace tvdeblur {

Image shapes_phantom(int n) {
  Image img(n, 0.15);
  const double s = static_cast<double>(n);

  auto disk = [&](double cr, double cc, double rad, double value) {
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) {
        const double dr = (r + 0.5) / s - cr;
        const double dc = (c + 0.5) / s - cc;
        if (dr * dr + dc * dc <= rad * rad) img.at(r, c) = value;
      }
  };
  auto box = [&](double r0, double c0, double r1, double c1, double value) {
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) {
        const double rr = (r + 0.5) / s, cc = (c + 0.5) / s;
        if (rr >= r0 && rr < r1 && cc >= c0 && cc < c1) img.at(r, c) = value;
      }
  };

  disk(0.30, 0.32, 0.22, 0.75);
  box(0.55, 0.55, 0.92, 0.80, 0.40);
  disk(0.70, 0.30, 0.10, 0.95);
  box(0.10, 0.62, 0.16, 0.95, 0.05);
  // right triangle in the upper-right corner
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      const double rr = (r + 0.5) / s, cc = (c + 0.5) / s;
      if (cc > 0.70 && rr > 0.25 && rr < 0.50 && (cc - 0.70) > (rr - 0.25)) img.at(r, c) = 0.60;
    }
  disk(0.50, 0.52, 0.05, 1.00);
  return img;
}

}  // namespace tvdeblur
