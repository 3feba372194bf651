#pragma once

#include "tvdeblur/image.hpp"

namespace tvdeblur {

/// Deterministic piecewise-constant test scene in [0, 1]: flat background
/// with disks, rectangles, a triangle and a thin bar. Scales with n, so
/// crops of a larger phantom stay piecewise constant. Used as the bundled
/// ground truth for demos and the regression protocol.
Image shapes_phantom(int n);

}  // namespace tvdeblur
