#pragma once

#include <vector>

#include "tvdeblur/potentials.hpp"

namespace tvdeblur {

struct MapResult {
  Image x_map;
  std::vector<double> objective_trace;  // l + phi_eps per outer iteration
  int iterations = 0;
  bool converged = false;
  int cg_restarts = 0;
};

/// MAP estimate of the smoothed posterior by majorization-minimization
/// (lagged diffusivity): each outer iteration freezes the diagonal
/// Lambda(x) of the TV term and minimizes the quadratic majorizer
///   lambda/2 ||y - Ax||^2 + delta/2 sum_a [(D^v x)_a^2 + (D^h x)_a^2] / Lambda_a
/// with matrix-free conjugate gradients warm-started from the previous
/// iterate. Stops when the relative objective decrease drops below tol.
MapResult solve_map(const PosteriorSpec& spec, const Image& init, double tol, int max_outer,
                    int max_cg);

}  // namespace tvdeblur
