#pragma once

#include <vector>

#include "tvdeblur/conv.hpp"
#include "tvdeblur/image.hpp"

namespace tvdeblur {

/// Matrix-free finite-difference pair D^(v) = I_n (x) D_n, D^(h) = D_n (x) I_n
/// with zero Dirichlet boundary: row a of D^(v) x is x_below(a) - x_a, with 0
/// past the bottom edge (so the last row in each column contributes -x_a).
struct DiffOps {
  int n = 0;
};

/// Compiled row set for evaluating sum_a sqrt((D_a^v x)^2 + (D_a^h x)^2 + eps)
/// restricted to the rows whose stencil touches a core rectangle, together
/// with the fixed offsets b contributed by frozen pixels outside the core.
///
/// The same structure serves the global potentials (core = whole image, all
/// offsets zero) and the local block prior (core = one block, offsets from
/// the +1 frame), so local and global evaluations share one code path.
struct TvPlan {
  int n = 0;
  Rect core;
  int rows = 0;
  std::vector<int32_t> v_add, v_sub, h_add, h_sub;  // core-local index or -1
  std::vector<double> b_v, b_h;                     // frozen-pixel offsets

  /// Rows ordered by global pixel index. frame may be null when the core
  /// covers the whole image (no frozen pixels are read then).
  void build(int n_img, const Rect& core_rect, const Image* frame);
};

/// Value (delta * sum of row terms); optionally accumulates the gradient
/// into grad (caller zeroes it) and/or writes the per-row factors
/// delta / sqrt(...) into f_out. x_core is column-major over plan.core.
double tv_plan_eval(const TvPlan& plan, const double* x_core, double eps, double delta,
                    double* grad, double* f_out);

/// out += delta * D^T diag(f) D v restricted to the plan's rows (stencil
/// part only, no offsets); f as produced by tv_plan_eval's f_out.
void tv_plan_apply_quadratic(const TvPlan& plan, const double* f, const double* v, double* out);

/// Everything that defines the smoothed posterior pi_eps, Eq.-level:
///   pi_eps(x) ∝ exp(-lambda/2 ||y - Ax||^2 - delta sum_a sqrt(... + eps)).
/// Immutable after construction; shareable across threads.
struct PosteriorSpec {
  double lambda = 1.0;
  double delta = 0.0;
  double epsilon = 0.0;
  Image y;
  ConvOperator conv;
  DiffOps diff;
  TvPlan global_tv;  // core = whole image

  PosteriorSpec(double lambda_, double delta_, double epsilon_, Image y_, ConvOperator conv_);
  int n() const { return conv.n; }
  int d() const { return conv.n * conv.n; }
};

/// Scratch buffers for the global evaluations; one per thread.
struct GlobalWorkspace {
  PatchFrame pad;
  PatchFrame resid_pad;
  std::vector<double> ax, resid, adj, tvg;
};

double likelihood_potential(const PosteriorSpec& spec, const Image& x);

/// Exact TV, sum_a sqrt((D_a^v x)^2 + (D_a^h x)^2)  (phi_0 / delta).
double tv(const DiffOps& diff, const Image& x);

/// phi_eps(x) = delta * sum_a sqrt((D_a^v x)^2 + (D_a^h x)^2 + eps).
double smoothed_tv(const DiffOps& diff, const Image& x, double delta, double epsilon);

double log_posterior_unnorm(const PosteriorSpec& spec, const Image& x);

/// Gradient of log pi_eps: lambda A^T (y - Ax) - grad phi_eps. Requires
/// epsilon > 0 (the exact TV has no classical gradient at zero differences).
Image grad_log_posterior(const PosteriorSpec& spec, const Image& x);

/// Fused value+gradient used by the samplers; grad must have length d.
void log_posterior_and_grad(const PosteriorSpec& spec, const Image& x, GlobalWorkspace& ws,
                            double& value, double* grad);

}  // namespace tvdeblur
