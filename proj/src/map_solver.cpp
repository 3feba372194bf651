#include "tvdeblur/map_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "tvdeblur/kernels.hpp"

namespace tvdeblur {

namespace {

/// H v = lambda A^T A v + delta D^T diag(1/Lambda) D v + damp v.
struct Majorizer {
  const PosteriorSpec& spec;
  const std::vector<double>& f;  // delta / Lambda per TV row
  double damp = 0.0;
  mutable PatchFrame pad, pad2;
  mutable std::vector<double> av;

  void apply(const double* v, double* out) const {
    const int n = spec.n();
    const int d = spec.d();
    const int r = spec.conv.psf.radius;
    const Rect full{0, 0, n, n};

    pad.reset(full.grown(r));
    pad.load_rect(full, v);
    av.resize(d);
    corr_on_rect(pad, spec.conv.psf.weights, r, full, av.data());
    pad2.reset(full.grown(r));
    pad2.load_rect(full, av.data());
    corr_on_rect(pad2, spec.conv.psf.flipped, r, full, out);

    const double lambda = spec.lambda;
    for (int i = 0; i < d; ++i) out[i] = lambda * out[i] + damp * v[i];
    tv_plan_apply_quadratic(spec.global_tv, f.data(), v, out);
  }
};

double inf_norm(const double* v, int len) {
  double m = 0.0;
  for (int i = 0; i < len; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

}  // namespace

MapResult solve_map(const PosteriorSpec& spec, const Image& init, double tol, int max_outer,
                    int max_cg) {
  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("solve_map: epsilon must be positive");
  if (init.n != spec.n()) throw std::invalid_argument("solve_map: init image side mismatch");
  if (max_outer < 1 || max_cg < 1)
    throw std::invalid_argument("solve_map: iteration budgets must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_map: tol must be positive");

  const int d = spec.d();
  MapResult res;
  res.x_map = init;

  // rhs = lambda A^T y (constant across outer iterations).
  std::vector<double> rhs(d);
  {
    Image aty = convolve_adjoint(spec.conv, spec.y);
    for (int i = 0; i < d; ++i) rhs[i] = spec.lambda * aty.data[i];
  }
  const double rhs_norm = std::sqrt(kernels::sumsq(rhs.data(), d));

  GlobalWorkspace gws;
  std::vector<double> grad(d);
  double neg_obj;
  log_posterior_and_grad(spec, res.x_map, gws, neg_obj, grad.data());
  double obj = -neg_obj;
  const double grad0_inf = inf_norm(grad.data(), d);
  res.objective_trace.push_back(obj);

  // Inner residual target: relative 1e-8 by default, but at least tight
  // enough that the CG residual (= majorizer gradient) does not cap the
  // stationarity level the outer loop promises.
  const double cg_stop = std::max(1e-15 * std::max(rhs_norm, 1.0),
                                  std::min(1e-8 * std::max(rhs_norm, 1e-300),
                                           0.05 * tol * (1.0 + grad0_inf)));

  std::vector<double> f(spec.global_tv.rows);
  std::vector<double> rvec(d), p(d), hp(d);

  double damp = 0.0;
  for (int outer = 0; outer < max_outer; ++outer) {
    // Freeze Lambda at the current iterate.
    tv_plan_eval(spec.global_tv, res.x_map.data.data(), spec.epsilon, spec.delta, nullptr,
                 f.data());

    Majorizer H{spec, f, damp, {}, {}, {}};

    // CG on H x = rhs, warm-started from the current iterate.
    bool breakdown = false;
    H.apply(res.x_map.data.data(), hp.data());
    for (int i = 0; i < d; ++i) rvec[i] = rhs[i] - hp[i];
    p = rvec;
    double rs = kernels::sumsq(rvec.data(), d);
    for (int it = 0; it < max_cg && std::sqrt(rs) > cg_stop; ++it) {
      H.apply(p.data(), hp.data());
      const double php = kernels::dot(p.data(), hp.data(), d);
      if (!(php > 0.0) || !std::isfinite(php)) {
        breakdown = true;
        break;
      }
      const double alpha = rs / php;
      for (int i = 0; i < d; ++i) res.x_map.data[i] += alpha * p[i];
      for (int i = 0; i < d; ++i) rvec[i] -= alpha * hp[i];
      const double rs_new = kernels::sumsq(rvec.data(), d);
      const double beta = rs_new / rs;
      rs = rs_new;
      for (int i = 0; i < d; ++i) p[i] = rvec[i] + beta * p[i];
    }
    if (breakdown) {
      // Rounding produced a non-positive curvature direction; damp the
      // diagonal and redo this outer iteration.
      damp = damp == 0.0 ? 1e-10 * std::max(1.0, spec.lambda) : 10.0 * damp;
      res.cg_restarts += 1;
      continue;
    }

    log_posterior_and_grad(spec, res.x_map, gws, neg_obj, grad.data());
    const double new_obj = -neg_obj;
    res.objective_trace.push_back(new_obj);
    res.iterations = outer + 1;
    const double decrease = obj - new_obj;
    obj = new_obj;
    // Converged once the objective has flattened AND the iterate is
    // first-order stationary relative to the starting gradient.
    if (decrease <= tol * std::max(1.0, std::abs(new_obj)) &&
        inf_norm(grad.data(), d) <= tol * (1.0 + grad0_inf)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace tvdeblur
