#include "tvdeblur/potentials.hpp"

#include <cmath>
#include <stdexcept>

#include "tvdeblur/kernels.hpp"

namespace tvdeblur {

namespace {
struct Compensated {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};
}  // namespace

void TvPlan::build(int n_img, const Rect& core_rect, const Image* frame) {
  n = n_img;
  core = core_rect;
  const int count = core.size() + (core.r0 > 0 ? core.cols : 0) + (core.c0 > 0 ? core.rows : 0);
  rows = 0;
  v_add.resize(count);
  v_sub.resize(count);
  h_add.resize(count);
  h_sub.resize(count);
  b_v.resize(count);
  b_h.resize(count);

  auto fixed_value = [&](int row, int col) -> double {
    return frame ? frame->at(row, col) : 0.0;
  };

  // Rows whose difference stencil {a, below(a), right(a)} touches the core:
  // the core itself plus the one-pixel strips directly above and to the
  // left. Enumerated in ascending global (column-major) pixel order.
  const int c_begin = core.c0 > 0 ? core.c0 - 1 : core.c0;
  for (int c = c_begin; c < core.c1(); ++c) {
    const bool strip_col = (c == core.c0 - 1);
    const int r_begin = strip_col ? core.r0 : (core.r0 > 0 ? core.r0 - 1 : core.r0);
    const int r_end = core.r1();
    for (int row = r_begin; row < r_end; ++row) {
      const int i = rows++;
      const bool self_core = core.contains(row, c);
      double bv = 0.0, bh = 0.0;
      int32_t va = -1, vs = -1, ha = -1, hs = -1;

      if (row + 1 < n) {
        if (core.contains(row + 1, c))
          va = core.local_index(row + 1, c);
        else
          bv += fixed_value(row + 1, c);
      }
      if (self_core)
        vs = core.local_index(row, c);
      else
        bv -= fixed_value(row, c);

      if (c + 1 < n) {
        if (core.contains(row, c + 1))
          ha = core.local_index(row, c + 1);
        else
          bh += fixed_value(row, c + 1);
      }
      if (self_core)
        hs = vs;
      else
        bh -= fixed_value(row, c);

      v_add[i] = va;
      v_sub[i] = vs;
      h_add[i] = ha;
      h_sub[i] = hs;
      b_v[i] = bv;
      b_h[i] = bh;
    }
  }
}

double tv_plan_eval(const TvPlan& plan, const double* x_core, double eps, double delta,
                    double* grad, double* f_out) {
  Compensated acc;
  for (int i = 0; i < plan.rows; ++i) {
    double tv = plan.b_v[i];
    const int32_t va = plan.v_add[i], vs = plan.v_sub[i];
    if (va >= 0) tv += x_core[va];
    if (vs >= 0) tv -= x_core[vs];
    double th = plan.b_h[i];
    const int32_t ha = plan.h_add[i], hs = plan.h_sub[i];
    if (ha >= 0) th += x_core[ha];
    if (hs >= 0) th -= x_core[hs];
    const double s = std::sqrt(tv * tv + th * th + eps);
    acc.add(s);
    if (grad || f_out) {
      const double f = delta / s;
      if (f_out) f_out[i] = f;
      if (grad) {
        if (va >= 0) grad[va] += f * tv;
        if (vs >= 0) grad[vs] -= f * tv;
        if (ha >= 0) grad[ha] += f * th;
        if (hs >= 0) grad[hs] -= f * th;
      }
    }
  }
  return delta * acc.value();
}

void tv_plan_apply_quadratic(const TvPlan& plan, const double* f, const double* v, double* out) {
  for (int i = 0; i < plan.rows; ++i) {
    const int32_t va = plan.v_add[i], vs = plan.v_sub[i];
    const int32_t ha = plan.h_add[i], hs = plan.h_sub[i];
    double tv = 0.0;
    if (va >= 0) tv += v[va];
    if (vs >= 0) tv -= v[vs];
    double th = 0.0;
    if (ha >= 0) th += v[ha];
    if (hs >= 0) th -= v[hs];
    const double fv = f[i] * tv;
    const double fh = f[i] * th;
    if (va >= 0) out[va] += fv;
    if (vs >= 0) out[vs] -= fv;
    if (ha >= 0) out[ha] += fh;
    if (hs >= 0) out[hs] -= fh;
  }
}

PosteriorSpec::PosteriorSpec(double lambda_, double delta_, double epsilon_, Image y_,
                             ConvOperator conv_)
    : lambda(lambda_), delta(delta_), epsilon(epsilon_), y(std::move(y_)), conv(std::move(conv_)) {
  if (!(lambda > 0.0)) throw std::invalid_argument("PosteriorSpec: lambda must be positive");
  if (delta < 0.0) throw std::invalid_argument("PosteriorSpec: delta must be non-negative");
  if (epsilon < 0.0) throw std::invalid_argument("PosteriorSpec: epsilon must be non-negative");
  if (y.n != conv.n) throw std::invalid_argument("PosteriorSpec: observation side does not match operator");
  diff.n = conv.n;
  global_tv.build(conv.n, Rect{0, 0, conv.n, conv.n}, nullptr);
}

namespace {
void check_size(const PosteriorSpec& spec, const Image& x, const char* who) {
  if (x.n != spec.n()) throw std::invalid_argument(std::string(who) + ": image side mismatch");
}
}  // namespace

double likelihood_potential(const PosteriorSpec& spec, const Image& x) {
  check_size(spec, x, "likelihood_potential");
  Image ax = convolve(spec.conv, x);
  std::vector<double> resid(ax.data.size());
  kernels::vsub(spec.y.data.data(), ax.data.data(), resid.data(), static_cast<int>(resid.size()));
  return 0.5 * spec.lambda * kernels::sumsq(resid.data(), static_cast<int>(resid.size()));
}

double tv(const DiffOps& diff, const Image& x) {
  if (x.n != diff.n) throw std::invalid_argument("tv: image side mismatch");
  TvPlan plan;
  plan.build(diff.n, Rect{0, 0, diff.n, diff.n}, nullptr);
  return tv_plan_eval(plan, x.data.data(), 0.0, 1.0, nullptr, nullptr);
}

double smoothed_tv(const DiffOps& diff, const Image& x, double delta, double epsilon) {
  if (x.n != diff.n) throw std::invalid_argument("smoothed_tv: image side mismatch");
  if (epsilon < 0.0) throw std::invalid_argument("smoothed_tv: epsilon must be non-negative");
  TvPlan plan;
  plan.build(diff.n, Rect{0, 0, diff.n, diff.n}, nullptr);
  return tv_plan_eval(plan, x.data.data(), epsilon, delta, nullptr, nullptr);
}

double log_posterior_unnorm(const PosteriorSpec& spec, const Image& x) {
  check_size(spec, x, "log_posterior_unnorm");
  const double like = likelihood_potential(spec, x);
  const double prior = tv_plan_eval(spec.global_tv, x.data.data(), spec.epsilon, spec.delta, nullptr, nullptr);
  return -(like + prior);
}

void log_posterior_and_grad(const PosteriorSpec& spec, const Image& x, GlobalWorkspace& ws,
                            double& value, double* grad) {
  check_size(spec, x, "log_posterior_and_grad");
  const int n = spec.n();
  const int d = spec.d();
  const int r = spec.conv.psf.radius;
  const Rect full{0, 0, n, n};

  ws.pad.reset(full.grown(r));
  ws.pad.load_image(x);
  ws.ax.resize(d);
  corr_on_rect(ws.pad, spec.conv.psf.weights, r, full, ws.ax.data());

  ws.resid.resize(d);
  kernels::vsub(spec.y.data.data(), ws.ax.data(), ws.resid.data(), d);
  const double like = 0.5 * spec.lambda * kernels::sumsq(ws.resid.data(), d);

  ws.resid_pad.reset(full.grown(r));
  ws.resid_pad.load_rect(full, ws.resid.data());
  ws.adj.resize(d);
  corr_on_rect(ws.resid_pad, spec.conv.psf.flipped, r, full, ws.adj.data());

  ws.tvg.assign(d, 0.0);
  const double prior =
      tv_plan_eval(spec.global_tv, x.data.data(), spec.epsilon, spec.delta, ws.tvg.data(), nullptr);

  value = -(like + prior);
  const double lambda = spec.lambda;
  for (int i = 0; i < d; ++i) grad[i] = lambda * ws.adj[i] - ws.tvg[i];
}

Image grad_log_posterior(const PosteriorSpec& spec, const Image& x) {
  check_size(spec, x, "grad_log_posterior");
  if (!(spec.epsilon > 0.0))
    throw std::invalid_argument("grad_log_posterior: epsilon must be positive (smoothed posterior only)");
  GlobalWorkspace ws;
  Image g(spec.n());
  double value;
  log_posterior_and_grad(spec, x, ws, value, g.data.data());
  return g;
}

}  // namespace tvdeblur
