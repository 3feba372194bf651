#include "tvdeblur/local_conditionals.hpp"

#include <cstring>
#include <stdexcept>

#include "tvdeblur/kernels.hpp"

namespace tvdeblur {

namespace {

void check_block_len(const Rect& core, std::span<const double> xb, const char* who) {
  if (static_cast<int>(xb.size()) != core.size())
    throw std::invalid_argument(std::string(who) + ": block length mismatch");
}

/// Embed x_block into ws.cand (core cells; everything else zero) and
/// correlate onto the +r rect: the matrix-free A_i x product.
void apply_local_forward(const LocalLikelihoodCtx& ctx, std::span<const double> x_block,
                         const PosteriorSpec& spec, LocalWorkspace& ws) {
  const int r = spec.conv.psf.radius;
  ws.cand.reset(ctx.core.grown(2 * r));
  ws.cand.load_rect(ctx.core, x_block.data());
  ws.ax.resize(ctx.pr.size());
  corr_on_rect(ws.cand, spec.conv.psf.weights, r, ctx.pr, ws.ax.data());
}

/// adj = A_i^T v for v living on the +r rect.
void apply_local_adjoint(const LocalLikelihoodCtx& ctx, const double* v,
                         const PosteriorSpec& spec, LocalWorkspace& ws) {
  const int r = spec.conv.psf.radius;
  ws.resid_frame.reset(ctx.core.grown(r));
  ws.resid_frame.load_rect(ctx.pr, v);
  ws.adj.resize(ctx.core.size());
  corr_on_rect(ws.resid_frame, spec.conv.psf.flipped, r, ctx.core, ws.adj.data());
}

}  // namespace

void build_contexts_into(const PosteriorSpec& spec, const BlockPartition& part, const Image& x,
                         int block_id, LocalLikelihoodCtx& like, LocalPriorCtx& prior,
                         LocalWorkspace& ws) {
  if (part.n != spec.n())
    throw std::invalid_argument("build_contexts: partition does not match posterior image side");
  if (x.n != spec.n()) throw std::invalid_argument("build_contexts: state side mismatch");
  if (block_id < 0 || block_id >= part.b)
    throw std::invalid_argument("build_contexts: block_id out of range");
  const int r = spec.conv.psf.radius;
  const int n = spec.n();

  like.block_id = block_id;
  like.core = part.block_rect(block_id);
  like.pr = like.core.grown(r).clipped(n);

  // Frozen surroundings: x over the +2r patch with the core zeroed out
  // (the P_i^{+rr} projection), zero beyond the image boundary.
  like.frame.reset(like.core.grown(2 * r));
  like.frame.load_image(x);
  like.frame.zero_rect(like.core);

  // y_eff = y|+r - A (P x)|+r.
  const int pr_size = like.pr.size();
  ws.ax.resize(pr_size);
  corr_on_rect(like.frame, spec.conv.psf.weights, r, like.pr, ws.ax.data());
  like.y_eff.resize(pr_size);
  for (int c = 0; c < like.pr.cols; ++c) {
    const double* ycol = &spec.y.data[spec.y.index(like.pr.r0, like.pr.c0 + c)];
    const double* axcol = ws.ax.data() + static_cast<size_t>(c) * like.pr.rows;
    double* out = like.y_eff.data() + static_cast<size_t>(c) * like.pr.rows;
    kernels::vsub(ycol, axcol, out, like.pr.rows);
  }

  prior.block_id = block_id;
  prior.plan.build(n, like.core, &x);
}

std::pair<LocalLikelihoodCtx, LocalPriorCtx> build_contexts(const PosteriorSpec& spec,
                                                            const BlockPartition& part,
                                                            const Image& x, int block_id) {
  LocalLikelihoodCtx like;
  LocalPriorCtx prior;
  LocalWorkspace ws;
  build_contexts_into(spec, part, x, block_id, like, prior, ws);
  return {std::move(like), std::move(prior)};
}

double local_like_potential(const LocalLikelihoodCtx& ctx, std::span<const double> x_block,
                            const PosteriorSpec& spec) {
  check_block_len(ctx.core, x_block, "local_like_potential");
  LocalWorkspace ws;
  apply_local_forward(ctx, x_block, spec, ws);
  const int pr_size = ctx.pr.size();
  ws.resid.resize(pr_size);
  kernels::vsub(ctx.y_eff.data(), ws.ax.data(), ws.resid.data(), pr_size);
  return 0.5 * spec.lambda * kernels::sumsq(ws.resid.data(), pr_size);
}

std::vector<double> local_like_grad(const LocalLikelihoodCtx& ctx, std::span<const double> x_block,
                                    const PosteriorSpec& spec) {
  check_block_len(ctx.core, x_block, "local_like_grad");
  LocalWorkspace ws;
  apply_local_forward(ctx, x_block, spec, ws);
  const int pr_size = ctx.pr.size();
  ws.resid.resize(pr_size);
  kernels::vsub(ctx.y_eff.data(), ws.ax.data(), ws.resid.data(), pr_size);
  apply_local_adjoint(ctx, ws.resid.data(), spec, ws);
  std::vector<double> grad(ctx.core.size());
  for (int i = 0; i < ctx.core.size(); ++i) grad[i] = -spec.lambda * ws.adj[i];
  return grad;
}

double local_prior_potential(const LocalPriorCtx& ctx, std::span<const double> x_block,
                             double delta, double epsilon) {
  check_block_len(ctx.plan.core, x_block, "local_prior_potential");
  if (epsilon < 0.0) throw std::invalid_argument("local_prior_potential: epsilon must be >= 0");
  return tv_plan_eval(ctx.plan, x_block.data(), epsilon, delta, nullptr, nullptr);
}

std::vector<double> local_prior_grad(const LocalPriorCtx& ctx, std::span<const double> x_block,
                                     double delta, double epsilon) {
  check_block_len(ctx.plan.core, x_block, "local_prior_grad");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("local_prior_grad: epsilon must be positive");
  std::vector<double> grad(ctx.plan.core.size(), 0.0);
  tv_plan_eval(ctx.plan, x_block.data(), epsilon, delta, grad.data(), nullptr);
  return grad;
}

void local_logdensity_and_grad_into(const LocalLikelihoodCtx& like, const LocalPriorCtx& prior,
                                    std::span<const double> x_block, const PosteriorSpec& spec,
                                    LocalWorkspace& ws, double& value, double* grad) {
  check_block_len(like.core, x_block, "local_logdensity_and_grad");
  const int q = like.core.size();
  apply_local_forward(like, x_block, spec, ws);
  const int pr_size = like.pr.size();
  ws.resid.resize(pr_size);
  kernels::vsub(like.y_eff.data(), ws.ax.data(), ws.resid.data(), pr_size);
  const double like_pot = 0.5 * spec.lambda * kernels::sumsq(ws.resid.data(), pr_size);
  apply_local_adjoint(like, ws.resid.data(), spec, ws);

  ws.tvg.assign(q, 0.0);
  const double prior_pot =
      tv_plan_eval(prior.plan, x_block.data(), spec.epsilon, spec.delta, ws.tvg.data(), nullptr);

  value = -(like_pot + prior_pot);
  const double lambda = spec.lambda;
  for (int i = 0; i < q; ++i) grad[i] = lambda * ws.adj[i] - ws.tvg[i];
}

std::pair<double, std::vector<double>> local_logdensity_and_grad(const LocalLikelihoodCtx& like,
                                                                 const LocalPriorCtx& prior,
                                                                 std::span<const double> x_block,
                                                                 const PosteriorSpec& spec) {
  if (!(spec.epsilon > 0.0))
    throw std::invalid_argument("local_logdensity_and_grad: epsilon must be positive");
  LocalWorkspace ws;
  std::vector<double> grad(like.core.size());
  double value;
  local_logdensity_and_grad_into(like, prior, x_block, spec, ws, value, grad.data());
  return {value, std::move(grad)};
}

double local_logdensity(const LocalLikelihoodCtx& like, const LocalPriorCtx& prior,
                        std::span<const double> x_block, const PosteriorSpec& spec) {
  const double like_pot = local_like_potential(like, x_block, spec);
  const double prior_pot = local_prior_potential(prior, x_block, spec.delta, spec.epsilon);
  return -(like_pot + prior_pot);
}

}  // namespace tvdeblur
