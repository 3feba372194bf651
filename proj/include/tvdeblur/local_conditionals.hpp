#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tvdeblur/partition.hpp"
#include "tvdeblur/potentials.hpp"

namespace tvdeblur {

/// Frozen part of the local block likelihood for one block update:
/// the effective data y_eff = y|+r - A(P x)|+r where P zeroes the core
/// block, and a staging patch holding the frozen +2r surroundings. Encodes
/// the paper-level objects A_i, y^{k,i-1}, P_i^{+rr} matrix-free; depends
/// only on pixels outside the core and must be rebuilt whenever any pixel
/// in the 2r frame changes.
struct LocalLikelihoodCtx {
  int block_id = 0;
  Rect core;        // the block
  Rect pr;          // core grown by r, clipped at the image boundary
  PatchFrame frame; // core grown by 2r (unclipped), x with core zeroed
  std::vector<double> y_eff;  // column-major over pr
};

/// Frozen part of the local block prior: the difference rows touching the
/// core with their fixed offsets b_v, b_h read from the +1 frame.
struct LocalPriorCtx {
  int block_id = 0;
  TvPlan plan;
};

/// Per-thread scratch for local evaluations.
struct LocalWorkspace {
  PatchFrame cand;
  PatchFrame resid_frame;
  std::vector<double> ax, resid, adj, tvg;
};

void build_contexts_into(const PosteriorSpec& spec, const BlockPartition& part, const Image& x,
                         int block_id, LocalLikelihoodCtx& like, LocalPriorCtx& prior,
                         LocalWorkspace& ws);

std::pair<LocalLikelihoodCtx, LocalPriorCtx> build_contexts(const PosteriorSpec& spec,
                                                            const BlockPartition& part,
                                                            const Image& x, int block_id);

/// lambda/2 ||y_eff - A_i x_block||^2.
double local_like_potential(const LocalLikelihoodCtx& ctx, std::span<const double> x_block,
                            const PosteriorSpec& spec);

/// -lambda A_i^T (y_eff - A_i x_block).
std::vector<double> local_like_grad(const LocalLikelihoodCtx& ctx, std::span<const double> x_block,
                                    const PosteriorSpec& spec);

/// delta sum_a sqrt((D_i^v x + b_v)_a^2 + (D_i^h x + b_h)_a^2 + eps) over
/// the rows touching the block.
double local_prior_potential(const LocalPriorCtx& ctx, std::span<const double> x_block,
                             double delta, double epsilon);

/// delta [D_i^vT L^-1 (D_i^v x + b_v) + D_i^hT L^-1 (D_i^h x + b_h)];
/// requires epsilon > 0.
std::vector<double> local_prior_grad(const LocalPriorCtx& ctx, std::span<const double> x_block,
                                     double delta, double epsilon);

/// Log of the full conditional pi_eps(x_i | x_{Phi_i \ i}) up to an additive
/// constant, with its gradient: value = -(l_loc + phi_loc), grad computed
/// as lambda A_i^T(y_eff - A_i x) - grad phi_loc.
void local_logdensity_and_grad_into(const LocalLikelihoodCtx& like, const LocalPriorCtx& prior,
                                    std::span<const double> x_block, const PosteriorSpec& spec,
                                    LocalWorkspace& ws, double& value, double* grad);

std::pair<double, std::vector<double>> local_logdensity_and_grad(const LocalLikelihoodCtx& like,
                                                                 const LocalPriorCtx& prior,
                                                                 std::span<const double> x_block,
                                                                 const PosteriorSpec& spec);

/// Value-only variant (no gradient), same constant convention.
double local_logdensity(const LocalLikelihoodCtx& like, const LocalPriorCtx& prior,
                        std::span<const double> x_block, const PosteriorSpec& spec);

}  // namespace tvdeblur
