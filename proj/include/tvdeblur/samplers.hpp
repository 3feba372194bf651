#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "tvdeblur/local_conditionals.hpp"
#include "tvdeblur/partition.hpp"
#include "tvdeblur/potentials.hpp"
#include "tvdeblur/rng.hpp"

namespace tvdeblur {

/// Per-block (or global, for MALA) step size with diminishing Robbins-Monro
/// adaptation: log tau <- log tau + k^(-0.6) (alpha_obs - target).
struct StepSizeState {
  double tau = 1e-4;
  double target_accept = 0.547;
  long iteration = 0;
  bool adapting = true;
};

void adapt_step(StepSizeState& state, double observed_alpha);

/// Four-color schedule over the block grid by (row parity, col parity);
/// same-class blocks are never neighbors, so they can be updated
/// concurrently while their 2r frames stay frozen.
struct ColorSchedule {
  std::array<std::vector<int>, 4> classes;
};

ColorSchedule make_color_schedule(const BlockPartition& part);

struct MhDecision {
  bool accepted = false;
  double alpha = 0.0;
};

/// z = x + tau * grad_log_pi(x) + sqrt(2 tau) xi.
template <class GradFn>
std::vector<double> mala_propose(GradFn&& grad_fn, std::span<const double> x, double tau,
                                 RngStream& rng) {
  if (!(tau > 0.0)) throw std::invalid_argument("mala_propose: tau must be positive");
  std::vector<double> g = grad_fn(x);
  if (g.size() != x.size()) throw std::invalid_argument("mala_propose: gradient length mismatch");
  for (double v : g)
    if (!std::isfinite(v))
      throw std::runtime_error("mala_propose: non-finite gradient; aborting chain");
  std::vector<double> xi(x.size());
  rng.fill_normals(xi);
  std::vector<double> z(x.size());
  const double s = std::sqrt(2.0 * tau);
  for (size_t i = 0; i < x.size(); ++i) z[i] = (x[i] + tau * g[i]) + s * xi[i];
  return z;
}

/// log alpha of the MALA Metropolis-Hastings ratio:
/// [log pi(z) - log pi(x)] + [log q(x|z) - log q(z|x)] with
/// q(b|a) ∝ exp(-||b - a - tau g(a)||^2 / (4 tau)). Antisymmetric in (x, z).
template <class LogDensFn, class GradFn>
double mala_log_ratio(LogDensFn&& logdens, GradFn&& grad_fn, std::span<const double> x,
                      std::span<const double> z, double tau) {
  const double lz = logdens(z);
  if (!std::isfinite(lz)) return -std::numeric_limits<double>::infinity();
  const double lx = logdens(x);
  std::vector<double> gx = grad_fn(x);
  std::vector<double> gz = grad_fn(z);
  double fwd = 0.0, rev = 0.0;  // ||z-x-tau gx||^2, ||x-z-tau gz||^2
  for (size_t i = 0; i < x.size(); ++i) {
    const double tf = (z[i] - x[i]) - tau * gx[i];
    const double tr = (x[i] - z[i]) - tau * gz[i];
    fwd += tf * tf;
    rev += tr * tr;
  }
  return (lz - lx) + (fwd - rev) / (4.0 * tau);
}

/// Metropolis-Hastings accept/reject for the MALA kernel, in log space.
template <class LogDensFn, class GradFn>
MhDecision mh_accept(LogDensFn&& logdens, GradFn&& grad_fn, std::span<const double> x,
                     std::span<const double> z, double tau, RngStream& rng) {
  if (!(tau > 0.0)) throw std::invalid_argument("mh_accept: tau must be positive");
  const double log_alpha = mala_log_ratio(logdens, grad_fn, x, z, tau);
  const double u = rng.uniform01();
  MhDecision out;
  out.accepted = std::log(u) < log_alpha;
  out.alpha = std::isfinite(log_alpha) ? std::min(1.0, std::exp(log_alpha)) : 0.0;
  return out;
}

struct SamplerConfig {
  long burn_in = 0;
  long n_saved = 1;
  int thin = 1;
  double tau0 = 1e-4;
  double target_accept = 0.547;
  bool adapt = true;  // step-size adaptation during burn-in
  int workers = 1;    // mlwg-parallel only
};

struct BlockStats {
  double tau = 0.0;          // final step size
  double accept_rate = 0.0;  // post-burn-in acceptance fraction
  long accepted = 0;
  long proposals = 0;
};

/// One chain's thinned post-burn-in states plus per-block statistics.
struct SampleChain {
  int n = 0;
  long n_saved = 0;
  int thin = 1;
  uint32_t chain_id = 0;
  std::vector<double> samples;  // n_saved x d, sample-major
  std::vector<BlockStats> block_stats;
  double mean_accept = 0.0;

  std::span<const double> sample(long j) const {
    const size_t dd = static_cast<size_t>(n) * n;
    return {samples.data() + static_cast<size_t>(j) * dd, dd};
  }
};

struct UpdateOutcome {
  bool accepted = false;
  double log_alpha = 0.0;
};

/// Scratch for one MLwG block update (one per worker thread).
struct MlwgWorkspace {
  LocalLikelihoodCtx like;
  LocalPriorCtx prior;
  LocalWorkspace loc;
  std::vector<double> xb, zb, grad0, grad1, xi, tmp;
};

/// One MALA-within-Gibbs block update (Algorithm level): build contexts from
/// the current state, propose on the local conditional, accept/reject, and
/// write the block back on acceptance. Draws come from the stream keyed by
/// (seed, chain, block, cycle); exactly q normals + 1 uniform are consumed.
UpdateOutcome mlwg_update_block(const PosteriorSpec& spec, const BlockPartition& part, Image& x,
                                int block_id, uint32_t cycle, uint64_t seed, uint32_t chain_id,
                                double tau, MlwgWorkspace& ws);

/// Global MALA chain on log pi_eps.
SampleChain run_mala(const PosteriorSpec& spec, const Image& init, const SamplerConfig& cfg,
                     uint64_t seed, uint32_t chain_id);

/// Blocked MALA-within-Gibbs, ascending block order within each cycle.
SampleChain run_mlwg_sequential(const PosteriorSpec& spec, const BlockPartition& part,
                                const Image& init, const SamplerConfig& cfg, uint64_t seed,
                                uint32_t chain_id);

/// Local & parallel MLwG: four chromatic phases per cycle, blocks within a
/// phase updated concurrently by cfg.workers threads. Bit-identical to
/// itself for any worker count (per-block counter-based streams).
SampleChain run_mlwg_parallel(const PosteriorSpec& spec, const BlockPartition& part,
                              const Image& init, const SamplerConfig& cfg, uint64_t seed,
                              uint32_t chain_id);

}  // namespace tvdeblur
