#pragma once

#include <vector>

#include "tvdeblur/image.hpp"
#include "tvdeblur/samplers.hpp"

namespace tvdeblur {

/// Thinned samples of several chains over the same posterior. All chains
/// must agree on image side, thin factor, and saved-sample count.
struct ChainStore {
  std::vector<SampleChain> chains;

  explicit ChainStore(std::vector<SampleChain> cs);

  int n() const { return chains.front().n; }
  int d() const { return n() * n(); }
  long n_saved() const { return chains.front().n_saved; }
  int n_chains() const { return static_cast<int>(chains.size()); }
};

/// Per-pixel split-R-hat (each chain halved, between/within variance ratio,
/// square-rooted). Zero-variance pixels with equal means report 1.
/// Requires >= 2 chains with >= 4 samples each.
Image psrf(const ChainStore& store);

/// Per-pixel normalized effective sample size in percent: Geyer
/// initial-monotone-sequence truncation per chain, ESS averaged over chains
/// and divided by the saved-sample count. Capped at 100%; constant series
/// report 100%.
Image ness(const ChainStore& store);

struct SummaryImages {
  Image mean;
  Image std;
  Image ci_width;
};

/// Pooled per-pixel mean, standard deviation, and equal-tailed credible
/// interval width at the given level (linear interpolation between order
/// statistics).
SummaryImages summary_images(const ChainStore& store, double ci_level);

/// Convergence gate used by the pipeline: max-pixel PSRF < 1.1.
bool converged(const Image& psrf_image, double threshold = 1.1);

}  // namespace tvdeblur
