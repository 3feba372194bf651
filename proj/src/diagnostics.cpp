#include "tvdeblur/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace tvdeblur {

namespace {

template <class F>
void parallel_for_pixels(int count, F&& body) {
  unsigned hw = std::thread::hardware_concurrency();
  const int threads = std::max(1, std::min<int>(hw == 0 ? 1 : static_cast<int>(hw), count / 1024));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

double mean_of(const double* v, long len) {
  double s = 0.0;
  for (long i = 0; i < len; ++i) s += v[i];
  return s / len;
}

double sample_var(const double* v, long len, double mean) {
  double s = 0.0;
  for (long i = 0; i < len; ++i) {
    const double dlt = v[i] - mean;
    s += dlt * dlt;
  }
  return s / (len - 1);
}

}  // namespace

ChainStore::ChainStore(std::vector<SampleChain> cs) : chains(std::move(cs)) {
  if (chains.empty()) throw std::invalid_argument("ChainStore: need at least one chain");
  for (const auto& c : chains) {
    if (c.n != chains.front().n || c.n_saved != chains.front().n_saved ||
        c.thin != chains.front().thin)
      throw std::invalid_argument("ChainStore: chains disagree on (n, n_saved, thin)");
    if (c.samples.size() != static_cast<size_t>(c.n_saved) * c.n * c.n)
      throw std::invalid_argument("ChainStore: sample buffer has wrong length");
  }
}

Image psrf(const ChainStore& store) {
  const int M = store.n_chains();
  const long N = store.n_saved();
  if (M < 2) throw std::invalid_argument("psrf: need >= 2 chains");
  if (N < 4) throw std::invalid_argument("psrf: need >= 4 samples per chain");
  const int d = store.d();
  const long L = N / 2;  // half length; odd N drops the middle sample
  const int S = 2 * M;   // split sequences

  Image out(store.n());
  parallel_for_pixels(d, [&](int px) {
    double means[64];
    double vars[64];
    std::vector<double> heap_means, heap_vars;
    double* mu = means;
    double* va = vars;
    if (S > 64) {
      heap_means.resize(S);
      heap_vars.resize(S);
      mu = heap_means.data();
      va = heap_vars.data();
    }
    std::vector<double> seq(L);
    int si = 0;
    for (int m = 0; m < M; ++m) {
      const double* base = store.chains[m].samples.data() + px;
      for (int half = 0; half < 2; ++half) {
        const long off = half == 0 ? 0 : N - L;
        for (long j = 0; j < L; ++j) seq[j] = base[(off + j) * static_cast<long>(d)];
        mu[si] = mean_of(seq.data(), L);
        va[si] = sample_var(seq.data(), L, mu[si]);
        ++si;
      }
    }
    double grand = 0.0;
    for (int s = 0; s < S; ++s) grand += mu[s];
    grand /= S;
    double B = 0.0, W = 0.0;
    for (int s = 0; s < S; ++s) {
      B += (mu[s] - grand) * (mu[s] - grand);
      W += va[s];
    }
    B *= static_cast<double>(L) / (S - 1);
    W /= S;
    double r;
    if (W == 0.0) {
      r = (B == 0.0) ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      const double var_plus = (L - 1.0) / L * W + B / L;
      r = std::sqrt(var_plus / W);
    }
    out.data[px] = r;
  });
  return out;
}

namespace {

/// Geyer initial-monotone-sequence integrated autocorrelation time.
/// Returns ESS in (0, N].
double ess_one_series(const double* s, long N) {
  if (N <= 1) return static_cast<double>(N);
  const double mu = mean_of(s, N);
  std::vector<double> dev(N);
  for (long i = 0; i < N; ++i) dev[i] = s[i] - mu;
  auto gamma = [&](long t) {
    double acc = 0.0;
    for (long k = 0; k + t < N; ++k) acc += dev[k] * dev[k + t];
    return acc / N;
  };
  const double g0 = gamma(0);
  if (g0 == 0.0) return static_cast<double>(N);  // constant series

  double acc = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (long k = 0; 2 * k + 1 <= N - 1; ++k) {
    double pair = gamma(2 * k) + gamma(2 * k + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    acc += pair;
    prev = pair;
  }
  double tau = 2.0 * acc / g0 - 1.0;
  if (!(tau > 0.0)) tau = 1.0;  // antithetic series: clamp instead of going negative
  return std::min(static_cast<double>(N), N / tau);
}

}  // namespace

Image ness(const ChainStore& store) {
  const int M = store.n_chains();
  const long N = store.n_saved();
  const int d = store.d();
  Image out(store.n());
  parallel_for_pixels(d, [&](int px) {
    std::vector<double> seq(N);
    double acc = 0.0;
    for (int m = 0; m < M; ++m) {
      const double* base = store.chains[m].samples.data() + px;
      for (long j = 0; j < N; ++j) seq[j] = base[j * static_cast<long>(d)];
      acc += ess_one_series(seq.data(), N);
    }
    out.data[px] = 100.0 * (acc / M) / N;
  });
  return out;
}

SummaryImages summary_images(const ChainStore& store, double ci_level) {
  if (!(ci_level > 0.0 && ci_level < 1.0))
    throw std::invalid_argument("summary_images: ci_level must be in (0,1)");
  const int M = store.n_chains();
  const long N = store.n_saved();
  const int d = store.d();
  const long S = static_cast<long>(M) * N;

  SummaryImages out{Image(store.n()), Image(store.n()), Image(store.n())};
  const double plo = (1.0 - ci_level) / 2.0;
  const double phi = (1.0 + ci_level) / 2.0;

  parallel_for_pixels(d, [&](int px) {
    std::vector<double> vals(S);
    long k = 0;
    for (int m = 0; m < M; ++m) {
      const double* base = store.chains[m].samples.data() + px;
      for (long j = 0; j < N; ++j) vals[k++] = base[j * static_cast<long>(d)];
    }
    const double mu = mean_of(vals.data(), S);
    out.mean.data[px] = mu;
    out.std.data[px] = S > 1 ? std::sqrt(sample_var(vals.data(), S, mu)) : 0.0;

    std::sort(vals.begin(), vals.end());
    auto quantile = [&](double p) {
      const double h = p * (S - 1);
      const long lo = static_cast<long>(h);
      const long hi = std::min(lo + 1, S - 1);
      const double w = h - lo;
      return vals[lo] + w * (vals[hi] - vals[lo]);
    };
    out.ci_width.data[px] = quantile(phi) - quantile(plo);
  });
  return out;
}

bool converged(const Image& psrf_image, double threshold) {
  for (double v : psrf_image.data)
    if (!(v < threshold)) return false;
  return true;
}

}  // namespace tvdeblur
