// Acceptance suite: one test case per shipping criterion, each printing a
// PASS/FAIL line. The regression protocol mirrors the sampling study at
// desk scale: 32x32 blocks, Gaussian PSF (radius 4, sigma 4), noise 0.01,
// sections 64^2 / 128^2 / 192^2 cropped from one 192^2 ground truth.

#include <doctest.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <future>
#include <random>

#include "tvdeblur/cli.hpp"
#include "tvdeblur/diagnostics.hpp"
#include "tvdeblur/dominance.hpp"
#include "tvdeblur/io.hpp"
#include "tvdeblur/local_conditionals.hpp"
#include "tvdeblur/map_solver.hpp"
#include "tvdeblur/phantom.hpp"
#include "tvdeblur/samplers.hpp"

using namespace tvdeblur;
namespace fs = std::filesystem;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[criterion %2d] %s - %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

Image crop(const Image& src, int n) {
  Image out(n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) out.at(r, c) = src.at(r, c);
  return out;
}

/// Observation-plus-noise start; the noise puts the TV term at its
/// stationary roughness scale so fixed-step runs are not trapped by an
/// overly smooth initial state.
Image rough_init(const Image& y, double amp, uint64_t seed, uint32_t chain) {
  Image x = y;
  RngStream s(StreamId{seed, chain, stream_purpose::init_state, 0, 0});
  std::vector<double> xi(x.data.size());
  s.fill_normals(xi);
  for (size_t i = 0; i < x.data.size(); ++i) x.data[i] += amp * xi[i];
  return x;
}

// ---- shared desk-scale protocol ------------------------------------------

struct Protocol {
  double lambda = 1e4;  // noise_std = 0.01
  double delta = 10.0;
  double eps = 1e-5;
  Psf psf = gaussian_psf(4, 4.0);
  int block = 32;
  Image truth = shapes_phantom(192);

  PosteriorSpec spec(int n) const {
    const ConvOperator op(psf, n);
    Image y = generate_data(op, crop(truth, n), 0.01, 1000 + n);
    return PosteriorSpec(lambda, delta, eps, std::move(y), op);
  }
};

const Protocol& protocol() {
  static const Protocol p;
  return p;
}

/// Four chains of the section sampler (two at a time; two cores).
std::vector<SampleChain> run_four_chains(const PosteriorSpec& spec, const BlockPartition& part,
                                         const SamplerConfig& cfg, uint64_t seed) {
  std::vector<SampleChain> chains(4);
  for (int pair = 0; pair < 2; ++pair) {
    const uint32_t a = 2 * pair, b = 2 * pair + 1;
    auto fa = std::async(std::launch::async, [&, a] {
      return run_mlwg_parallel(spec, part, rough_init(spec.y, 0.05, seed + 17, a), cfg, seed, a);
    });
    chains[b] = run_mlwg_parallel(spec, part, rough_init(spec.y, 0.05, seed + 17, b), cfg, seed, b);
    chains[a] = fa.get();
  }
  return chains;
}

/// Chains for criteria 2 and 3 (also reused as the MLwG side of the nESS
/// comparison); built once.
struct SectionChains {
  std::array<double, 3> max_psrf{};
  double min_ness_128 = 0.0;
  double mlwg_mean_tau_128 = 0.0;
  long budget_cycles = 0;
};

const SectionChains& section_chains() {
  static const SectionChains data = [] {
    SectionChains out;
    const Protocol& p = protocol();
    SamplerConfig cfg;
    cfg.burn_in = 800;  // fixed per block, not per image
    cfg.n_saved = 500;
    cfg.thin = 20;
    cfg.tau0 = 1e-5;
    cfg.adapt = true;
    cfg.workers = 1;
    out.budget_cycles = cfg.burn_in + cfg.n_saved * cfg.thin;
    const std::array<int, 3> sizes{64, 128, 192};
    for (size_t k = 0; k < sizes.size(); ++k) {
      const int n = sizes[k];
      const PosteriorSpec spec = p.spec(n);
      const BlockPartition part = make_partition(n, p.block, p.psf.radius);
      ChainStore store(run_four_chains(spec, part, cfg, 321));
      const Image r = psrf(store);
      double maxr = 0.0;
      for (double v : r.data) maxr = std::max(maxr, v);
      out.max_psrf[k] = maxr;
      if (n == 128) {
        const Image e = ness(store);
        double mn = std::numeric_limits<double>::infinity();
        for (double v : e.data) mn = std::min(mn, v);
        out.min_ness_128 = mn;
        double tau = 0.0;
        for (const auto& c : store.chains)
          for (const auto& bs : c.block_stats) tau += bs.tau;
        out.mlwg_mean_tau_128 = tau / (store.n_chains() * part.b);
      }
    }
    return out;
  }();
  return data;
}

}  // namespace

TEST_CASE("criterion 1: dimension-independent block acceptance at fixed tau") {
  const auto t0 = std::chrono::steady_clock::now();
  const Protocol& p = protocol();

  // Pilot on the 192^2 section: per-block adaptation targeting 0.547, then
  // the fixed step is the mean over all block step sizes.
  double tau_fixed = 0.0;
  {
    const PosteriorSpec spec = p.spec(192);
    const BlockPartition part = make_partition(192, p.block, p.psf.radius);
    SamplerConfig cfg{1500, 1, 1, 1e-5, 0.547, true, 2};
    const SampleChain pilot =
        run_mlwg_parallel(spec, part, rough_init(spec.y, 0.05, 7017, 0), cfg, 77, 0);
    for (const auto& bs : pilot.block_stats) tau_fixed += bs.tau;
    tau_fixed /= part.b;
  }

  std::array<double, 3> means{};
  const std::array<int, 3> sizes{64, 128, 192};
  for (size_t k = 0; k < sizes.size(); ++k) {
    const int n = sizes[k];
    const PosteriorSpec spec = p.spec(n);
    const BlockPartition part = make_partition(n, p.block, p.psf.radius);
    SamplerConfig cfg{300, 1500, 1, tau_fixed, 0.547, false, 2};
    const SampleChain run =
        run_mlwg_parallel(spec, part, rough_init(spec.y, 0.05, 7017 + n, 0), cfg, 99, 0);
    double acc = 0.0;
    for (const auto& bs : run.block_stats) acc += bs.accept_rate;
    means[k] = acc / part.b;
  }
  const double spread = *std::max_element(means.begin(), means.end()) -
                        *std::min_element(means.begin(), means.end());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = spread < 0.05;
  CHECK(pass);
  report(1, pass,
         fmt("mean acceptance %.3f / %.3f / %.3f at 64/128/192, spread %.4f < 0.05 "
             "(tau=%.3g, %.0fs)",
             means[0], means[1], means[2], spread, tau_fixed, secs));
}

TEST_CASE("criterion 2: dimension-independent burn-in (max PSRF < 1.1 at fixed budget)") {
  const SectionChains& sc = section_chains();
  const bool pass = sc.max_psrf[0] < 1.1 && sc.max_psrf[1] < 1.1 && sc.max_psrf[2] < 1.1;
  CHECK(pass);
  report(2, pass,
         fmt("max PSRF %.3f / %.3f / %.3f at 64/128/192 with burn-in 800 cycles, "
             "4 chains x 500 saved, thin 20",
             sc.max_psrf[0], sc.max_psrf[1], sc.max_psrf[2]));
}

TEST_CASE("criterion 3: MLwG beats MALA in min nESS at matched budget (128^2)") {
  const SectionChains& sc = section_chains();
  const Protocol& p = protocol();

  const PosteriorSpec spec = p.spec(128);
  SamplerConfig cfg;
  cfg.burn_in = 800;
  cfg.n_saved = 500;
  cfg.thin = 20;
  cfg.tau0 = 1e-6;
  cfg.adapt = true;
  std::vector<SampleChain> chains(4);
  for (int pair = 0; pair < 2; ++pair) {
    const uint32_t a = 2 * pair, b = 2 * pair + 1;
    auto fa = std::async(std::launch::async, [&, a] {
      return run_mala(spec, rough_init(spec.y, 0.05, 900, a), cfg, 555, a);
    });
    chains[b] = run_mala(spec, rough_init(spec.y, 0.05, 900, b), cfg, 555, b);
    chains[a] = fa.get();
  }
  double mala_tau = 0.0;
  for (const auto& c : chains) mala_tau += c.block_stats[0].tau;
  mala_tau /= 4.0;
  ChainStore store(std::move(chains));
  const Image e = ness(store);
  double mala_min_ness = std::numeric_limits<double>::infinity();
  for (double v : e.data) mala_min_ness = std::min(mala_min_ness, v);

  const bool pass = sc.min_ness_128 >= 2.0 * mala_min_ness && mala_tau < sc.mlwg_mean_tau_128;
  CHECK(pass);
  report(3, pass,
         fmt("min nESS: MLwG %.2f%% vs MALA %.2f%% (>=2x); tau: MALA %.3g < MLwG %.3g",
             sc.min_ness_128, mala_min_ness, mala_tau, sc.mlwg_mean_tau_128));
}

TEST_CASE("criterion 4: conjugate-Gaussian oracle for both samplers") {
  const int n = 8;
  const double lambda = 100.0;  // posterior = N(y, I/lambda)
  const double sigma = 1.0 / std::sqrt(lambda);
  std::mt19937_64 rng(404);
  Image y(n);
  for (double& v : y.data) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  PosteriorSpec spec(lambda, 0.0, 1e-5, y, ConvOperator(delta_psf(), n));
  const BlockPartition part = make_partition(n, 4, 0);

  SamplerConfig cfg;
  cfg.burn_in = 2000;
  cfg.n_saved = 20000;
  cfg.thin = 1;
  cfg.tau0 = 1e-2;
  cfg.adapt = true;

  bool pass = true;
  double worst_mean_se = 0.0, worst_var_rel = 0.0;
  for (int which = 0; which < 2; ++which) {
    SampleChain chain = which == 0 ? run_mala(spec, y, cfg, 41, 0)
                                   : run_mlwg_parallel(spec, part, y, cfg, 42, 0);
    ChainStore store({std::move(chain)});
    const SummaryImages sum = summary_images(store, 0.9);
    const Image e = ness(store);
    for (int i = 0; i < n * n; ++i) {
      const double ess = std::max(e.data[i] / 100.0 * cfg.n_saved, 8.0);
      const double se = sigma / std::sqrt(ess);
      const double dev = std::abs(sum.mean.data[i] - y.data[i]) / se;
      worst_mean_se = std::max(worst_mean_se, dev);
      const double var_rel = std::abs(sum.std.data[i] * sum.std.data[i] - sigma * sigma) /
                             (sigma * sigma);
      worst_var_rel = std::max(worst_var_rel, var_rel);
      pass = pass && dev < 3.0 && var_rel < 0.15;
    }
  }
  CHECK(pass);
  report(4, pass,
         fmt("20000 draws: worst |mean error| %.2f SE (< 3), worst variance error %.1f%% (< 15%%)",
             worst_mean_se, 100.0 * worst_var_rel));
}

TEST_CASE("criterion 5: local-global conditional equivalence to 1e-10") {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = (rng() % 2 == 0) ? 8 : 16;
    const int m = (rng() % 2 == 0) ? 2 : 4;
    const int r = (m > 2) ? static_cast<int>(rng() % 2) : 0;
    const double lambda = std::uniform_real_distribution<double>(0.5, 20.0)(rng);
    const double delta = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
    const double eps = std::pow(10.0, std::uniform_real_distribution<double>(-6, -2)(rng));
    const Psf psf = r == 0 ? delta_psf() : gaussian_psf(1, 0.9);
    const ConvOperator op(psf, n);
    Image y(n), x(n);
    for (double& v : y.data) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (double& v : x.data) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    PosteriorSpec spec(lambda, delta, eps, y, op);
    const BlockPartition part = make_partition(n, m, r);
    const int id = static_cast<int>(rng() % part.b);
    auto [like, prior] = build_contexts(spec, part, x, id);
    const Rect core = part.block_rect(id);
    std::vector<double> xb, zb;
    for (int c = core.c0; c < core.c1(); ++c)
      for (int rr = core.r0; rr < core.r1(); ++rr) xb.push_back(x.at(rr, c));
    zb = xb;
    for (double& v : zb) v += std::uniform_real_distribution<double>(-0.3, 0.3)(rng);

    const double local_diff =
        local_logdensity(like, prior, zb, spec) - local_logdensity(like, prior, xb, spec);
    Image xz = x;
    int k = 0;
    for (int c = core.c0; c < core.c1(); ++c)
      for (int rr = core.r0; rr < core.r1(); ++rr) xz.at(rr, c) = zb[k++];
    const double global_diff = log_posterior_unnorm(spec, xz) - log_posterior_unnorm(spec, x);
    worst = std::max(worst, std::abs(local_diff - global_diff));
  }
  const bool pass = worst < 1e-10;
  CHECK(pass);
  report(5, pass, fmt("200 random (state, block, candidate) triples: worst |delta| = %.2e < 1e-10",
                      worst));
}

TEST_CASE("criterion 6: analytic gradients vs central finite differences") {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  auto fd_rel = [](auto&& f, std::vector<double> x, const std::vector<double>& g) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double x0 = x[i];
      x[i] = x0 + 1e-5;
      const double fp = f(x);
      x[i] = x0 - 1e-5;
      const double fm = f(x);
      x[i] = x0;
      const double fd = (fp - fm) / 2e-5;
      num += (g[i] - fd) * (g[i] - fd);
      den += fd * fd;
    }
    return std::sqrt(num / std::max(den, 1e-300));
  };

  for (int trial = 0; trial < 50; ++trial) {
    const int n = (trial % 3 == 0) ? 4 : ((trial % 3 == 1) ? 8 : 16);
    const int m = n / 2 >= 4 ? 4 : 2;
    const int r = (m > 2) ? 1 : 0;
    const double lambda = std::uniform_real_distribution<double>(0.5, 8.0)(rng);
    const double delta = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const double eps = std::pow(10.0, std::uniform_real_distribution<double>(-4, -1)(rng));
    const Psf psf = r == 0 ? delta_psf() : gaussian_psf(1, 0.9);
    Image y(n), x(n);
    for (double& v : y.data) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (double& v : x.data) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    PosteriorSpec spec(lambda, delta, eps, y, ConvOperator(psf, n));

    // Global gradient of log pi_eps.
    const Image g = grad_log_posterior(spec, x);
    worst = std::max(worst, fd_rel(
                                [&](const std::vector<double>& v) {
                                  return log_posterior_unnorm(spec, Image(n, v));
                                },
                                x.data, g.data));

    // Local likelihood and prior gradients at a random block.
    const BlockPartition part = make_partition(n, m, r);
    const int id = static_cast<int>(rng() % part.b);
    auto [like, prior] = build_contexts(spec, part, x, id);
    const Rect core = part.block_rect(id);
    std::vector<double> xb;
    for (int c = core.c0; c < core.c1(); ++c)
      for (int rr = core.r0; rr < core.r1(); ++rr) xb.push_back(x.at(rr, c));
    worst = std::max(worst, fd_rel(
                                [&](const std::vector<double>& v) {
                                  return local_like_potential(like, v, spec);
                                },
                                xb, local_like_grad(like, xb, spec)));
    worst = std::max(worst,
                     fd_rel(
                         [&](const std::vector<double>& v) {
                           return local_prior_potential(prior, v, spec.delta, spec.epsilon);
                         },
                         xb, local_prior_grad(prior, xb, spec.delta, spec.epsilon)));
  }
  const bool pass = worst < 1e-6;
  CHECK(pass);
  report(6, pass, fmt("50 instances (global + local like/prior): worst rel. err %.2e < 1e-6", worst));
}

TEST_CASE("criterion 7: smoothing error bound, global and per term") {
  std::mt19937_64 rng(707);
  bool pass = true;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 25);
    const double delta = std::uniform_real_distribution<double>(0.1, 40.0)(rng);
    const double eps = std::pow(10.0, std::uniform_real_distribution<double>(-8, -2)(rng));
    Image x(n);
    for (double& v : x.data) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    const DiffOps diff{n};
    const double gap = smoothed_tv(diff, x, delta, eps) - delta * tv(diff, x);
    const double bound = delta * n * n * std::sqrt(eps);
    pass = pass && gap >= 0.0 && gap <= bound;
    worst_ratio = std::max(worst_ratio, gap / bound);

    // Per-difference-term bound, checked against an independent row
    // enumeration of the zero-boundary difference stencils.
    const double sq = std::sqrt(eps);
    for (int c = 0; c < n && pass; ++c)
      for (int r = 0; r < n; ++r) {
        const double dv = (r + 1 < n ? x.at(r + 1, c) : 0.0) - x.at(r, c);
        const double dh = (c + 1 < n ? x.at(r, c + 1) : 0.0) - x.at(r, c);
        const double a = dv * dv + dh * dh;
        const double term_gap = std::sqrt(a + eps) - std::sqrt(a);
        if (!(term_gap >= 0.0 && term_gap <= sq)) {
          pass = false;
          break;
        }
      }
  }
  CHECK(pass);
  report(7, pass, fmt("100 random images: 0 <= phi_eps - phi_0 <= delta*d*sqrt(eps) "
                      "(worst ratio %.3f), per-term gap <= delta*sqrt(eps)",
                      worst_ratio));
}

TEST_CASE("criterion 8: dominance certificate (trivial delta case + dense match)") {
  // Delta PSF: A^T A = I, so M = I and c = 1.
  const DominanceCertificate triv =
      dominance_check(ConvOperator(delta_psf(), 8), make_partition(8, 2, 0));
  bool pass = std::abs(triv.c - 1.0) <= 1e-12 && triv.dominant && triv.all_converged;

  // n = 16 with a 3x3 box kernel: matrix-free M against the dense blocks.
  const int n = 16, m = 4;
  const Psf box = make_psf(1, std::vector<double>(9, 1.0 / 9.0));
  const BlockPartition part = make_partition(n, m, box.radius);
  const DominanceCertificate cert = dominance_check(ConvOperator(box, n), part);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      for (int nu = -1; nu <= 1; ++nu)
        for (int mu = -1; mu <= 1; ++mu) {
          const int rr = r + mu, cc = c + nu;
          if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
          A(c * n + r, cc * n + rr) += box.w(mu, nu);
        }
  const Eigen::MatrixXd C = A.transpose() * A;
  auto block_indices = [&](int id) {
    std::vector<int> idx;
    const Rect rect = part.block_rect(id);
    for (int c = rect.c0; c < rect.c1(); ++c)
      for (int r = rect.r0; r < rect.r1(); ++r) idx.push_back(c * n + r);
    return idx;
  };
  double worst = 0.0;
  for (int i = 0; i < part.b; ++i) {
    const auto bi = block_indices(i);
    for (int j = 0; j < part.b; ++j) {
      const auto bj = block_indices(j);
      Eigen::MatrixXd sub(bi.size(), bj.size());
      for (size_t a = 0; a < bi.size(); ++a)
        for (size_t b2 = 0; b2 < bj.size(); ++b2) sub(a, b2) = C(bi[a], bj[b2]);
      double dense;
      if (i == j) {
        dense = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub).eigenvalues().minCoeff();
      } else {
        dense = sub.jacobiSvd().singularValues()(0);
      }
      worst = std::max(worst, std::abs(cert.m(i, j) - dense));
    }
  }
  pass = pass && worst < 1e-6 && cert.all_converged;
  CHECK(pass);
  report(8, pass, fmt("delta PSF c = %.15f; n=16 box kernel: max |M - dense| = %.2e < 1e-6",
                      triv.c, worst));
}

TEST_CASE("criterion 9: bit-identical sample dumps for workers 1, 2, 8") {
  const fs::path base = fs::temp_directory_path() / "tvdeblur_acceptance_c9";
  fs::remove_all(base);
  fs::create_directories(base);

  // A small observation via the CLI pipeline, then three sampling runs.
  cli::RunConfig gen;
  gen.truth = "synthetic:shapes";
  gen.n = 16;
  gen.psf = "gaussian";
  gen.psf_radius = 1;
  gen.psf_sigma = 1.0;
  gen.noise_std = 0.01;
  gen.seed = 5;
  gen.out_dir = (base / "gen").string();
  cli::cmd_generate(gen);

  std::array<uint64_t, 3> hashes0{}, hashes1{};
  const std::array<int, 3> workers{1, 2, 8};
  for (size_t k = 0; k < workers.size(); ++k) {
    cli::RunConfig smp;
    smp.observation = (base / "gen" / "y.f64").string();
    smp.m = 4;
    smp.psf = "gaussian";
    smp.psf_radius = 1;
    smp.psf_sigma = 1.0;
    smp.noise_std = 0.01;
    smp.delta = 2.0;
    smp.epsilon = 1e-3;
    smp.sampler = "mlwg-parallel";
    smp.workers = workers[k];
    smp.n_chains = 2;
    smp.n_saved = 25;
    smp.thin = 2;
    smp.burn_in = 40;
    smp.tau0 = 1e-4;
    smp.seed = 11;
    smp.out_dir = (base / ("w" + std::to_string(workers[k]))).string();
    cli::cmd_sample(smp);
    hashes0[k] = fnv1a64_file(smp.out_dir + "/chain_000.f64");
    hashes1[k] = fnv1a64_file(smp.out_dir + "/chain_001.f64");
  }
  const bool pass = hashes0[0] == hashes0[1] && hashes0[0] == hashes0[2] &&
                    hashes1[0] == hashes1[1] && hashes1[0] == hashes1[2];
  CHECK(pass);
  report(9, pass, fmt("chain dumps identical across workers {1,2,8}: %s / %s",
                      hex64(hashes0[0]).c_str(), hex64(hashes1[0]).c_str()));
  fs::remove_all(base);
}

TEST_CASE("criterion 10: diagnostics against synthetic oracles") {
  bool pass = true;
  std::string detail;

  // nESS on AR(1) chains vs (1-rho)/(1+rho).
  for (double rho : {0.5, 0.9}) {
    double acc = 0.0;
    for (uint64_t seed = 0; seed < 3; ++seed) {
      std::mt19937_64 rng(800 + seed);
      std::normal_distribution<double> norm(0.0, 1.0);
      SampleChain c;
      c.n = 1;
      c.n_saved = 10000;
      c.thin = 1;
      c.samples.resize(10000);
      c.samples[0] = norm(rng);
      const double innov = std::sqrt(1.0 - rho * rho);
      for (long i = 1; i < 10000; ++i) c.samples[i] = rho * c.samples[i - 1] + innov * norm(rng);
      acc += ness(ChainStore({std::move(c)})).data[0];
    }
    const double got = acc / 3.0;
    const double expect = 100.0 * (1.0 - rho) / (1.0 + rho);
    pass = pass && std::abs(got - expect) < 2.0;
    detail += fmt("nESS(rho=%.1f) %.2f%% vs %.2f%%; ", rho, got, expect);
  }

  // Identical chains: PSRF prints as 1.00.
  {
    std::mt19937_64 rng(900);
    std::normal_distribution<double> norm(0.0, 1.0);
    SampleChain a;
    a.n = 1;
    a.n_saved = 5000;
    a.thin = 1;
    a.samples.resize(5000);
    for (double& v : a.samples) v = norm(rng);
    SampleChain b = a;
    b.chain_id = 1;
    const double r = psrf(ChainStore({std::move(a), std::move(b)})).data[0];
    pass = pass && std::abs(r - 1.0) < 0.005;
    detail += fmt("PSRF(identical) %.4f; ", r);
  }

  // Uniform(0,1) samples: 90% CI width near 0.9.
  {
    std::mt19937_64 rng(901);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SampleChain c;
    c.n = 1;
    c.n_saved = 10000;
    c.thin = 1;
    c.samples.resize(10000);
    for (double& v : c.samples) v = u(rng);
    const double w = summary_images(ChainStore({std::move(c)}), 0.9).ci_width.data[0];
    pass = pass && std::abs(w - 0.9) < 0.02;
    detail += fmt("CI90 width %.4f", w);
  }
  CHECK(pass);
  report(10, pass, detail);
}

TEST_CASE("criterion 11: MAP descent and dense least-squares match") {
  bool pass = true;

  // Monotone objective on the TV phantom instance.
  {
    const int n = 24;
    const Image truth = shapes_phantom(n);
    const ConvOperator op(gaussian_psf(2, 1.5), n);
    const Image y = generate_data(op, truth, 0.01, 5);
    PosteriorSpec spec(1e4, 8.0, 1e-4, y, op);
    const MapResult res = solve_map(spec, y, 1e-10, 150, 400);
    for (size_t i = 1; i < res.objective_trace.size(); ++i)
      pass = pass && res.objective_trace[i] <=
                         res.objective_trace[i - 1] + 1e-12 * std::abs(res.objective_trace[i - 1]);
  }

  // delta = 0: matches the dense normal-equations solve to 1e-8.
  double err = 0.0;
  {
    std::mt19937_64 rng(111);
    const int n = 8;
    const Psf psf = gaussian_psf(2, 1.0);
    Image y(n);
    for (double& v : y.data) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    PosteriorSpec spec(200.0, 0.0, 1e-5, y, ConvOperator(psf, n));
    const MapResult res = solve_map(spec, Image(n, 0.0), 1e-14, 60, 2000);
    pass = pass && res.objective_trace.size() >= 2;
    for (size_t i = 1; i < res.objective_trace.size(); ++i)
      pass = pass && res.objective_trace[i] <=
                         res.objective_trace[i - 1] + 1e-12 * std::abs(res.objective_trace[i - 1]);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r)
        for (int nu = -2; nu <= 2; ++nu)
          for (int mu = -2; mu <= 2; ++mu) {
            const int rr = r + mu, cc = c + nu;
            if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
            A(c * n + r, cc * n + rr) += psf.w(mu, nu);
          }
    Eigen::VectorXd yv(n * n);
    for (int i = 0; i < n * n; ++i) yv[i] = y.data[i];
    const Eigen::VectorXd dense = (A.transpose() * A).ldlt().solve(A.transpose() * yv);
    for (int i = 0; i < n * n; ++i) err = std::max(err, std::abs(res.x_map.data[i] - dense[i]));
    pass = pass && err < 1e-8;
  }
  CHECK(pass);
  report(11, pass, fmt("objective traces non-increasing; delta=0 max |x - dense| = %.2e < 1e-8",
                       err));
}
