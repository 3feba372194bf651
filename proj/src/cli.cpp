#include "tvdeblur/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "tvdeblur/diagnostics.hpp"
#include "tvdeblur/dominance.hpp"
#include "tvdeblur/io.hpp"
#include "tvdeblur/map_solver.hpp"
#include "tvdeblur/phantom.hpp"
#include "tvdeblur/samplers.hpp"

namespace fs = std::filesystem;

namespace tvdeblur::cli {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("out: output directory must not be empty");
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw std::runtime_error("out: cannot create directory " + cfg.out_dir);
}

/// Ordered key/value manifest with an [outputs] checksum section. The
/// config hash covers the statistical configuration only (not worker count
/// or paths), so runs that must be bit-identical share the hash.
class Manifest {
 public:
  Manifest(const std::string& command) {
    put("tool_version", kToolVersion);
    put("command", command);
  }

  void put(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void put(const std::string& key, double value) { put(key, fmt(value)); }
  void put(const std::string& key, long value) { put(key, std::to_string(value)); }
  void put(const std::string& key, int value) { put(key, std::to_string(value)); }
  void put(const std::string& key, uint64_t value) { put(key, std::to_string(value)); }
  void put(const std::string& key, bool value) { put(key, value ? std::string("true") : std::string("false")); }

  void put_hashed(const std::string& key, const std::string& value) {
    hashed_ += key + "=" + value + "\n";
    put(key, value);
  }
  void put_hashed(const std::string& key, double value) { put_hashed(key, fmt(value)); }
  void put_hashed(const std::string& key, long value) { put_hashed(key, std::to_string(value)); }
  void put_hashed(const std::string& key, int value) { put_hashed(key, std::to_string(value)); }
  void put_hashed(const std::string& key, uint64_t value) { put_hashed(key, std::to_string(value)); }
  void put_hashed(const std::string& key, bool value) {
    put_hashed(key, value ? std::string("true") : std::string("false"));
  }

  void add_output(const std::string& dir, const std::string& name) {
    outputs_.emplace_back(name, hex64(fnv1a64_file(join_path(dir, name))));
  }

  void write(const std::string& dir) const {
    std::ostringstream ss;
    ss << "# tvdeblur run manifest\n";
    ss << "config_hash = " << hex64(fnv1a64(hashed_.data(), hashed_.size())) << "\n";
    for (const auto& [k, v] : entries_) ss << k << " = " << v << "\n";
    ss << "[outputs]\n";
    for (const auto& [k, v] : outputs_) ss << k << " = " << v << "\n";
    write_text_file(join_path(dir, "manifest.txt"), ss.str());
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::string hashed_;
};

void put_model_keys(Manifest& man, const RunConfig& cfg) {
  man.put_hashed("psf", cfg.psf);
  if (cfg.psf == "gaussian") {
    man.put_hashed("psf_radius", cfg.psf_radius);
    man.put_hashed("psf_sigma", cfg.psf_sigma);
  } else if (cfg.psf == "motion") {
    man.put_hashed("psf_length", cfg.psf_length);
    man.put_hashed("psf_angle", cfg.psf_angle);
  }
  man.put_hashed("noise_std", cfg.noise_std);
  man.put_hashed("lambda", cfg.effective_lambda());
  man.put_hashed("delta", cfg.delta);
  man.put_hashed("epsilon", cfg.epsilon);
  man.put_hashed("seed", cfg.seed);
}

Image load_truth(const RunConfig& cfg) {
  if (cfg.truth.empty()) throw ConfigError("truth: ground-truth image path is required");
  if (cfg.truth == "synthetic:shapes") {
    if (cfg.n <= 0) throw ConfigError("n: synthetic truth needs a positive image side");
    return shapes_phantom(cfg.n);
  }
  Image img = read_image_any(cfg.truth);
  if (cfg.n > 0 && img.n != cfg.n)
    throw ConfigError("n: configured side " + std::to_string(cfg.n) + " does not match image side " +
                      std::to_string(img.n));
  return img;
}

PosteriorSpec build_spec(const RunConfig& cfg, Image y) {
  const double lambda = cfg.effective_lambda();
  if (!(lambda > 0.0)) throw ConfigError("lambda: must be positive (set lambda or noise_std)");
  if (cfg.delta < 0.0) throw ConfigError("delta: must be non-negative");
  if (cfg.epsilon < 0.0) throw ConfigError("epsilon: must be non-negative");
  const int side = y.n;
  return PosteriorSpec(lambda, cfg.delta, cfg.epsilon, std::move(y), ConvOperator(cfg.build_psf(), side));
}

Image initial_state(const RunConfig& cfg, const Image& y) {
  if (cfg.init == "y") return y;
  if (cfg.init == "zero") return Image(y.n, 0.0);
  throw ConfigError("init: must be 'y' or 'zero'");
}

void write_image_pair(Manifest& man, const RunConfig& cfg, const std::string& stem, const Image& img) {
  write_f64_image(join_path(cfg.out_dir, stem + ".f64"), img);
  write_pgm(join_path(cfg.out_dir, stem + ".pgm"), img);
  man.add_output(cfg.out_dir, stem + ".f64");
  man.add_output(cfg.out_dir, stem + ".pgm");
}

}  // namespace

double RunConfig::effective_lambda() const {
  if (lambda > 0.0) return lambda;
  if (noise_std > 0.0) return 1.0 / (noise_std * noise_std);
  return 0.0;
}

Psf RunConfig::build_psf() const {
  if (psf == "gaussian") {
    if (psf_radius < 0) throw ConfigError("psf_radius: must be non-negative");
    if (!(psf_sigma > 0.0)) throw ConfigError("psf_sigma: must be positive");
    return gaussian_psf(psf_radius, psf_sigma);
  }
  if (psf == "motion") {
    if (psf_length < 1) throw ConfigError("psf_length: must be >= 1");
    return motion_psf(psf_length, psf_angle);
  }
  if (psf == "delta") return delta_psf();
  throw ConfigError("psf: must be one of gaussian, motion, delta");
}

void cmd_generate(const RunConfig& cfg) {
  Image truth = load_truth(cfg);
  if (cfg.noise_std < 0.0) throw ConfigError("noise_std: must be >= 0");
  const Psf psf = cfg.build_psf();
  const ConvOperator op(psf, truth.n);
  Image y = generate_data(op, truth, cfg.noise_std, cfg.seed);

  ensure_out_dir(cfg);
  Manifest man("generate");
  man.put_hashed("truth", cfg.truth);
  man.put_hashed("n", truth.n);
  put_model_keys(man, cfg);

  write_image_pair(man, cfg, "truth", truth);
  write_image_pair(man, cfg, "y", y);

  std::ostringstream prov;
  prov << "seed = " << cfg.seed << "\n"
       << "psf = " << cfg.psf << "\n"
       << "psf_radius = " << psf.radius << "\n"
       << "noise_std = " << fmt(cfg.noise_std) << "\n"
       << "lambda = " << fmt(cfg.effective_lambda()) << "\n";
  write_text_file(join_path(cfg.out_dir, "provenance.txt"), prov.str());
  man.add_output(cfg.out_dir, "provenance.txt");
  man.write(cfg.out_dir);
}

void cmd_sample(const RunConfig& cfg) {
  if (cfg.observation.empty()) throw ConfigError("y: observation path is required");
  Image y = read_image_any(cfg.observation);
  PosteriorSpec spec = build_spec(cfg, y);
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon: sampling requires epsilon > 0");
  if (cfg.n_chains < 1) throw ConfigError("n_chains: must be >= 1");
  if (cfg.n_saved < 1) throw ConfigError("n_saved: must be >= 1");
  if (cfg.thin < 1) throw ConfigError("thin: must be >= 1");
  if (cfg.burn_in < 0) throw ConfigError("burn_in: must be >= 0");
  if (!(cfg.tau0 > 0.0)) throw ConfigError("tau0: must be positive");
  if (cfg.workers < 1) throw ConfigError("workers: must be >= 1");
  if (!(cfg.target_accept > 0.0 && cfg.target_accept < 1.0))
    throw ConfigError("target_accept: must be in (0,1)");

  const bool blocked = cfg.sampler != "mala";
  BlockPartition part;
  if (blocked) {
    if (cfg.sampler != "mlwg" && cfg.sampler != "mlwg-parallel")
      throw ConfigError("sampler: must be one of mala, mlwg, mlwg-parallel");
    if (cfg.m <= 0) throw ConfigError("m: block side must be positive");
    if (y.n % cfg.m != 0)
      throw ConfigError("m: block side " + std::to_string(cfg.m) + " does not divide n=" +
                        std::to_string(y.n));
    const int r = spec.conv.psf.radius;
    if (cfg.m <= 2 * r)
      throw ConfigError("m: require m > 2r (m=" + std::to_string(cfg.m) +
                        ", PSF radius r=" + std::to_string(r) + ")");
    part = make_partition(y.n, cfg.m, r);
  }

  SamplerConfig scfg;
  scfg.burn_in = cfg.burn_in;
  scfg.n_saved = cfg.n_saved;
  scfg.thin = cfg.thin;
  scfg.tau0 = cfg.tau0;
  scfg.target_accept = cfg.target_accept;
  scfg.adapt = cfg.adapt;
  scfg.workers = cfg.workers;

  const Image x0 = initial_state(cfg, y);

  ensure_out_dir(cfg);
  Manifest man("sample");
  man.put_hashed("observation_hash", hex64(fnv1a64(y.data.data(), y.data.size() * sizeof(double))));
  man.put_hashed("n", y.n);
  man.put_hashed("sampler", cfg.sampler);
  if (blocked) man.put_hashed("m", cfg.m);
  put_model_keys(man, cfg);
  man.put_hashed("n_chains", cfg.n_chains);
  man.put_hashed("n_saved", cfg.n_saved);
  man.put_hashed("thin", cfg.thin);
  man.put_hashed("burn_in", cfg.burn_in);
  man.put_hashed("target_accept", cfg.target_accept);
  man.put_hashed("tau0", cfg.tau0);
  man.put_hashed("adapt", cfg.adapt);
  man.put_hashed("init", cfg.init);
  man.put("workers", cfg.workers);

  std::vector<SampleChain> chains;
  chains.reserve(cfg.n_chains);
  std::ostringstream acc_csv;
  acc_csv << "chain,block,block_row,block_col,tau,accept_rate\n";
  for (int c = 0; c < cfg.n_chains; ++c) {
    SampleChain chain;
    if (cfg.sampler == "mala")
      chain = run_mala(spec, x0, scfg, cfg.seed, static_cast<uint32_t>(c));
    else if (cfg.sampler == "mlwg")
      chain = run_mlwg_sequential(spec, part, x0, scfg, cfg.seed, static_cast<uint32_t>(c));
    else
      chain = run_mlwg_parallel(spec, part, x0, scfg, cfg.seed, static_cast<uint32_t>(c));

    char name[32];
    std::snprintf(name, sizeof(name), "chain_%03d.f64", c);
    F64Dump dump;
    dump.n = static_cast<uint32_t>(chain.n);
    dump.n_saved = static_cast<uint32_t>(chain.n_saved);
    dump.chain_id = chain.chain_id;
    dump.thin = static_cast<uint32_t>(chain.thin);
    dump.data = chain.samples;
    write_f64(join_path(cfg.out_dir, name), dump);
    man.add_output(cfg.out_dir, name);

    for (size_t bidx = 0; bidx < chain.block_stats.size(); ++bidx) {
      const auto& bs = chain.block_stats[bidx];
      const int brow = blocked ? part.block_row(static_cast<int>(bidx)) : 0;
      const int bcol = blocked ? part.block_col(static_cast<int>(bidx)) : 0;
      acc_csv << c << "," << bidx << "," << brow << "," << bcol << "," << fmt(bs.tau) << ","
              << fmt(bs.accept_rate) << "\n";
    }
    chains.push_back(std::move(chain));
  }

  write_text_file(join_path(cfg.out_dir, "acceptance.csv"), acc_csv.str());
  man.add_output(cfg.out_dir, "acceptance.csv");

  if (cfg.adapt) {
    double acc_mean = 0.0;
    for (const auto& c : chains) acc_mean += c.mean_accept;
    acc_mean /= chains.size();
    if (std::abs(acc_mean - cfg.target_accept) > 0.1)
      std::cerr << "warning: post-burn-in acceptance " << acc_mean
                << " is far from the adaptation target " << cfg.target_accept
                << "; consider a longer burn-in or a different tau0\n";
  }

  ChainStore store(std::move(chains));
  SummaryImages sum = summary_images(store, cfg.ci_level);
  write_image_pair(man, cfg, "mean", sum.mean);
  write_image_pair(man, cfg, "std", sum.std);
  write_image_pair(man, cfg, "ci_width", sum.ci_width);
  man.write(cfg.out_dir);
}

void cmd_diagnose(const RunConfig& cfg) {
  if (cfg.chain_files.empty()) throw ConfigError("chains: at least one chain dump is required");
  std::vector<SampleChain> chains;
  for (const auto& path : cfg.chain_files) {
    F64Dump dump = read_f64(path);
    SampleChain chain;
    chain.n = static_cast<int>(dump.n);
    chain.n_saved = dump.n_saved;
    chain.thin = static_cast<int>(dump.thin);
    chain.chain_id = dump.chain_id;
    chain.samples = std::move(dump.data);
    chains.push_back(std::move(chain));
  }
  for (const auto& c : chains)
    if (c.n != chains.front().n || c.n_saved != chains.front().n_saved ||
        c.thin != chains.front().thin)
      throw ConfigError("chains: incompatible dumps (n / n_saved / thin disagree)");

  ChainStore store(std::move(chains));

  // Per-block tau / acceptance, averaged from the sampling run's table.
  double mean_tau = std::nan(""), mean_alpha = std::nan("");
  if (!cfg.acceptance_csv.empty()) {
    std::istringstream in(read_text_file(cfg.acceptance_csv));
    std::string line;
    std::getline(in, line);  // header
    double tau_acc = 0.0, alpha_acc = 0.0;
    long count = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      long chain_id, block, brow, bcol;
      double tau, rate;
      if (ls >> chain_id >> block >> brow >> bcol >> tau >> rate) {
        tau_acc += tau;
        alpha_acc += rate;
        ++count;
      }
    }
    if (count > 0) {
      mean_tau = tau_acc / count;
      mean_alpha = alpha_acc / count;
    }
  }

  ensure_out_dir(cfg);
  Manifest man("diagnose");
  man.put_hashed("n_chains", store.n_chains());
  man.put_hashed("n_saved", store.n_saved());
  man.put_hashed("ci_level", cfg.ci_level);

  Image r = psrf(store);
  Image e = ness(store);
  SummaryImages sum = summary_images(store, cfg.ci_level);

  // PGM previews use fixed scales: PSRF maps [1, 1.5] to [0,1], nESS maps
  // [0, 100]% to [0,1]; the .f64 dumps carry the exact values.
  Image r_scaled(r.n), e_scaled(e.n);
  for (size_t i = 0; i < r.data.size(); ++i) r_scaled.data[i] = (r.data[i] - 1.0) / 0.5;
  for (size_t i = 0; i < e.data.size(); ++i) e_scaled.data[i] = e.data[i] / 100.0;

  write_f64_image(join_path(cfg.out_dir, "psrf.f64"), r);
  write_pgm(join_path(cfg.out_dir, "psrf.pgm"), r_scaled);
  write_f64_image(join_path(cfg.out_dir, "ness.f64"), e);
  write_pgm(join_path(cfg.out_dir, "ness.pgm"), e_scaled);
  man.add_output(cfg.out_dir, "psrf.f64");
  man.add_output(cfg.out_dir, "ness.f64");
  write_image_pair(man, cfg, "mean", sum.mean);
  write_image_pair(man, cfg, "ci_width", sum.ci_width);

  double min_ness = std::numeric_limits<double>::infinity();
  double max_psrf = 0.0;
  for (double v : e.data) min_ness = std::min(min_ness, v);
  for (double v : r.data) max_psrf = std::max(max_psrf, v);
  std::vector<double> sorted_r = r.data;
  std::sort(sorted_r.begin(), sorted_r.end());
  const double median_psrf = sorted_r[sorted_r.size() / 2];
  const bool conv = converged(r);

  std::ostringstream csv;
  csv << "min_ness_pct,tau,alpha,max_psrf,median_psrf,converged\n";
  csv << fmt(min_ness) << "," << fmt(mean_tau) << "," << fmt(mean_alpha) << "," << fmt(max_psrf)
      << "," << fmt(median_psrf) << "," << (conv ? "true" : "false") << "\n";
  write_text_file(join_path(cfg.out_dir, "summary.csv"), csv.str());
  man.add_output(cfg.out_dir, "summary.csv");
  man.write(cfg.out_dir);

  if (!conv)
    std::cerr << "warning: chains not converged (max PSRF = " << max_psrf << " >= 1.1)\n";
}

int cmd_dominance(const RunConfig& cfg) {
  if (cfg.n <= 0) throw ConfigError("n: image side is required for the dominance audit");
  if (cfg.m <= 0) throw ConfigError("m: block side must be positive");
  const Psf psf = cfg.build_psf();
  if (cfg.n % cfg.m != 0) throw ConfigError("m: block side does not divide n");
  if (cfg.m <= 2 * psf.radius)
    throw ConfigError("m: require m > 2r (PSF radius r=" + std::to_string(psf.radius) + ")");
  const BlockPartition part = make_partition(cfg.n, cfg.m, psf.radius);
  const ConvOperator op(psf, cfg.n);

  DominanceCertificate cert = dominance_check(op, part);

  double min_mii = std::numeric_limits<double>::infinity(), max_mii = 0.0, max_offsum = 0.0;
  for (int i = 0; i < cert.b; ++i) {
    min_mii = std::min(min_mii, cert.m(i, i));
    max_mii = std::max(max_mii, cert.m(i, i));
    double off = 0.0;
    for (int j = 0; j < cert.b; ++j)
      if (j != i) off += cert.m(i, j);
    max_offsum = std::max(max_offsum, off);
  }

  const double lambda = cfg.effective_lambda();
  const bool hypothesis_applicable = cert.dominant && cfg.delta > 0.0 && cfg.epsilon > 0.0;
  const double rhs = hypothesis_applicable ? 64.0 * cfg.m / (cert.c * std::sqrt(cfg.epsilon)) : 0.0;
  const bool hypothesis = hypothesis_applicable && lambda / cfg.delta >= rhs;

  ensure_out_dir(cfg);
  Manifest man("dominance");
  man.put_hashed("n", cfg.n);
  man.put_hashed("m", cfg.m);
  put_model_keys(man, cfg);

  std::ostringstream rep;
  rep << "blocks = " << cert.b << "\n"
      << "c = " << fmt(cert.c) << "\n"
      << "dominant = " << (cert.dominant ? "true" : "false") << "\n"
      << "min_Mii = " << fmt(min_mii) << "\n"
      << "max_Mii = " << fmt(max_mii) << "\n"
      << "max_offdiag_sum = " << fmt(max_offsum) << "\n"
      << "power_iterations_converged = " << (cert.all_converged ? "true" : "false") << "\n";
  if (!cert.nonconverged.empty()) {
    rep << "nonconverged_pairs =";
    for (auto [i, j] : cert.nonconverged) rep << " (" << i << "," << j << ")";
    rep << "\n";
  }
  rep << "lambda_over_delta = " << fmt(cfg.delta > 0.0 ? lambda / cfg.delta : std::nan("")) << "\n"
      << "required_64m_over_c_sqrt_eps = " << fmt(hypothesis_applicable ? rhs : std::nan(""))
      << "\n"
      << "smoothing_hypothesis_satisfied = " << (hypothesis ? "true" : "false") << "\n";
  write_text_file(join_path(cfg.out_dir, "dominance.txt"), rep.str());
  man.add_output(cfg.out_dir, "dominance.txt");
  man.write(cfg.out_dir);

  std::cout << rep.str();
  return cert.dominant ? kExitOk : kExitNonDominant;
}

void cmd_map(const RunConfig& cfg) {
  if (cfg.observation.empty()) throw ConfigError("y: observation path is required");
  Image y = read_image_any(cfg.observation);
  PosteriorSpec spec = build_spec(cfg, y);
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon: MAP estimation requires epsilon > 0");
  if (cfg.map_max_outer < 1 || cfg.map_max_cg < 1)
    throw ConfigError("map_max_outer/map_max_cg: must be >= 1");
  if (!(cfg.map_tol > 0.0)) throw ConfigError("map_tol: must be positive");

  MapResult res = solve_map(spec, initial_state(cfg, y), cfg.map_tol, cfg.map_max_outer, cfg.map_max_cg);

  ensure_out_dir(cfg);
  Manifest man("map");
  man.put_hashed("observation_hash", hex64(fnv1a64(y.data.data(), y.data.size() * sizeof(double))));
  man.put_hashed("n", y.n);
  put_model_keys(man, cfg);
  man.put_hashed("map_tol", cfg.map_tol);
  man.put("iterations", res.iterations);
  man.put("converged", res.converged);
  man.put("cg_restarts", res.cg_restarts);

  write_image_pair(man, cfg, "map", res.x_map);
  std::ostringstream csv;
  csv << "iter,objective\n";
  for (size_t i = 0; i < res.objective_trace.size(); ++i)
    csv << i << "," << fmt(res.objective_trace[i]) << "\n";
  write_text_file(join_path(cfg.out_dir, "trace.csv"), csv.str());
  man.add_output(cfg.out_dir, "trace.csv");
  man.write(cfg.out_dir);
}

namespace {

void add_common_model_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--psf", cfg.psf, "PSF kind: gaussian | motion | delta");
  sub->add_option("--psf-radius", cfg.psf_radius, "Gaussian PSF radius");
  sub->add_option("--psf-sigma", cfg.psf_sigma, "Gaussian PSF standard deviation");
  sub->add_option("--psf-length", cfg.psf_length, "Motion PSF length in pixels");
  sub->add_option("--psf-angle", cfg.psf_angle, "Motion PSF angle in degrees");
  sub->add_option("--noise-std", cfg.noise_std, "Observation noise standard deviation");
  sub->add_option("--lambda", cfg.lambda, "Noise precision (default 1/noise_std^2)");
  sub->add_option("--delta", cfg.delta, "TV prior rate");
  sub->add_option("--epsilon", cfg.epsilon, "TV smoothing parameter");
  sub->add_option("--seed", cfg.seed, "RNG seed");
  sub->add_option("--out", cfg.out_dir, "Output directory");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Bayesian TV image deblurring: local & parallel MALA-within-Gibbs sampling"};
  app.set_config("--config", "", "Flat key=value configuration file (flags override)");
  app.require_subcommand(1);

  CLI::App* gen = app.add_subcommand("generate", "Blur a ground-truth image and add noise");
  gen->add_option("--truth", cfg.truth, "Ground-truth image (.pgm/.f64) or synthetic:shapes");
  gen->add_option("--n", cfg.n, "Image side (required for synthetic truth)");
  add_common_model_flags(gen, cfg);

  CLI::App* smp = app.add_subcommand("sample", "Run a sampler on an observation");
  smp->add_option("--y", cfg.observation, "Observation image (.f64 exact or .pgm)");
  smp->add_option("--m", cfg.m, "Block side for the MLwG samplers");
  smp->add_option("--sampler", cfg.sampler, "mala | mlwg | mlwg-parallel");
  smp->add_option("--n-chains", cfg.n_chains, "Independent chains");
  smp->add_option("--n-saved", cfg.n_saved, "Saved samples per chain");
  smp->add_option("--thin", cfg.thin, "Thinning factor");
  smp->add_option("--burn-in", cfg.burn_in, "Burn-in cycles");
  smp->add_option("--target-accept", cfg.target_accept, "Adaptation target acceptance rate");
  smp->add_option("--tau0", cfg.tau0, "Initial step size");
  smp->add_flag("--adapt,!--no-adapt", cfg.adapt, "Adapt step sizes during burn-in");
  smp->add_option("--workers", cfg.workers, "Worker threads (mlwg-parallel)");
  smp->add_option("--init", cfg.init, "Initial state: y | zero");
  smp->add_option("--ci-level", cfg.ci_level, "Credible-interval level");
  add_common_model_flags(smp, cfg);

  CLI::App* dia = app.add_subcommand("diagnose", "PSRF / nESS / summary images from chain dumps");
  dia->add_option("--chains", cfg.chain_files, "Chain dump files (.f64)")->expected(-1);
  dia->add_option("--acceptance", cfg.acceptance_csv, "acceptance.csv from the sampling run");
  dia->add_option("--ci-level", cfg.ci_level, "Credible-interval level");
  dia->add_option("--out", cfg.out_dir, "Output directory");

  CLI::App* dom = app.add_subcommand("dominance", "c-diagonal block dominance audit");
  dom->add_option("--n", cfg.n, "Image side");
  dom->add_option("--m", cfg.m, "Block side");
  add_common_model_flags(dom, cfg);

  CLI::App* map_cmd = app.add_subcommand("map", "MAP estimate by majorization-minimization");
  map_cmd->add_option("--y", cfg.observation, "Observation image (.f64 exact or .pgm)");
  map_cmd->add_option("--tol", cfg.map_tol, "Relative objective-decrease stop tolerance");
  map_cmd->add_option("--max-outer", cfg.map_max_outer, "Maximum outer iterations");
  map_cmd->add_option("--max-cg", cfg.map_max_cg, "Maximum CG iterations per outer step");
  map_cmd->add_option("--init", cfg.init, "Initial state: y | zero");
  add_common_model_flags(map_cmd, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) cmd_generate(cfg);
    else if (smp->parsed()) cmd_sample(cfg);
    else if (dia->parsed()) cmd_diagnose(cfg);
    else if (dom->parsed()) return cmd_dominance(cfg);
    else if (map_cmd->parsed()) cmd_map(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace tvdeblur::cli
