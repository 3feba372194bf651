#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvdeblur/psf.hpp"

namespace tvdeblur::cli {

/// Raised for semantically invalid configuration; mapped to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exit codes: 0 ok, 1 usage, 2 validation, 3 runtime, 4 non-dominant.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitNonDominant = 4;

struct RunConfig {
  // inputs / outputs
  std::string truth;                     // generate: image path or "synthetic:shapes"
  std::string observation;               // sample / map: y path (.f64 exact or .pgm)
  std::string out_dir = "out";
  std::vector<std::string> chain_files;  // diagnose
  std::string acceptance_csv;            // diagnose: optional per-block stats

  // geometry
  int n = 0;  // required for synthetic truth and dominance
  int m = 64;

  // PSF
  std::string psf = "gaussian";  // gaussian | motion | delta
  int psf_radius = 8;
  double psf_sigma = 8.0;
  int psf_length = 17;
  double psf_angle = 45.0;

  // observation model / posterior
  double noise_std = 0.01;
  double lambda = 0.0;  // 0 -> derived as 1/noise_std^2
  double delta = 35.80;
  double epsilon = 1e-5;

  // sampling protocol
  std::string sampler = "mlwg-parallel";  // mala | mlwg | mlwg-parallel
  int n_chains = 5;
  long n_saved = 2000;
  int thin = 200;
  long burn_in = 31250;
  double target_accept = 0.547;
  double tau0 = 1e-5;
  bool adapt = true;
  uint64_t seed = 0;
  int workers = 1;
  std::string init = "y";  // y | zero
  double ci_level = 0.9;

  // MAP solver
  double map_tol = 1e-9;
  int map_max_outer = 100;
  int map_max_cg = 500;

  double effective_lambda() const;
  Psf build_psf() const;
};

void cmd_generate(const RunConfig& cfg);
void cmd_sample(const RunConfig& cfg);
void cmd_diagnose(const RunConfig& cfg);
int cmd_dominance(const RunConfig& cfg);  // kExitOk or kExitNonDominant
void cmd_map(const RunConfig& cfg);

/// Full command-line entry point (subcommands, flags, config file);
/// returns a process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace tvdeblur::cli
