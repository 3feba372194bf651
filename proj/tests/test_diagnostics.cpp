#include <doctest.h>

#include <cmath>
#include <random>

#include "tvdeblur/diagnostics.hpp"

using namespace tvdeblur;

namespace {

// Single-pixel chains (n = 1) are enough to exercise the estimators.
SampleChain series_chain(const std::vector<double>& values, uint32_t id = 0) {
  SampleChain c;
  c.n = 1;
  c.n_saved = static_cast<long>(values.size());
  c.thin = 1;
  c.chain_id = id;
  c.samples = values;
  return c;
}

std::vector<double> ar1_series(double rho, long len, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> out(len);
  out[0] = norm(rng);  // stationary start
  const double innov = std::sqrt(1.0 - rho * rho);
  for (long i = 1; i < len; ++i) out[i] = rho * out[i - 1] + innov * norm(rng);
  return out;
}

std::vector<double> iid_series(long len, uint64_t seed, double mu = 0.0, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(mu, sd);
  std::vector<double> out(len);
  for (double& v : out) v = norm(rng);
  return out;
}

}  // namespace

TEST_CASE("psrf: identical constant chains give exactly 1") {
  const std::vector<double> flat(100, 3.25);
  ChainStore store({series_chain(flat, 0), series_chain(flat, 1)});
  CHECK(psrf(store).data[0] == 1.0);
}

TEST_CASE("psrf: identical stochastic chains sit at 1.00") {
  const auto s = iid_series(5000, 1);
  ChainStore store({series_chain(s, 0), series_chain(s, 1)});
  CHECK(std::abs(psrf(store).data[0] - 1.0) < 0.005);
}

TEST_CASE("psrf: independent chains from the same law stay below 1.01") {
  ChainStore store({series_chain(iid_series(10000, 2), 0), series_chain(iid_series(10000, 3), 1)});
  CHECK(psrf(store).data[0] < 1.01);
}

TEST_CASE("psrf diverges when between-variance dominates") {
  // Exactly constant chains at different levels: W = 0, B > 0.
  ChainStore stuck({series_chain(std::vector<double>(100, 0.0), 0),
                    series_chain(std::vector<double>(100, 1.0), 1)});
  CHECK(std::isinf(psrf(stuck).data[0]));

  // Noisy chains around different constants: R-hat grows as the within
  // noise shrinks.
  auto shifted = [](long len, uint64_t seed, double mu, double sd) {
    return series_chain(iid_series(len, seed, mu, sd));
  };
  ChainStore wide({shifted(2000, 4, 0.0, 0.1), shifted(2000, 5, 1.0, 0.1)});
  ChainStore tight({shifted(2000, 4, 0.0, 0.01), shifted(2000, 5, 1.0, 0.01)});
  const double r_wide = psrf(wide).data[0];
  const double r_tight = psrf(tight).data[0];
  CHECK(r_wide > 3.0);
  CHECK(r_tight > 5.0 * r_wide);
}

TEST_CASE("psrf and ness are invariant under common affine maps") {
  const auto a = ar1_series(0.7, 4000, 6);
  const auto b = ar1_series(0.7, 4000, 7);
  auto affine = [](std::vector<double> v) {
    for (double& x : v) x = -3.5 * x + 11.0;
    return v;
  };
  ChainStore plain({series_chain(a, 0), series_chain(b, 1)});
  ChainStore mapped({series_chain(affine(a), 0), series_chain(affine(b), 1)});
  CHECK(psrf(plain).data[0] == doctest::Approx(psrf(mapped).data[0]).epsilon(1e-10));
  CHECK(ness(plain).data[0] == doctest::Approx(ness(mapped).data[0]).epsilon(1e-10));
}

TEST_CASE("psrf input validation") {
  const auto s = iid_series(100, 8);
  CHECK_THROWS_AS(psrf(ChainStore({series_chain(s)})), std::invalid_argument);
  const std::vector<double> tiny{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(psrf(ChainStore({series_chain(tiny, 0), series_chain(tiny, 1)})),
                  std::invalid_argument);
}

TEST_CASE("ness: i.i.d. series sit near 100 percent") {
  ChainStore store({series_chain(iid_series(10000, 9))});
  CHECK(std::abs(ness(store).data[0] - 100.0) < 10.0);
}

TEST_CASE("ness matches the AR(1) closed form (1-rho)/(1+rho)") {
  for (double rho : {0.5, 0.9}) {
    double acc = 0.0;
    for (uint64_t seed = 0; seed < 3; ++seed) {
      ChainStore store({series_chain(ar1_series(rho, 10000, 100 + seed))});
      acc += ness(store).data[0];
    }
    const double expect = 100.0 * (1.0 - rho) / (1.0 + rho);
    CHECK(std::abs(acc / 3.0 - expect) < 2.0);
  }
}

TEST_CASE("ness stays positive and capped on adversarial series") {
  std::vector<double> alternating(1001);
  for (size_t i = 0; i < alternating.size(); ++i) alternating[i] = (i % 2 == 0) ? 1.0 : -1.0;
  ChainStore alt({series_chain(alternating)});
  const double v = ness(alt).data[0];
  CHECK(v > 0.0);
  CHECK(v <= 100.0);

  ChainStore flat({series_chain(std::vector<double>(500, 2.0))});
  CHECK(ness(flat).data[0] == 100.0);
}

TEST_CASE("summary images: degenerate store, uniform CI width, mean linearity") {
  const std::vector<double> rep(50, 0.4);
  ChainStore degenerate({series_chain(rep)});
  const SummaryImages s0 = summary_images(degenerate, 0.9);
  CHECK(s0.mean.data[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(s0.std.data[0] <= 1e-14);  // limited by the rounding of the mean
  CHECK(s0.ci_width.data[0] == 0.0);

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> unif(10000);
  for (double& v : unif) v = u(rng);
  ChainStore ustore({series_chain(unif)});
  CHECK(summary_images(ustore, 0.9).ci_width.data[0] == doctest::Approx(0.9).epsilon(0.025));

  const auto c1 = iid_series(400, 11, 0.2), c2 = iid_series(400, 12, 0.8);
  ChainStore both({series_chain(c1, 0), series_chain(c2, 1)});
  double m1 = 0.0, m2 = 0.0;
  for (double v : c1) m1 += v;
  for (double v : c2) m2 += v;
  m1 /= c1.size();
  m2 /= c2.size();
  CHECK(summary_images(both, 0.5).mean.data[0] == doctest::Approx(0.5 * (m1 + m2)).epsilon(1e-12));

  CHECK_THROWS_AS(summary_images(both, 1.0), std::invalid_argument);
}

TEST_CASE("convergence gate fires at PSRF 1.1") {
  Image ok(2, std::vector<double>{1.0, 1.05, 1.09, 1.0});
  Image bad(2, std::vector<double>{1.0, 1.05, 1.10, 1.0});
  CHECK(converged(ok));
  CHECK(!converged(bad));
}

TEST_CASE("ChainStore validates chain compatibility") {
  const auto a = iid_series(100, 13);
  const auto b = iid_series(101, 14);
  CHECK_THROWS_AS(ChainStore({series_chain(a, 0), series_chain(b, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(ChainStore({}), std::invalid_argument);
}
