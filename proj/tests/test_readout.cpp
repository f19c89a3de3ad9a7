#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "relsim/readout.hpp"

using namespace relsim;

namespace {

double mean_counts(const std::vector<std::int64_t>& hist, std::int64_t trials) {
  double sum = 0.0;
  for (std::size_t k = 0; k < hist.size(); ++k)
    sum += static_cast<double>(k) * static_cast<double>(hist[k]);
  return sum / static_cast<double>(trials);
}

double sd_counts(const std::vector<std::int64_t>& hist, std::int64_t trials) {
  const double mu = mean_counts(hist, trials);
  double ss = 0.0;
  for (std::size_t k = 0; k < hist.size(); ++k)
    ss += (k - mu) * (k - mu) * static_cast<double>(hist[k]);
  return std::sqrt(ss / static_cast<double>(trials));
}

ReadoutConfig no_relight_budget(double p_auger) {
  ReadoutConfig cfg = budget_preset();
  cfg.rates.p_auger = p_auger;
  cfg.rates.t1_ns = 1e15;  // shelved donors stay dark
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("readout");

TEST_CASE("per-trial results are deterministic") {
  const ReadoutConfig cfg = budget_preset();
  const TrialResult a = simulate_trajectory(cfg, InitialState::Bright1S, 7);
  const TrialResult b = simulate_trajectory(cfg, InitialState::Bright1S, 7);
  CHECK(a.photons == b.photons);
  CHECK(a.final_state == b.final_state);
  const TrialResult c = simulate_trajectory(cfg, InitialState::Bright1S, 8);
  const TrialResult d = simulate_trajectory(cfg, InitialState::DarkExcited, 7);
  // different trial or stream, different draw sequence (values may coincide,
  // the triple rarely does)
  const bool all_same = a.photons == c.photons && a.photons == d.photons &&
                        c.photons == d.photons;
  CHECK(!all_same);
}

TEST_CASE("histograms are identical across thread counts and reruns") {
  ReadoutConfig cfg = budget_preset();
  cfg.n_trials = 2000;
  cfg.rng_seed = 99;

  cfg.threads = 1;
  const PhotonCountHistogram serial = photon_histograms(cfg);
  cfg.threads = 7;
  const PhotonCountHistogram threaded = photon_histograms(cfg);
  const PhotonCountHistogram again = photon_histograms(cfg);

  CHECK(serial.bright == threaded.bright);
  CHECK(serial.dark == threaded.dark);
  CHECK(serial.bright_in_ground == threaded.bright_in_ground);
  CHECK(threaded.bright == again.bright);
  CHECK(threaded.dark == again.dark);
}

TEST_CASE("histogram totals equal the trial count") {
  ReadoutConfig cfg = budget_preset();
  cfg.n_trials = 1234;
  const PhotonCountHistogram h = photon_histograms(cfg);
  CHECK(h.total_bright() == 1234);
  CHECK(h.total_dark() == 1234);
  CHECK(h.trials_per_state == 1234);
}

TEST_CASE("dark donors with frozen t1 never emit") {
  ReadoutConfig cfg = budget_preset();
  cfg.rates.t1_ns = 1e18;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const TrialResult r = simulate_trajectory(cfg, InitialState::DarkExcited, trial);
    CHECK(r.photons == 0);
    CHECK(r.final_state == DonorState::Excited);
  }
}

TEST_CASE("forced Auger branching kills the elastic channel") {
  ReadoutConfig cfg = budget_preset();
  cfg.rates.p_auger = 1.0;  // first decay always shelves
  cfg.rates.t1_ns = 50.0;   // relight and shelve again
  int total = 0;
  for (std::uint64_t trial = 0; trial < 300; ++trial)
    total += simulate_trajectory(cfg, InitialState::Bright1S, trial).photons;
  CHECK(total == 0);

  cfg.count_elastic_only = false;  // satellite photons become visible
  cfg.collection_efficiency = 1.0;
  int tes_total = 0;
  for (std::uint64_t trial = 0; trial < 300; ++trial)
    tes_total += simulate_trajectory(cfg, InitialState::Bright1S, trial).photons;
  CHECK(tes_total > 0);
}

TEST_CASE("budget preset collects ten photons on average") {
  ReadoutConfig cfg = budget_preset();
  cfg.n_trials = 10000;
  const PhotonCountHistogram h = photon_histograms(cfg);
  CHECK(std::abs(mean_counts(h.bright, h.total_bright()) - 10.0) < 0.5);
  CHECK(expected_photons(cfg) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("quantum-well preset keeps the budget in a 23 ns window") {
  ReadoutConfig cfg = quantum_well_preset();
  cfg.n_trials = 10000;
  const PhotonCountHistogram h = photon_histograms(cfg);
  CHECK(std::abs(mean_counts(h.bright, h.total_bright()) - 10.0) < 0.5);
}

TEST_CASE("expected photons: closed-form limits") {
  // geometric limit at long windows
  ReadoutConfig cfg = no_relight_budget(0.01);
  cfg.window_ns = 1e9;
  CHECK(expected_photons(cfg) == doctest::Approx(9.9).epsilon(1e-9));
  // linear in the collection efficiency
  ReadoutConfig half = budget_preset();
  half.collection_efficiency = 0.05;
  CHECK(expected_photons(half) == doctest::Approx(5.0).epsilon(1e-9));
  // no pump, no photons
  ReadoutConfig off = budget_preset();
  off.rates.nir.intensity = 0.0;
  CHECK(expected_photons(off) == 0.0);
}

TEST_CASE("MC bright mean matches the analytic oracle") {
  ReadoutConfig cfg = no_relight_budget(0.005);
  cfg.window_ns = 200.0;
  cfg.n_trials = 10000;
  cfg.rng_seed = 12;
  const PhotonCountHistogram h = photon_histograms(cfg);
  const double mean = mean_counts(h.bright, h.total_bright());
  const double se = sd_counts(h.bright, h.total_bright()) /
                    std::sqrt(static_cast<double>(h.total_bright()));
  CHECK(std::abs(mean - expected_photons(cfg)) < 3.0 * se);
}

TEST_CASE("bright mean is nonincreasing in the Auger branching") {
  double prev = 1e300;
  for (double p : {0.0, 0.01, 0.05, 0.2}) {
    ReadoutConfig cfg = no_relight_budget(p);
    cfg.n_trials = 4000;
    cfg.rng_seed = 5;
    const PhotonCountHistogram h = photon_histograms(cfg);
    const double mean = mean_counts(h.bright, h.total_bright());
    CHECK(mean < prev + 0.05);
    prev = mean;
  }
}

TEST_CASE("dark stays dimmer than bright when the window is short of t1") {
  for (double t1 : {200.0, 350.0, 1000.0}) {
    for (double window : {20.0, 100.0}) {
      ReadoutConfig cfg = budget_preset();
      cfg.rates.t1_ns = t1;
      cfg.window_ns = window;
      cfg.n_trials = 2000;
      const PhotonCountHistogram h = photon_histograms(cfg);
      CHECK(mean_counts(h.dark, h.total_dark()) <
            mean_counts(h.bright, h.total_bright()));
    }
  }
}

TEST_CASE("qnd probability approaches one for tiny branching and short windows") {
  ReadoutConfig cfg = budget_preset();
  cfg.rates.p_auger = 1e-5;
  cfg.rates.t1_ns = 350.0;
  cfg.window_ns = 3.5;  // t1 / 100
  cfg.collection_efficiency = 1.0;
  cfg.n_trials = 10000;
  const ReadoutResult r = choose_threshold(photon_histograms(cfg));
  CHECK(r.qnd_probability > 0.99);
}

TEST_CASE("threshold choice: separated and identical histograms") {
  PhotonCountHistogram sep;
  sep.trials_per_state = 100;
  sep.bright = {0, 0, 0, 0, 0, 60, 40};
  sep.dark = {100, 0, 0, 0, 0, 0, 0};
  sep.bright_in_ground = {0, 0, 0, 0, 0, 60, 40};
  const ReadoutResult r = choose_threshold(sep);
  CHECK(r.fidelity == 1.0);
  CHECK(r.miss_rate == 0.0);
  CHECK(r.false_rate == 0.0);
  CHECK(r.threshold == 1);  // smallest perfect threshold
  CHECK(r.qnd_probability == 1.0);

  PhotonCountHistogram same;
  same.trials_per_state = 10;
  same.bright = {5, 3, 2};
  same.dark = {5, 3, 2};
  same.bright_in_ground = {5, 3, 2};
  const ReadoutResult r2 = choose_threshold(same);
  CHECK(r2.fidelity == 0.5);
}

TEST_CASE("threshold choice matches brute-force enumeration on Poisson data") {
  // synthetic histograms drawn from Poisson(10) and Poisson(0.1)
  std::mt19937_64 rng(2024);
  std::poisson_distribution<int> bright_draw(10.0), dark_draw(0.1);
  PhotonCountHistogram h;
  h.trials_per_state = 5000;
  h.bright.assign(40, 0);
  h.dark.assign(40, 0);
  h.bright_in_ground.assign(40, 0);
  for (int i = 0; i < 5000; ++i) {
    ++h.bright[std::min(39, bright_draw(rng))];
    ++h.dark[std::min(39, dark_draw(rng))];
  }
  const ReadoutResult r = choose_threshold(h);

  // independent enumeration
  double best_err = 1e300;
  int best_threshold = -1;
  for (int threshold = 0; threshold < 40; ++threshold) {
    double miss = 0.0, false_rate = 0.0;
    for (int k = 0; k < threshold; ++k) miss += h.bright[k] / 5000.0;
    for (int k = threshold; k < 40; ++k) false_rate += h.dark[k] / 5000.0;
    if (miss + false_rate < best_err) {
      best_err = miss + false_rate;
      best_threshold = threshold;
    }
  }
  CHECK(r.threshold == best_threshold);
  CHECK(std::abs(r.fidelity - (1.0 - best_err / 2.0)) < 1e-12);
}

TEST_CASE("config validation") {
  ReadoutConfig cfg = budget_preset();
  cfg.collection_efficiency = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = budget_preset();
  cfg.collection_efficiency = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = budget_preset();
  cfg.n_trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = budget_preset();
  cfg.window_ns = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
