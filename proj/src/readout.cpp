#include "relsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace relsim {

namespace {

// splitmix64; used as a counter-based seed derivation so trial streams are
// independent of scheduling order.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t trial) {
  std::uint64_t h = splitmix64(master ^ splitmix64(stream + 1));
  return splitmix64(h ^ splitmix64(trial + 0x632BE59BD9B4E019ULL));
}

// splitmix64 iterated as the per-trial generator; ample quality for
// exponential clocks and branch picks.
class TrialRng {
 public:
  explicit TrialRng(std::uint64_t seed) : state_(seed) {}

  // uniform in (0, 1]; never 0 so -log(u) stays finite
  double uniform() {
    state_ = splitmix64(state_);
    return (static_cast<double>(state_ >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t kBrightStream = 0;
constexpr std::uint64_t kDarkStream = 1;

}  // namespace

void ReadoutConfig::validate() const {
  scheme.validate();
  rates.validate();
  if (!(window_ns > 0.0)) throw std::invalid_argument("window_ns must be > 0");
  if (!(collection_efficiency > 0.0 && collection_efficiency <= 1.0))
    throw std::invalid_argument("collection_efficiency must be in (0, 1]");
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

ReadoutConfig budget_preset() {
  // s = 6 at tau = 0.3 ns gives pump 10/7 /ns and a sustained cycle rate of
  // exactly 1/ns, so 10 photons are collected on average in the 100 ns
  // window at 0.1 efficiency. No Auger branching.
  ReadoutConfig cfg;
  cfg.rates.tau_d0x_ns = 0.3;
  cfg.rates.p_auger = 0.0;
  cfg.rates.nir.intensity = 6.0;
  cfg.rates.nir.sat_intensity = 1.0;
  cfg.rates.nir.detuning_mev = 0.0;
  cfg.rates.fir.intensity = 0.0;
  cfg.window_ns = 100.0;
  cfg.collection_efficiency = 0.1;
  return cfg;
}

ReadoutConfig quantum_well_preset() {
  // Same construction scaled to the 23 ns window budget.
  ReadoutConfig cfg = budget_preset();
  cfg.rates.tau_d0x_ns = 0.069;
  cfg.window_ns = 23.0;
  return cfg;
}

namespace {

TrialResult run_trial(const RateMatrix& m, const ReadoutConfig& cfg,
                      InitialState initial, std::uint64_t trial_index) {
  const std::uint64_t stream =
      initial == InitialState::Bright1S ? kBrightStream : kDarkStream;
  TrialRng rng(derive_seed(cfg.rng_seed, stream, trial_index));

  int state = initial == InitialState::Bright1S ? kStateG : kStateE;
  int photons = 0;
  double t = 0.0;
  while (true) {
    double out_rates[kNumStates];
    double total = 0.0;
    for (int to = 0; to < kNumStates; ++to) {
      out_rates[to] = to == state ? 0.0 : m[to][state];
      total += out_rates[to];
    }
    if (total <= 0.0) break;  // frozen state

    t += rng.exponential(total);
    if (t >= cfg.window_ns) break;

    int next = state;
    double partial = 0.0;
    const double pick = rng.uniform() * total;
    for (int to = 0; to < kNumStates; ++to) {
      if (out_rates[to] <= 0.0) continue;
      partial += out_rates[to];
      next = to;  // on roundoff at pick == total, the last active edge wins
      if (pick <= partial) break;
    }

    if (state == kStateX) {
      const bool elastic = next == kStateG;
      if (elastic || !cfg.count_elastic_only)
        if (rng.uniform() < cfg.collection_efficiency) ++photons;
    }
    state = next;
  }

  // Resolve a bound exciton still present at the window end by its decay
  // branch; the photon falls outside the window and is not counted.
  if (state == kStateX) {
    const double elastic_rate = m[kStateG][kStateX];
    const double auger_rate = m[kStateE][kStateX];
    const double total = elastic_rate + auger_rate;
    state = (total > 0.0 && rng.uniform() * total < auger_rate) ? kStateE
                                                                : kStateG;
  }

  TrialResult result;
  result.photons = photons;
  result.final_state = state == kStateG   ? DonorState::Ground
                       : state == kStateE ? DonorState::Excited
                                          : DonorState::Ionized;
  return result;
}

}  // namespace

TrialResult simulate_trajectory(const ReadoutConfig& cfg, InitialState initial,
                                std::uint64_t trial_index) {
  cfg.validate();
  const RateMatrix m = build_rate_matrix(cfg.scheme, cfg.rates);
  return run_trial(m, cfg, initial, trial_index);
}

std::int64_t PhotonCountHistogram::total_bright() const {
  return std::accumulate(bright.begin(), bright.end(), std::int64_t{0});
}

std::int64_t PhotonCountHistogram::total_dark() const {
  return std::accumulate(dark.begin(), dark.end(), std::int64_t{0});
}

PhotonCountHistogram photon_histograms(const ReadoutConfig& cfg) {
  cfg.validate();
  const RateMatrix m = build_rate_matrix(cfg.scheme, cfg.rates);
  const int n = cfg.n_trials;
  std::vector<TrialResult> bright_results(n), dark_results(n);

  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(n));

  auto run_range = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      bright_results[i] = run_trial(m, cfg, InitialState::Bright1S,
                                    static_cast<std::uint64_t>(i));
      dark_results[i] = run_trial(m, cfg, InitialState::DarkExcited,
                                  static_cast<std::uint64_t>(i));
    }
  };

  if (workers == 1) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const int lo = static_cast<int>(w) * chunk;
      const int hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  int max_count = 0;
  for (const auto& r : bright_results) max_count = std::max(max_count, r.photons);
  for (const auto& r : dark_results) max_count = std::max(max_count, r.photons);

  PhotonCountHistogram h;
  h.trials_per_state = n;
  h.bright.assign(max_count + 1, 0);
  h.dark.assign(max_count + 1, 0);
  h.bright_in_ground.assign(max_count + 1, 0);
  for (const auto& r : bright_results) {
    ++h.bright[r.photons];
    if (r.final_state == DonorState::Ground) ++h.bright_in_ground[r.photons];
  }
  for (const auto& r : dark_results) ++h.dark[r.photons];
  return h;
}

double expected_photons(const ReadoutConfig& cfg) {
  cfg.validate();
  const double pump = nir_scatter_rate(cfg.rates.nir, cfg.rates.tau_d0x_ns);
  if (pump <= 0.0) return 0.0;
  const double cycle_rate = 1.0 / (1.0 / pump + cfg.rates.tau_d0x_ns);
  const double eta = cfg.collection_efficiency;
  const double p = cfg.rates.p_auger;
  const double exposure = cycle_rate * cfg.window_ns;
  if (p < 1e-12) return eta * exposure;
  return eta * (1.0 - p) / p * (1.0 - std::exp(-p * exposure));
}

ReadoutResult choose_threshold(const PhotonCountHistogram& h) {
  if (h.bright.empty() || h.dark.empty() || h.total_bright() == 0 ||
      h.total_dark() == 0)
    throw std::invalid_argument("histograms must be nonempty");

  const double n_bright = static_cast<double>(h.total_bright());
  const double n_dark = static_cast<double>(h.total_dark());
  const int max_count = static_cast<int>(std::max(h.bright.size(), h.dark.size())) - 1;

  auto bin = [](const std::vector<std::int64_t>& v, int k) -> std::int64_t {
    return k < static_cast<int>(v.size()) ? v[k] : 0;
  };

  ReadoutResult best;
  double best_error = std::numeric_limits<double>::infinity();
  for (int threshold = 0; threshold <= max_count; ++threshold) {
    std::int64_t bright_below = 0, dark_at_or_above = 0;
    for (int k = 0; k < threshold; ++k) bright_below += bin(h.bright, k);
    for (int k = threshold; k <= max_count; ++k) dark_at_or_above += bin(h.dark, k);
    const double miss = bright_below / n_bright;
    const double false_bright = dark_at_or_above / n_dark;
    if (miss + false_bright < best_error) {
      best_error = miss + false_bright;
      best.threshold = threshold;
      best.miss_rate = miss;
      best.false_rate = false_bright;
    }
  }
  best.fidelity = 1.0 - (best.miss_rate + best.false_rate) / 2.0;

  std::int64_t reported_bright = 0, reported_bright_in_ground = 0;
  for (int k = best.threshold; k < static_cast<int>(h.bright.size()); ++k) {
    reported_bright += h.bright[k];
    reported_bright_in_ground += bin(h.bright_in_ground, k);
  }
  best.qnd_probability =
      reported_bright > 0
          ? static_cast<double>(reported_bright_in_ground) / reported_bright
          : 0.0;
  return best;
}

}  // namespace relsim
