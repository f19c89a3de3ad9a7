// relsim command-line scenario runner. Every subcommand consumes one JSON
// config, writes a data CSV plus a JSON summary into --out, and prints a
// one-line result. Exit codes: 0 success, 2 config error, 3 numerical
// failure.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relsim/config.hpp"
#include "relsim/csv.hpp"
#include "relsim/errors.hpp"
#include "relsim/observables.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace relsim;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int trials = 0;
  bool deterministic = false;
};

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json base_summary(const std::string& command, const ScenarioConfig& cfg,
                  const CliOptions& opts) {
  json s;
  s["schema"] = "relsim-output/1";
  s["command"] = command;
  s["seed"] = cfg.seed;
  if (!opts.deterministic) s["generated_at"] = timestamp_utc();
  s["inputs"] = to_json(cfg);
  return s;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output file: " + path.string());
  out << j.dump(2) << '\n';
}

ScenarioConfig load_scenario(const CliOptions& opts) {
  ScenarioConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config_file(opts.config_path);
  if (opts.seed_given) cfg.seed = opts.seed;
  if (opts.trials > 0) cfg.readout.n_trials = opts.trials;
  return cfg;
}

json fit_to_json(const SaturationFit& fit) {
  return {{"A", fit.a_percent},          {"I0", fit.i0},
          {"rss", fit.rss},              {"iterations", fit.iterations},
          {"converged", fit.converged},  {"degenerate", fit.degenerate}};
}

int cmd_levels(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  const LevelScheme scheme = cfg.resolve_scheme();

  MaterialParams hydrogenic = cfg.material;
  hydrogenic.binding_energy_override_mev.reset();
  const double derived = scaled_rydberg(hydrogenic);

  json report = base_summary("levels", cfg, opts);
  report["binding_mev"] = {
      {"derived_hydrogenic", derived},
      {"override", cfg.material.binding_energy_override_mev
                       ? json(*cfg.material.binding_energy_override_mev)
                       : json(nullptr)},
      {"effective", scheme.e_1s_binding_mev}};
  report["binding_thz"] = mev_to_thz(scheme.e_1s_binding_mev);
  report["e_1s_2p_mev"] = scheme.e_1s_2p_mev;
  report["e_1s_2p_thz"] = mev_to_thz(scheme.e_1s_2p_mev);
  report["e_d0x_binding_mev"] = scheme.e_d0x_binding_mev;
  report["lifetimes_ns"] = {{"tau_d0x", scheme.lifetimes.tau_d0x_ns},
                            {"t1", scheme.lifetimes.t1_ns}};
  json classifications = json::array();
  for (double photon : cfg.classify_mev) {
    const FirClass c = classify_fir(photon, scheme,
                                    cfg.rates.fir.resonance_window_mev,
                                    cfg.rates.fir.detuning_span_mev);
    classifications.push_back({{"photon_mev", photon},
                               {"photon_thz", mev_to_thz(photon)},
                               {"class", std::string(to_string(c))}});
  }
  report["classifications"] = classifications;

  const fs::path out = fs::path(opts.out_dir) / "levels.json";
  write_json(out, report);
  std::cout << "levels: binding " << format_number(scheme.e_1s_binding_mev)
            << " meV (derived " << format_number(derived) << "), 1S-2P "
            << format_number(scheme.e_1s_2p_mev) << " meV -> " << out.string()
            << '\n';
  return 0;
}

int cmd_spectrum(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  const SynthParams params = cfg.resolve_synth();
  const Spectrum spec = synth_spectrum(cfg.peaks, cfg.spectrum.grid, params);

  const fs::path csv_path = fs::path(opts.out_dir) / "spectrum.csv";
  CsvWriter csv(csv_path);
  csv.header({"energy_ev", "intensity"});
  for (std::size_t i = 0; i < spec.energy_ev.size(); ++i)
    csv.row({spec.energy_ev[i], spec.intensity[i]});

  json summary = base_summary("spectrum", cfg, opts);
  summary["csv"] = csv_path.filename().string();
  summary["points"] = spec.energy_ev.size();
  if (params.mode == EmissionMode::RELS) {
    double gain = params.rels_gain;
    if (gain <= 0.0)
      gain = calibrate_rels_gain(params.rels_enhancement,
                                 params.rels_reference_detuning_mev,
                                 params.rates.nir, params.response_width_mev);
    summary["rels_gain_used"] = gain;
  }
  if (cfg.spectrum.grid.min_ev <= kTesRegionLoEv &&
      cfg.spectrum.grid.max_ev >= kDirectRegionHiEv) {
    const double direct =
        integrate_region(spec, kDirectRegionLoEv, kDirectRegionHiEv);
    const double tes = integrate_region(spec, kTesRegionLoEv, kTesRegionHiEv);
    summary["direct_region_area"] = direct;
    summary["tes_region_area"] = tes;
    if (tes > 0.0) summary["direct_to_tes_ratio"] = direct / tes;
  }

  const fs::path json_path = fs::path(opts.out_dir) / "spectrum_summary.json";
  write_json(json_path, summary);
  std::cout << "spectrum: " << spec.energy_ev.size() << " points -> "
            << csv_path.string() << '\n';
  return 0;
}

int cmd_scan(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  std::vector<double> energies = cfg.scan.energies;
  if (energies.empty()) {
    if (!(cfg.scan.step_ev > 0.0) || !(cfg.scan.min_ev < cfg.scan.max_ev))
      throw config_error("scan range needs min < max and step > 0");
    for (double e = cfg.scan.min_ev; e <= cfg.scan.max_ev + 1e-12;
         e += cfg.scan.step_ev)
      energies.push_back(e);
  }
  const auto scan = excitation_scan(cfg.peaks, energies, cfg.resolve_synth());

  const fs::path csv_path = fs::path(opts.out_dir) / "scan.csv";
  CsvWriter csv(csv_path);
  csv.header({"excitation_ev", "rels_height"});
  for (const auto& [e, h] : scan) csv.row({e, h});

  auto peak = std::max_element(
      scan.begin(), scan.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  auto valley = std::min_element(
      scan.begin(), scan.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });

  json summary = base_summary("scan", cfg, opts);
  summary["csv"] = csv_path.filename().string();
  summary["peak_excitation_ev"] = peak->first;
  summary["peak_height"] = peak->second;
  summary["valley_height"] = valley->second;
  if (valley->second > 0.0)
    summary["peak_to_valley_contrast"] = peak->second / valley->second;
  write_json(fs::path(opts.out_dir) / "scan_summary.json", summary);
  std::cout << "scan: " << scan.size() << " excitations, max at "
            << format_number(peak->first) << " eV -> " << csv_path.string()
            << '\n';
  return 0;
}

int cmd_deplete(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  const LevelScheme scheme = cfg.resolve_scheme();
  const RateParams rates = cfg.resolve_rates();
  const auto curve =
      depletion_curve(scheme, rates, cfg.deplete.fir_intensities);

  const fs::path csv_path = fs::path(opts.out_dir) / "deplete.csv";
  CsvWriter csv(csv_path);
  csv.header({"fir_intensity_mw_cm2", "depletion", "modulation_percent"});
  std::vector<std::pair<double, double>> mod_points;
  for (const auto& [intensity, depletion] : curve) {
    const double mod = modulation(1.0, 1.0 - depletion);
    csv.row({intensity, depletion, mod});
    mod_points.emplace_back(intensity, mod);
  }

  json summary = base_summary("deplete", cfg, opts);
  summary["csv"] = csv_path.filename().string();
  summary["fir_class"] = std::string(to_string(rates.fir.classification));
  if (!curve.empty()) summary["max_depletion"] = curve.back().second;
  try {
    summary["saturation_fit"] = fit_to_json(fit_saturation(mod_points));
  } catch (const std::invalid_argument&) {
    // too few / degenerate points: curve stands on its own
  }
  write_json(fs::path(opts.out_dir) / "deplete_summary.json", summary);
  std::cout << "deplete: " << curve.size() << " intensities -> "
            << csv_path.string() << '\n';
  return 0;
}

int cmd_satfit(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  const auto points =
      cfg.satfit.points.empty() ? saturation_fixture() : cfg.satfit.points;
  const SaturationFit fit = fit_saturation(points);
  if (!fit.converged)
    throw numerical_error("saturation fit did not converge after " +
                          std::to_string(fit.iterations) + " iterations");

  const fs::path csv_path = fs::path(opts.out_dir) / "satfit.csv";
  CsvWriter csv(csv_path);
  csv.header({"fir_intensity_mw_cm2", "modulation_percent", "model_percent"});
  for (const auto& [intensity, mod] : points)
    csv.row({intensity, mod,
             fit.degenerate ? 0.0
                            : saturation_model(intensity, fit.a_percent, fit.i0)});

  json summary = base_summary("satfit", cfg, opts);
  summary["csv"] = csv_path.filename().string();
  summary["fit"] = fit_to_json(fit);
  write_json(fs::path(opts.out_dir) / "satfit.json", summary);
  std::cout << "satfit: A=" << format_number(fit.a_percent)
            << " I0=" << format_number(fit.i0) << " rss="
            << format_number(fit.rss) << " (" << fit.iterations
            << " iterations) -> " << csv_path.string() << '\n';
  return 0;
}

int cmd_readout(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  const ReadoutConfig rcfg = cfg.resolve_readout();
  const PhotonCountHistogram hist = photon_histograms(rcfg);
  const ReadoutResult result = choose_threshold(hist);

  const fs::path csv_path = fs::path(opts.out_dir) / "readout_histogram.csv";
  CsvWriter csv(csv_path);
  csv.header({"photon_count", "bright_trials", "dark_trials"});
  for (std::size_t k = 0; k < hist.bright.size(); ++k)
    csv.row({static_cast<double>(k), static_cast<double>(hist.bright[k]),
             static_cast<double>(hist.dark[k])});

  auto mean_of = [](const std::vector<std::int64_t>& h, std::int64_t n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) sum += double(k) * double(h[k]);
    return sum / double(n);
  };

  json summary = base_summary("readout", cfg, opts);
  summary["csv"] = csv_path.filename().string();
  summary["n_trials"] = rcfg.n_trials;
  summary["window_ns"] = rcfg.window_ns;
  summary["collection_efficiency"] = rcfg.collection_efficiency;
  summary["mean_bright"] = mean_of(hist.bright, hist.total_bright());
  summary["mean_dark"] = mean_of(hist.dark, hist.total_dark());
  summary["expected_photons_bright"] = expected_photons(rcfg);
  summary["scattered_photons_per_second"] =
      scattered_photons_per_second(rcfg.rates.nir, rcfg.rates.tau_d0x_ns);
  summary["result"] = {{"threshold", result.threshold},
                       {"fidelity", result.fidelity},
                       {"miss_rate", result.miss_rate},
                       {"false_rate", result.false_rate},
                       {"qnd_probability", result.qnd_probability}};
  write_json(fs::path(opts.out_dir) / "readout.json", summary);
  std::cout << "readout: mean bright "
            << format_number(summary["mean_bright"].get<double>())
            << ", fidelity " << format_number(result.fidelity)
            << " at threshold " << result.threshold << " -> "
            << csv_path.string() << '\n';
  return 0;
}

int cmd_thermal(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  std::vector<double> temps = cfg.thermal.temperatures_k;
  if (temps.empty())
    for (double t = 2.0; t <= 25.0 + 1e-9; t += 0.5) temps.push_back(t);

  const fs::path csv_path = fs::path(opts.out_dir) / "thermal.csv";
  CsvWriter csv(csv_path);
  csv.header({"temperature_k", "scale_factor"});
  for (double t : temps) csv.row({t, temperature_scale(t)});

  const double rise = thermal_rise(cfg.thermal.p_abs_w, cfg.thermal.tau_s,
                                   cfg.thermal.mass_kg,
                                   cfg.thermal.c_p_j_per_kg_k);
  json summary = base_summary("thermal", cfg, opts);
  summary["csv"] = csv_path.filename().string();
  summary["delta_t_k"] = rise;
  write_json(fs::path(opts.out_dir) / "thermal_summary.json", summary);
  std::cout << "thermal: delta T " << format_number(rise) << " K, "
            << temps.size() << " scale points -> " << csv_path.string() << '\n';
  return 0;
}

int cmd_relax(const CliOptions& opts) {
  const ScenarioConfig cfg = load_scenario(opts);
  const LevelScheme scheme = cfg.resolve_scheme();
  const RateParams rates = cfg.resolve_rates();
  const RateMatrix m = build_rate_matrix(scheme, rates);

  Populations p0{0.0, 0.0, 0.0, 0.0};
  if (cfg.relax.initial == "ground") p0.g = 1.0;
  else if (cfg.relax.initial == "excited") p0.e = 1.0;
  else if (cfg.relax.initial == "ionized") p0.c = 1.0;
  else p0.x = 1.0;

  const Trajectory traj = integrate(m, p0, cfg.relax.t_end_ns, cfg.relax.dt_ns);

  const fs::path csv_path = fs::path(opts.out_dir) / "relax.csv";
  CsvWriter csv(csv_path);
  csv.header({"time_ns", "p_1s", "p_excited", "p_ionized", "p_d0x"});
  for (std::size_t i = 0; i < traj.times_ns.size(); ++i) {
    const Populations& p = traj.points[i];
    csv.row({traj.times_ns[i], p.g, p.e, p.c, p.x});
  }

  const Populations ss = steady_state(m);
  json summary = base_summary("relax", cfg, opts);
  summary["csv"] = csv_path.filename().string();
  summary["final"] = {{"g", traj.points.back().g},
                      {"e", traj.points.back().e},
                      {"c", traj.points.back().c},
                      {"x", traj.points.back().x}};
  summary["steady_state"] = {{"g", ss.g}, {"e", ss.e}, {"c", ss.c}, {"x", ss.x}};
  write_json(fs::path(opts.out_dir) / "relax_summary.json", summary);
  std::cout << "relax: " << traj.times_ns.size() << " steps -> "
            << csv_path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relsim: optical readout simulator for neutral-donor qubits"};
  app.fallthrough();
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "JSON scenario config file");
  app.add_option("--out", opts.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", opts.seed, "override the config seed");
  app.add_option("--trials", opts.trials, "override the readout trial count");
  app.add_flag("--deterministic", opts.deterministic,
               "omit timestamps from JSON summaries");

  app.add_subcommand("levels", "level-scheme report and photon classification");
  app.add_subcommand("spectrum", "synthesize a PL/RELS emission spectrum");
  app.add_subcommand("scan", "RELS peak height versus excitation energy");
  app.add_subcommand("deplete", "ground-state depletion versus FIR intensity");
  app.add_subcommand("satfit", "fit the saturation model to modulation data");
  app.add_subcommand("readout", "Monte Carlo photon-count readout");
  app.add_subcommand("thermal", "temperature scaling and lattice heating");
  app.add_subcommand("relax", "time evolution of the four-state populations");

  CLI11_PARSE(app, argc, argv);
  opts.seed_given = seed_opt->count() > 0;

  try {
    std::filesystem::create_directories(opts.out_dir);
    if (app.got_subcommand("levels")) return cmd_levels(opts);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(opts);
    if (app.got_subcommand("scan")) return cmd_scan(opts);
    if (app.got_subcommand("deplete")) return cmd_deplete(opts);
    if (app.got_subcommand("satfit")) return cmd_satfit(opts);
    if (app.got_subcommand("readout")) return cmd_readout(opts);
    if (app.got_subcommand("thermal")) return cmd_thermal(opts);
    if (app.got_subcommand("relax")) return cmd_relax(opts);
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const config_error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
