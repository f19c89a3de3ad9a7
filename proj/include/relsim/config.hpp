#pragma once

// Scenario configuration: one JSON document drives every CLI command.
// Parsing is strict (unknown keys are rejected with their path) and
// round-trips: parse -> serialize -> parse is the identity.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relsim/readout.hpp"
#include "relsim/spectra.hpp"

namespace relsim {

inline constexpr std::string_view kConfigSchema = "relsim/1";

struct SpectrumScenario {
  double excitation_ev = 1.5140;
  EmissionMode mode = EmissionMode::RELS;
  EnergyGrid grid;
  double rels_gain = 0.0;  // <= 0 requests the built-in x60 calibration
  double rels_enhancement = 60.0;
  double rels_reference_detuning_mev = 0.05;
  double response_width_mev = 0.043;
};

struct ScanScenario {
  // Range across the direct doublet; an explicit energy list wins.
  double min_ev = 1.5136;
  double max_ev = 1.5146;
  double step_ev = 1e-5;
  std::vector<double> energies;
};

struct DepleteScenario {
  std::vector<double> fir_intensities = {0.0, 0.5, 1.0, 2.0,  3.0,  5.0,
                                         7.0, 10.0, 13.7, 16.0, 20.0};
};

struct SatfitScenario {
  // Empty: the bundled saturation fixture is fitted instead.
  std::vector<std::pair<double, double>> points;
};

struct ReadoutScenario {
  std::string preset = "budget";  // "budget", "quantum-well" or "custom"
  std::optional<double> window_ns;
  std::optional<double> collection_efficiency;
  std::optional<int> n_trials;
  std::optional<bool> count_elastic_only;
  int threads = 0;
};

struct ThermalScenario {
  // Absorbed-power triple consistent with a 0.2 K rise at tau = 0.1 ms.
  double p_abs_w = 0.019152;
  double tau_s = 1e-4;
  double mass_kg = 2.66e-4;
  double c_p_j_per_kg_k = 0.036;
  std::vector<double> temperatures_k;  // empty: 2..25 K in 0.5 K steps
};

struct RelaxScenario {
  std::string initial = "excited";  // "ground", "excited", "ionized", "exciton"
  double t_end_ns = 2000.0;
  double dt_ns = 0.05;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;

  std::string material_preset_name = "GaAs";  // "custom" when fields are bespoke
  MaterialParams material;                    // defaults are the GaAs preset

  // Level-scheme overrides; absent fields use the hydrogenic defaults.
  std::optional<double> e_1s_2p_mev;
  std::optional<double> e_d0x_binding_mev;

  RateParams rates;
  PeakTable peaks = default_peak_table();

  std::vector<double> classify_mev = {6.73, 5.78, 4.31};

  SpectrumScenario spectrum;
  ScanScenario scan;
  DepleteScenario deplete;
  SatfitScenario satfit;
  ReadoutScenario readout;
  ThermalScenario thermal;
  RelaxScenario relax;

  // Scheme from material + overrides, lifetimes taken from rates.
  LevelScheme resolve_scheme() const;
  // Rates with fir.classification derived from the scheme.
  RateParams resolve_rates() const;
  ReadoutConfig resolve_readout() const;
  SynthParams resolve_synth() const;
};

// Exact samples of the reference saturation curve (A = 31, I0 = 13.7) at the
// bundled intensity set.
std::vector<std::pair<double, double>> saturation_fixture();

ScenarioConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config_file(const std::filesystem::path& path);

}  // namespace relsim
