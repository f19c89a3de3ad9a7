#include "relsim/config.hpp"

#include <fstream>
#include <set>

#include "relsim/errors.hpp"
#include "relsim/observables.hpp"

namespace relsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw config_error("config error at '" + path + "': " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) fail(path, "unknown key '" + key + "'");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string p = path + "." + key;
  if constexpr (std::is_same_v<T, double>) {
    out = get_number(v, p);
  } else if constexpr (std::is_same_v<T, int>) {
    if (!v.is_number_integer()) fail(p, "expected an integer");
    out = v.get<int>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned() && !v.is_number_integer())
      fail(p, "expected an unsigned integer");
    out = v.get<std::uint64_t>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(p, "expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(p, "expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!v.is_array()) fail(p, "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(get_number(v[i], p + "[" + std::to_string(i) + "]"));
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    if (v.is_null())
      out = std::nullopt;
    else
      out = get_number(v, p);
  } else if constexpr (std::is_same_v<T, std::optional<int>>) {
    if (v.is_null()) {
      out = std::nullopt;
    } else {
      if (!v.is_number_integer()) fail(p, "expected an integer");
      out = v.get<int>();
    }
  } else if constexpr (std::is_same_v<T, std::optional<bool>>) {
    if (v.is_null()) {
      out = std::nullopt;
    } else {
      if (!v.is_boolean()) fail(p, "expected a boolean");
      out = v.get<bool>();
    }
  }
}

EmissionMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "pl") return EmissionMode::PL;
  if (s == "rels") return EmissionMode::RELS;
  fail(path, "expected \"pl\" or \"rels\"");
}

PeakKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "direct-d0x") return PeakKind::DirectD0X;
  if (s == "tes") return PeakKind::TES;
  if (s == "dplus-x") return PeakKind::DplusX;
  if (s == "a0x") return PeakKind::A0X;
  if (s == "free-x") return PeakKind::FreeX;
  fail(path, "unknown peak kind '" + s + "'");
}

void parse_material(const json& j, ScenarioConfig& cfg) {
  check_keys(j, "material",
             {"preset", "effective_mass_ratio", "dielectric_constant",
              "binding_energy_override_mev"});
  if (j.contains("preset")) {
    std::string name;
    read(j, "material", "preset", name);
    cfg.material_preset_name = name;
    if (name != "custom") {
      try {
        cfg.material = material_preset(name);
      } catch (const std::invalid_argument& e) {
        fail("material.preset", e.what());
      }
    }
  }
  read(j, "material", "effective_mass_ratio", cfg.material.effective_mass_ratio);
  read(j, "material", "dielectric_constant", cfg.material.dielectric_constant);
  read(j, "material", "binding_energy_override_mev",
       cfg.material.binding_energy_override_mev);
}

void parse_rates(const json& j, RateParams& rates) {
  check_keys(j, "rates",
             {"tau_d0x_ns", "t1_ns", "p_auger", "capture_rate_per_ns", "nir",
              "fir"});
  read(j, "rates", "tau_d0x_ns", rates.tau_d0x_ns);
  read(j, "rates", "t1_ns", rates.t1_ns);
  read(j, "rates", "p_auger", rates.p_auger);
  read(j, "rates", "capture_rate_per_ns", rates.capture_rate);
  if (j.contains("nir")) {
    const json& n = j.at("nir");
    check_keys(n, "rates.nir",
               {"intensity", "detuning_mev", "linewidth_mev", "sat_intensity"});
    read(n, "rates.nir", "intensity", rates.nir.intensity);
    read(n, "rates.nir", "detuning_mev", rates.nir.detuning_mev);
    read(n, "rates.nir", "linewidth_mev", rates.nir.linewidth_mev);
    read(n, "rates.nir", "sat_intensity", rates.nir.sat_intensity);
  }
  if (j.contains("fir")) {
    const json& f = j.at("fir");
    check_keys(f, "rates.fir",
               {"intensity", "photon_mev", "sat_intensity_ionize",
                "sat_intensity_bound", "rate_ionize_ref_per_ns",
                "rate_bound_ref_per_ns", "resonance_window_mev",
                "detuning_span_mev"});
    read(f, "rates.fir", "intensity", rates.fir.intensity);
    read(f, "rates.fir", "photon_mev", rates.fir.photon_mev);
    read(f, "rates.fir", "sat_intensity_ionize", rates.fir.sat_intensity_ionize);
    read(f, "rates.fir", "sat_intensity_bound", rates.fir.sat_intensity_bound);
    read(f, "rates.fir", "rate_ionize_ref_per_ns", rates.fir.rate_ionize_ref);
    read(f, "rates.fir", "rate_bound_ref_per_ns", rates.fir.rate_bound_ref);
    read(f, "rates.fir", "resonance_window_mev", rates.fir.resonance_window_mev);
    read(f, "rates.fir", "detuning_span_mev", rates.fir.detuning_span_mev);
  }
}

PeakTable parse_peaks(const json& j) {
  if (!j.is_array()) fail("peaks", "expected an array of peaks");
  PeakTable table;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "peaks[" + std::to_string(i) + "]";
    const json& p = j[i];
    check_keys(p, path,
               {"label", "kind", "center_ev", "width_lorentz_mev",
                "width_gauss_mev", "amplitude", "rotational_l"});
    Peak peak;
    read(p, path, "label", peak.label);
    if (p.contains("kind")) {
      std::string kind;
      read(p, path, "kind", kind);
      peak.kind = parse_kind(kind, path + ".kind");
    }
    read(p, path, "center_ev", peak.center_ev);
    read(p, path, "width_lorentz_mev", peak.width_lorentz_mev);
    read(p, path, "width_gauss_mev", peak.width_gauss_mev);
    read(p, path, "amplitude", peak.amplitude);
    read(p, path, "rotational_l", peak.rotational_l);
    table.push_back(std::move(peak));
  }
  return table;
}

void parse_spectrum(const json& j, SpectrumScenario& s) {
  check_keys(j, "spectrum",
             {"excitation_ev", "mode", "grid", "rels_gain", "rels_enhancement",
              "rels_reference_detuning_mev", "response_width_mev"});
  read(j, "spectrum", "excitation_ev", s.excitation_ev);
  if (j.contains("mode")) {
    std::string mode;
    read(j, "spectrum", "mode", mode);
    s.mode = parse_mode(mode, "spectrum.mode");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "spectrum.grid", {"min_ev", "max_ev", "step_ev"});
    read(g, "spectrum.grid", "min_ev", s.grid.min_ev);
    read(g, "spectrum.grid", "max_ev", s.grid.max_ev);
    read(g, "spectrum.grid", "step_ev", s.grid.step_ev);
  }
  read(j, "spectrum", "rels_gain", s.rels_gain);
  read(j, "spectrum", "rels_enhancement", s.rels_enhancement);
  read(j, "spectrum", "rels_reference_detuning_mev",
       s.rels_reference_detuning_mev);
  read(j, "spectrum", "response_width_mev", s.response_width_mev);
}

void parse_scan(const json& j, ScanScenario& s) {
  check_keys(j, "scan", {"min_ev", "max_ev", "step_ev", "energies"});
  read(j, "scan", "min_ev", s.min_ev);
  read(j, "scan", "max_ev", s.max_ev);
  read(j, "scan", "step_ev", s.step_ev);
  read(j, "scan", "energies", s.energies);
}

void parse_satfit(const json& j, SatfitScenario& s) {
  check_keys(j, "satfit", {"points"});
  if (!j.contains("points")) return;
  const json& pts = j.at("points");
  if (!pts.is_array()) fail("satfit.points", "expected an array of [I, mod] pairs");
  s.points.clear();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string path = "satfit.points[" + std::to_string(i) + "]";
    if (!pts[i].is_array() || pts[i].size() != 2) fail(path, "expected [I, mod]");
    s.points.emplace_back(get_number(pts[i][0], path + "[0]"),
                          get_number(pts[i][1], path + "[1]"));
  }
}

void parse_readout(const json& j, ReadoutScenario& r) {
  check_keys(j, "readout",
             {"preset", "window_ns", "collection_efficiency", "n_trials",
              "count_elastic_only", "threads"});
  read(j, "readout", "preset", r.preset);
  if (r.preset != "budget" && r.preset != "quantum-well" && r.preset != "custom")
    fail("readout.preset", "expected \"budget\", \"quantum-well\" or \"custom\"");
  read(j, "readout", "window_ns", r.window_ns);
  read(j, "readout", "collection_efficiency", r.collection_efficiency);
  read(j, "readout", "n_trials", r.n_trials);
  read(j, "readout", "count_elastic_only", r.count_elastic_only);
  read(j, "readout", "threads", r.threads);
}

void parse_thermal(const json& j, ThermalScenario& t) {
  check_keys(j, "thermal",
             {"p_abs_w", "tau_s", "mass_kg", "c_p_j_per_kg_k", "temperatures_k"});
  read(j, "thermal", "p_abs_w", t.p_abs_w);
  read(j, "thermal", "tau_s", t.tau_s);
  read(j, "thermal", "mass_kg", t.mass_kg);
  read(j, "thermal", "c_p_j_per_kg_k", t.c_p_j_per_kg_k);
  read(j, "thermal", "temperatures_k", t.temperatures_k);
}

void parse_relax(const json& j, RelaxScenario& r) {
  check_keys(j, "relax", {"initial", "t_end_ns", "dt_ns"});
  read(j, "relax", "initial", r.initial);
  if (r.initial != "ground" && r.initial != "excited" && r.initial != "ionized" &&
      r.initial != "exciton")
    fail("relax.initial",
         "expected \"ground\", \"excited\", \"ionized\" or \"exciton\"");
  read(j, "relax", "t_end_ns", r.t_end_ns);
  read(j, "relax", "dt_ns", r.dt_ns);
}

json peaks_to_json(const PeakTable& table) {
  json out = json::array();
  for (const Peak& p : table)
    out.push_back({{"label", p.label},
                   {"kind", std::string(to_string(p.kind))},
                   {"center_ev", p.center_ev},
                   {"width_lorentz_mev", p.width_lorentz_mev},
                   {"width_gauss_mev", p.width_gauss_mev},
                   {"amplitude", p.amplitude},
                   {"rotational_l", p.rotational_l}});
  return out;
}

}  // namespace

LevelScheme ScenarioConfig::resolve_scheme() const {
  material.validate();
  LevelScheme scheme = make_level_scheme(material);
  if (e_1s_2p_mev) scheme.e_1s_2p_mev = *e_1s_2p_mev;
  if (e_d0x_binding_mev) scheme.e_d0x_binding_mev = *e_d0x_binding_mev;
  scheme.lifetimes.tau_d0x_ns = rates.tau_d0x_ns;
  scheme.lifetimes.t1_ns = rates.t1_ns;
  scheme.validate();
  return scheme;
}

RateParams ScenarioConfig::resolve_rates() const {
  RateParams resolved = rates;
  const LevelScheme scheme = resolve_scheme();
  resolved.fir.classification =
      classify_fir(resolved.fir.photon_mev, scheme,
                   resolved.fir.resonance_window_mev,
                   resolved.fir.detuning_span_mev);
  resolved.validate();
  return resolved;
}

ReadoutConfig ScenarioConfig::resolve_readout() const {
  ReadoutConfig cfg;
  if (readout.preset == "budget")
    cfg = budget_preset();
  else if (readout.preset == "quantum-well")
    cfg = quantum_well_preset();
  else {
    cfg.rates = resolve_rates();
  }
  cfg.scheme = resolve_scheme();
  cfg.scheme.lifetimes.tau_d0x_ns = cfg.rates.tau_d0x_ns;
  cfg.scheme.lifetimes.t1_ns = cfg.rates.t1_ns;
  cfg.rng_seed = seed;
  cfg.threads = readout.threads;
  if (readout.window_ns) cfg.window_ns = *readout.window_ns;
  if (readout.collection_efficiency)
    cfg.collection_efficiency = *readout.collection_efficiency;
  if (readout.n_trials) cfg.n_trials = *readout.n_trials;
  if (readout.count_elastic_only)
    cfg.count_elastic_only = *readout.count_elastic_only;
  cfg.validate();
  return cfg;
}

SynthParams ScenarioConfig::resolve_synth() const {
  SynthParams params;
  params.mode = spectrum.mode;
  params.excitation_ev = spectrum.excitation_ev;
  params.rates = resolve_rates();
  // A RELS spectrum needs a probe; default to the typical 1 mW/cm^2 when the
  // NIR block is switched off (as it is for the pure-dynamics commands).
  if (params.rates.nir.intensity <= 0.0) params.rates.nir.intensity = 1.0;
  params.rels_gain = spectrum.rels_gain;
  params.rels_enhancement = spectrum.rels_enhancement;
  params.rels_reference_detuning_mev = spectrum.rels_reference_detuning_mev;
  params.response_width_mev = spectrum.response_width_mev;
  return params;
}

std::vector<std::pair<double, double>> saturation_fixture() {
  const std::vector<double> intensities = {0.0, 0.5, 1.0, 2.0,  3.0,  5.0,
                                           7.0, 10.0, 13.7, 16.0, 20.0};
  std::vector<std::pair<double, double>> points;
  points.reserve(intensities.size());
  for (double i : intensities)
    points.emplace_back(i, saturation_model(i, 31.0, 13.7));
  return points;
}

ScenarioConfig parse_config(const json& j) {
  check_keys(j, "$",
             {"schema", "seed", "material", "levels", "rates", "peaks",
              "classify_mev", "spectrum", "scan", "deplete", "satfit",
              "readout", "thermal", "relax"});
  if (!j.contains("schema")) fail("schema", "missing; expected \"relsim/1\"");
  if (!j.at("schema").is_string() ||
      j.at("schema").get<std::string>() != kConfigSchema)
    fail("schema", "expected \"relsim/1\"");

  ScenarioConfig cfg;
  read(j, "$", "seed", cfg.seed);
  if (j.contains("material")) parse_material(j.at("material"), cfg);
  if (j.contains("levels")) {
    const json& l = j.at("levels");
    check_keys(l, "levels", {"e_1s_2p_mev", "e_d0x_binding_mev"});
    read(l, "levels", "e_1s_2p_mev", cfg.e_1s_2p_mev);
    read(l, "levels", "e_d0x_binding_mev", cfg.e_d0x_binding_mev);
  }
  if (j.contains("rates")) parse_rates(j.at("rates"), cfg.rates);
  if (j.contains("peaks")) cfg.peaks = parse_peaks(j.at("peaks"));
  read(j, "$", "classify_mev", cfg.classify_mev);
  if (j.contains("spectrum")) parse_spectrum(j.at("spectrum"), cfg.spectrum);
  if (j.contains("scan")) parse_scan(j.at("scan"), cfg.scan);
  if (j.contains("deplete")) {
    check_keys(j.at("deplete"), "deplete", {"fir_intensities"});
    read(j.at("deplete"), "deplete", "fir_intensities",
         cfg.deplete.fir_intensities);
  }
  if (j.contains("satfit")) parse_satfit(j.at("satfit"), cfg.satfit);
  if (j.contains("readout")) parse_readout(j.at("readout"), cfg.readout);
  if (j.contains("thermal")) parse_thermal(j.at("thermal"), cfg.thermal);
  if (j.contains("relax")) parse_relax(j.at("relax"), cfg.relax);

  try {
    cfg.resolve_rates();
    validate(cfg.peaks);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("config validation: ") + e.what());
  }
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema"] = std::string(kConfigSchema);
  j["seed"] = cfg.seed;
  json material = {
      {"preset", cfg.material_preset_name},
      {"effective_mass_ratio", cfg.material.effective_mass_ratio},
      {"dielectric_constant", cfg.material.dielectric_constant}};
  if (cfg.material.binding_energy_override_mev)
    material["binding_energy_override_mev"] = *cfg.material.binding_energy_override_mev;
  else
    material["binding_energy_override_mev"] = nullptr;
  j["material"] = material;

  json levels = json::object();
  if (cfg.e_1s_2p_mev) levels["e_1s_2p_mev"] = *cfg.e_1s_2p_mev;
  if (cfg.e_d0x_binding_mev) levels["e_d0x_binding_mev"] = *cfg.e_d0x_binding_mev;
  j["levels"] = levels;

  j["rates"] = {
      {"tau_d0x_ns", cfg.rates.tau_d0x_ns},
      {"t1_ns", cfg.rates.t1_ns},
      {"p_auger", cfg.rates.p_auger},
      {"capture_rate_per_ns", cfg.rates.capture_rate},
      {"nir",
       {{"intensity", cfg.rates.nir.intensity},
        {"detuning_mev", cfg.rates.nir.detuning_mev},
        {"linewidth_mev", cfg.rates.nir.linewidth_mev},
        {"sat_intensity", cfg.rates.nir.sat_intensity}}},
      {"fir",
       {{"intensity", cfg.rates.fir.intensity},
        {"photon_mev", cfg.rates.fir.photon_mev},
        {"sat_intensity_ionize", cfg.rates.fir.sat_intensity_ionize},
        {"sat_intensity_bound", cfg.rates.fir.sat_intensity_bound},
        {"rate_ionize_ref_per_ns", cfg.rates.fir.rate_ionize_ref},
        {"rate_bound_ref_per_ns", cfg.rates.fir.rate_bound_ref},
        {"resonance_window_mev", cfg.rates.fir.resonance_window_mev},
        {"detuning_span_mev", cfg.rates.fir.detuning_span_mev}}}};

  j["peaks"] = peaks_to_json(cfg.peaks);
  j["classify_mev"] = cfg.classify_mev;

  j["spectrum"] = {
      {"excitation_ev", cfg.spectrum.excitation_ev},
      {"mode", cfg.spectrum.mode == EmissionMode::PL ? "pl" : "rels"},
      {"grid",
       {{"min_ev", cfg.spectrum.grid.min_ev},
        {"max_ev", cfg.spectrum.grid.max_ev},
        {"step_ev", cfg.spectrum.grid.step_ev}}},
      {"rels_gain", cfg.spectrum.rels_gain},
      {"rels_enhancement", cfg.spectrum.rels_enhancement},
      {"rels_reference_detuning_mev", cfg.spectrum.rels_reference_detuning_mev},
      {"response_width_mev", cfg.spectrum.response_width_mev}};

  j["scan"] = {{"min_ev", cfg.scan.min_ev},
               {"max_ev", cfg.scan.max_ev},
               {"step_ev", cfg.scan.step_ev},
               {"energies", cfg.scan.energies}};
  j["deplete"] = {{"fir_intensities", cfg.deplete.fir_intensities}};

  json satfit_points = json::array();
  for (const auto& [i, m] : cfg.satfit.points)
    satfit_points.push_back(json::array({i, m}));
  j["satfit"] = {{"points", satfit_points}};

  json readout = {{"preset", cfg.readout.preset},
                  {"threads", cfg.readout.threads}};
  if (cfg.readout.window_ns) readout["window_ns"] = *cfg.readout.window_ns;
  if (cfg.readout.collection_efficiency)
    readout["collection_efficiency"] = *cfg.readout.collection_efficiency;
  if (cfg.readout.n_trials) readout["n_trials"] = *cfg.readout.n_trials;
  if (cfg.readout.count_elastic_only)
    readout["count_elastic_only"] = *cfg.readout.count_elastic_only;
  j["readout"] = readout;

  j["thermal"] = {{"p_abs_w", cfg.thermal.p_abs_w},
                  {"tau_s", cfg.thermal.tau_s},
                  {"mass_kg", cfg.thermal.mass_kg},
                  {"c_p_j_per_kg_k", cfg.thermal.c_p_j_per_kg_k},
                  {"temperatures_k", cfg.thermal.temperatures_k}};
  j["relax"] = {{"initial", cfg.relax.initial},
                {"t_end_ns", cfg.relax.t_end_ns},
                {"dt_ns", cfg.relax.dt_ns}};
  return j;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config parse failure in " + path.string() + ": " +
                       e.what());
  }
  return parse_config(j);
}

}  // namespace relsim
