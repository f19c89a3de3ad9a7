#include "relsim/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace relsim {

namespace {

constexpr double kEvPerMev = 1e-3;

// Thompson-Cox-Hastings pseudo-Voigt: total FWHM and Lorentzian weight from
// the Gaussian/Lorentzian FWHMs.
struct PseudoVoigt {
  double fwhm;
  double eta;

  PseudoVoigt(double fwhm_gauss, double fwhm_lorentz) {
    const double g = fwhm_gauss, l = fwhm_lorentz;
    const double f5 = std::pow(g, 5) + 2.69269 * std::pow(g, 4) * l +
                      2.42843 * std::pow(g, 3) * l * l +
                      4.47163 * g * g * std::pow(l, 3) +
                      0.07842 * g * std::pow(l, 4) + std::pow(l, 5);
    fwhm = std::pow(f5, 0.2);
    const double q = l / fwhm;
    eta = q * (1.36603 + q * (-0.47719 + q * 0.11116));
  }

  // Unit-area profile at distance x from the center.
  double operator()(double x) const {
    const double lor = (2.0 / (M_PI * fwhm)) / (1.0 + 4.0 * x * x / (fwhm * fwhm));
    const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double gau =
        std::exp(-x * x / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
    return eta * lor + (1.0 - eta) * gau;
  }
};

double profile_at(const Peak& peak, double energy_ev) {
  const PseudoVoigt pv(peak.width_gauss_mev * kEvPerMev,
                       peak.width_lorentz_mev * kEvPerMev);
  return pv(energy_ev - peak.center_ev);
}

// Detuning (meV) from the nearest direct bound-exciton line, and that peak.
// Returns nullptr when the table has no direct line.
const Peak* nearest_direct(const PeakTable& table, double energy_ev,
                           double* detuning_mev) {
  const Peak* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Peak& p : table) {
    if (p.kind != PeakKind::DirectD0X) continue;
    const double d = std::abs(energy_ev - p.center_ev) / kEvPerMev;
    if (d < best_d) {
      best_d = d;
      best = &p;
    }
  }
  if (best) *detuning_mev = best_d;
  return best;
}

double direct_base_total(const PeakTable& table) {
  double sum = 0.0;
  for (const Peak& p : table)
    if (p.kind == PeakKind::DirectD0X) sum += p.amplitude;
  return sum;
}

struct AmplitudeModel {
  double pump_factor = 1.0;    // excitation response on every table peak
  double elastic_amp = 0.0;    // integrated area of the elastic line
  const Peak* elastic_shape = nullptr;
};

AmplitudeModel make_amplitude_model(const PeakTable& table,
                                    const SynthParams& params) {
  AmplitudeModel model;
  if (params.mode != EmissionMode::RELS) return model;

  double detuning = 0.0;
  const Peak* nearest = nearest_direct(table, params.excitation_ev, &detuning);
  if (!nearest) return model;  // no direct line: nothing scatters

  model.pump_factor = pump_response(detuning, params.response_width_mev);
  double gain = params.rels_gain;
  if (gain <= 0.0)
    gain = calibrate_rels_gain(params.rels_enhancement,
                               params.rels_reference_detuning_mev,
                               params.rates.nir, params.response_width_mev);
  model.elastic_amp = gain * elastic_response(params.rates.nir, detuning) *
                      params.pops.g * (1.0 - params.rates.p_auger) *
                      direct_base_total(table);
  model.elastic_shape = nearest;
  return model;
}

double peak_amplitude(const Peak& peak, const SynthParams& params,
                      double pump_factor) {
  switch (peak.kind) {
    case PeakKind::DirectD0X:
      return peak.amplitude * params.pops.g * (1.0 - params.rates.p_auger) *
             pump_factor;
    case PeakKind::TES:
      return peak.amplitude * params.pops.g * params.rates.p_auger * pump_factor;
    default:
      return peak.amplitude * pump_factor;
  }
}

void check_params(const PeakTable& table, const SynthParams& params) {
  validate(table);
  params.pops.validate();
  params.rates.validate();
  if (!(params.response_width_mev > 0.0))
    throw std::invalid_argument("response_width_mev must be > 0");
}

}  // namespace

std::string_view to_string(PeakKind k) {
  switch (k) {
    case PeakKind::DirectD0X: return "direct-d0x";
    case PeakKind::TES: return "tes";
    case PeakKind::DplusX: return "dplus-x";
    case PeakKind::A0X: return "a0x";
    case PeakKind::FreeX: return "free-x";
  }
  return "unknown";
}

PeakTable default_peak_table() {
  // Direct and TES doublets carry equal base amplitude so the off-resonant
  // direct/TES photon ratio equals (1-p)/p; homogeneous widths are the
  // natural linewidth scale of a 1 ns emitter.
  PeakTable t;
  t.push_back({"D0X L=0", PeakKind::DirectD0X, 1.51400, 6.6e-4, 0.030, 1.0, 0});
  t.push_back({"D0X L=1", PeakKind::DirectD0X, 1.51415, 6.6e-4, 0.030, 0.7, 1});
  t.push_back({"TES L=0", PeakKind::TES, 1.50950, 6.6e-4, 0.030, 1.0, 0});
  t.push_back({"TES L=1", PeakKind::TES, 1.51050, 6.6e-4, 0.030, 0.7, 1});
  t.push_back({"D+X", PeakKind::DplusX, 1.51300, 6.6e-4, 0.030, 0.25, 0});
  t.push_back({"A0X", PeakKind::A0X, 1.51250, 6.6e-4, 0.030, 0.15, 0});
  t.push_back({"free X", PeakKind::FreeX, 1.51530, 6.6e-4, 0.030, 0.5, 0});
  return t;
}

void validate(const PeakTable& table) {
  for (const Peak& p : table) {
    if (!(p.width_lorentz_mev > 0.0) || !(p.width_gauss_mev > 0.0))
      throw std::invalid_argument("peak widths must be > 0: " + p.label);
    if (p.amplitude < 0.0)
      throw std::invalid_argument("peak amplitude must be >= 0: " + p.label);
  }
}

void EnergyGrid::validate() const {
  if (!(step_ev > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (!(min_ev < max_ev)) throw std::invalid_argument("grid needs min < max");
  if (step_ev > 35e-6 + 1e-15)
    throw std::invalid_argument("grid step exceeds the 35 ueV resolution bound");
}

int EnergyGrid::size() const {
  return static_cast<int>(std::floor((max_ev - min_ev) / step_ev + 1e-9)) + 1;
}

double elastic_response(const NirDrive& nir, double detuning_mev) {
  if (nir.intensity <= 0.0) return 0.0;
  const double s = nir.intensity / nir.sat_intensity;
  const double d = 2.0 * detuning_mev / nir.linewidth_mev;
  return (1.0 + s) / (1.0 + s + d * d);
}

double pump_response(double detuning_mev, double response_width_mev) {
  const double d = 2.0 * detuning_mev / response_width_mev;
  return 1.0 / (1.0 + d * d);
}

double calibrate_rels_gain(double enhancement, double ref_detuning_mev,
                           const NirDrive& nir, double response_width_mev) {
  if (!(enhancement > 1.0))
    throw std::invalid_argument("enhancement must be > 1");
  const double phi = pump_response(ref_detuning_mev, response_width_mev);
  const double lam = elastic_response(nir, ref_detuning_mev);
  const double denom = 1.0 - enhancement * lam;
  if (!(denom > 0.0))
    throw std::invalid_argument(
        "rels gain calibration unreachable: elastic response too broad");
  const double gain = (enhancement * phi - 1.0) / denom;
  if (!(gain > 0.0))
    throw std::invalid_argument(
        "rels gain calibration unreachable: response too narrow");
  return gain;
}

Spectrum synth_spectrum(const PeakTable& table, const EnergyGrid& grid,
                        const SynthParams& params) {
  check_params(table, params);
  grid.validate();

  Spectrum s;
  const int n = grid.size();
  s.energy_ev.resize(n);
  s.intensity.assign(n, 0.0);
  for (int i = 0; i < n; ++i) s.energy_ev[i] = grid.min_ev + i * grid.step_ev;

  const AmplitudeModel model = make_amplitude_model(table, params);
  for (const Peak& peak : table) {
    const double amp = peak_amplitude(peak, params, model.pump_factor);
    if (amp == 0.0) continue;
    const PseudoVoigt pv(peak.width_gauss_mev * kEvPerMev,
                         peak.width_lorentz_mev * kEvPerMev);
    for (int i = 0; i < n; ++i)
      s.intensity[i] += amp * pv(s.energy_ev[i] - peak.center_ev);
  }

  const bool excitation_on_grid = params.excitation_ev >= grid.min_ev &&
                                  params.excitation_ev <= grid.max_ev;
  if (model.elastic_amp > 0.0 && excitation_on_grid) {
    const PseudoVoigt pv(model.elastic_shape->width_gauss_mev * kEvPerMev,
                         model.elastic_shape->width_lorentz_mev * kEvPerMev);
    for (int i = 0; i < n; ++i)
      s.intensity[i] += model.elastic_amp * pv(s.energy_ev[i] - params.excitation_ev);
  }
  return s;
}

double spectrum_height(const PeakTable& table, double energy_ev,
                       const SynthParams& params) {
  check_params(table, params);
  const AmplitudeModel model = make_amplitude_model(table, params);
  double height = 0.0;
  for (const Peak& peak : table)
    height += peak_amplitude(peak, params, model.pump_factor) *
              profile_at(peak, energy_ev);
  if (model.elastic_amp > 0.0) {
    const PseudoVoigt pv(model.elastic_shape->width_gauss_mev * kEvPerMev,
                         model.elastic_shape->width_lorentz_mev * kEvPerMev);
    height += model.elastic_amp * pv(energy_ev - params.excitation_ev);
  }
  return height;
}

std::vector<std::pair<double, double>> excitation_scan(
    const PeakTable& table, const std::vector<double>& energies,
    const SynthParams& params) {
  if (!std::is_sorted(energies.begin(), energies.end()))
    throw std::invalid_argument("scan energies must be sorted ascending");
  SynthParams p = params;
  p.mode = EmissionMode::RELS;
  std::vector<std::pair<double, double>> out;
  out.reserve(energies.size());
  for (double e : energies) {
    p.excitation_ev = e;
    out.emplace_back(e, spectrum_height(table, e, p));
  }
  return out;
}

double integrate_region(const Spectrum& s, double lo_ev, double hi_ev) {
  if (s.energy_ev.size() < 2)
    throw std::invalid_argument("spectrum has no grid");
  if (!(lo_ev < hi_ev)) throw std::invalid_argument("region needs lo < hi");
  if (lo_ev < s.energy_ev.front() || hi_ev > s.energy_ev.back())
    throw std::invalid_argument("region outside the spectrum grid");

  // Piecewise-linear integral with interpolated endpoints; additive over
  // adjacent regions by construction.
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < s.energy_ev.size(); ++i) {
    const double a = s.energy_ev[i], b = s.energy_ev[i + 1];
    if (b <= lo_ev || a >= hi_ev) continue;
    const double aa = std::max(a, lo_ev), bb = std::min(b, hi_ev);
    const double t0 = (aa - a) / (b - a), t1 = (bb - a) / (b - a);
    const double ya = s.intensity[i] + (s.intensity[i + 1] - s.intensity[i]) * t0;
    const double yb = s.intensity[i] + (s.intensity[i + 1] - s.intensity[i]) * t1;
    area += 0.5 * (ya + yb) * (bb - aa);
  }
  return area;
}

}  // namespace relsim
