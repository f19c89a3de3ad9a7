#pragma once

// Emission-spectrum synthesis from a configurable peak table, excitation
// scans, and region integration.
//
// Peaks are pseudo-Voigt lines (Thompson-Cox-Hastings mixing of unit-area
// Gaussian and Lorentzian). Peak amplitudes are integrated areas in
// arbitrary units; grids and centers are in eV, widths in meV (FWHM).

#include <string>
#include <utility>
#include <vector>

#include "relsim/dynamics.hpp"

namespace relsim {

// Fidelity-ratio integration regions: direct recombination vs Auger satellite.
inline constexpr double kDirectRegionLoEv = 1.5138;
inline constexpr double kDirectRegionHiEv = 1.5150;
inline constexpr double kTesRegionLoEv = 1.5090;
inline constexpr double kTesRegionHiEv = 1.5117;

enum class PeakKind { DirectD0X, TES, DplusX, A0X, FreeX };

std::string_view to_string(PeakKind k);

struct Peak {
  std::string label;
  PeakKind kind = PeakKind::DirectD0X;
  double center_ev = 1.514;
  double width_lorentz_mev = 0.005;  // homogeneous FWHM
  double width_gauss_mev = 0.030;    // inhomogeneous FWHM
  double amplitude = 1.0;            // integrated area
  int rotational_l = 0;              // bound-exciton rotational label
};

using PeakTable = std::vector<Peak>;

// Direct doublet at 1.5140 / 1.51415 eV, TES doublet mirroring it at
// 1.5095 / 1.5105, D+X 1.5130, A0X 1.5125, free exciton 1.5153.
PeakTable default_peak_table();

void validate(const PeakTable& table);

struct EnergyGrid {
  double min_ev = 1.505;
  double max_ev = 1.519;
  double step_ev = 5e-6;  // 5 ueV, well under the 35 ueV resolution bound

  void validate() const;
  int size() const;
};

struct Spectrum {
  std::vector<double> energy_ev;
  std::vector<double> intensity;  // photons/s/bin, arbitrary normalization
};

enum class EmissionMode { PL, RELS };

struct SynthParams {
  EmissionMode mode = EmissionMode::PL;
  double excitation_ev = 1.5145;
  Populations pops;   // defaults to everything in 1S
  RateParams rates;   // p_auger splits direct/TES; nir shapes the elastic line
  // Elastic amplitude gain; <= 0 requests the built-in calibration that
  // makes resonant excitation raise the direct-region emission by
  // rels_enhancement relative to excitation at rels_reference_detuning.
  double rels_gain = 0.0;
  double rels_enhancement = 60.0;
  double rels_reference_detuning_mev = 0.05;
  // Width (FWHM) of the Lorentzian excitation response applied to the
  // bound-exciton derived amplitudes in RELS mode.
  double response_width_mev = 0.043;
};

// Normalized elastic-scattering lineshape (1+s)/(1+s+(2d/G)^2); 0 when the
// probe is off.
double elastic_response(const NirDrive& nir, double detuning_mev);

// Normalized excitation response 1/(1+(2d/G)^2).
double pump_response(double detuning_mev, double response_width_mev);

// Closed-form gain such that direct-region emission at exact resonance is
// `enhancement` times the emission at `ref_detuning_mev` off resonance.
double calibrate_rels_gain(double enhancement, double ref_detuning_mev,
                           const NirDrive& nir, double response_width_mev);

// Synthesize the emission spectrum. In RELS mode an elastic line is added
// at the excitation energy with amplitude proportional to the elastic
// response at the detuning from the nearest direct bound-exciton peak, and
// bound-exciton derived amplitudes follow the excitation response.
Spectrum synth_spectrum(const PeakTable& table, const EnergyGrid& grid,
                        const SynthParams& params);

// Spectrum value at one energy, evaluated analytically (no grid).
double spectrum_height(const PeakTable& table, double energy_ev,
                       const SynthParams& params);

// (excitation energy, RELS height at the excitation energy) per entry of
// `energies` (must be sorted ascending).
std::vector<std::pair<double, double>> excitation_scan(
    const PeakTable& table, const std::vector<double>& energies,
    const SynthParams& params);

// Trapezoidal integral of the spectrum over [lo, hi]; endpoints interpolated
// linearly so the integral is additive over adjacent regions. Bounds must
// lie within the grid.
double integrate_region(const Spectrum& s, double lo_ev, double hi_ev);

}  // namespace relsim
