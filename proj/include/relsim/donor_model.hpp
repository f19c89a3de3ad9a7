#pragma once

// Hydrogenic donor level structure: effective-mass scaling of the Rydberg,
// 1S-2P transition energy, THz <-> meV conversion and classification of a
// far-infrared photon against the level scheme.
//
// Units: energies in meV unless a name says otherwise, frequencies in THz,
// lifetimes in ns.

#include <optional>
#include <string_view>

namespace relsim {

inline constexpr double kRydbergMev = 13606.0;       // free-hydrogen Rydberg
inline constexpr double kPlanckMevPerThz = 4.1357;   // h, 5 significant figures

struct MaterialParams {
  double effective_mass_ratio = 0.067;  // m*/m_e
  double dielectric_constant = 12.9;    // eps_r
  // Central-cell corrected binding energy; takes precedence over the
  // hydrogenic estimate when present.
  std::optional<double> binding_energy_override_mev = 5.9;

  void validate() const;  // throws std::invalid_argument
};

// Built-in presets: "GaAs" (default) and "hydrogen".
MaterialParams material_preset(std::string_view name);

struct Lifetimes {
  double tau_d0x_ns = 1.0;  // bound-exciton radiative lifetime
  double t1_ns = 350.0;     // excited hydrogenic state lifetime
};

struct LevelScheme {
  double e_1s_binding_mev = 5.9;
  double e_1s_2p_mev = 4.425;
  double e_d0x_binding_mev = 1.0;  // exciton-to-donor binding
  Lifetimes lifetimes;

  void validate() const;
};

// Hydrogenic binding energy Ry * (m*/m_e) / eps_r^2, unless the material
// carries a measured override.
double scaled_rydberg(const MaterialParams& m);

// Pure-hydrogenic 1S->2P energy, 3/4 of the binding energy. Callers may
// override the result in a LevelScheme when a measured value is known.
double transition_1s_2p(double binding_mev);

double thz_to_mev(double f_thz);
double mev_to_thz(double e_mev);

// Level scheme with the 3/4 rule applied and default lifetimes.
LevelScheme make_level_scheme(const MaterialParams& m);

enum class FirClass {
  Ionizing,            // photon >= 1S binding: direct excitation to the band
  BoundBoundResonant,  // within the resonance window of the 1S-2P line
  BoundBoundDetuned,   // below binding, within the detuning span of 1S-2P
  SubResonant,         // too red to drive anything
};

std::string_view to_string(FirClass c);

// Partition of photon energies [0, inf) into exactly one class. The
// boundary photon == binding is classified Ionizing (closed boundary).
FirClass classify_fir(double photon_mev, const LevelScheme& scheme,
                      double resonance_window_mev = 0.05,
                      double detuning_span_mev = 0.5);

}  // namespace relsim
