#include "relsim/donor_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relsim {

void MaterialParams::validate() const {
  if (!(effective_mass_ratio > 0.0))
    throw std::invalid_argument("effective_mass_ratio must be > 0");
  if (!(dielectric_constant >= 1.0))
    throw std::invalid_argument("dielectric_constant must be >= 1");
  if (binding_energy_override_mev && !(*binding_energy_override_mev > 0.0))
    throw std::invalid_argument("binding_energy_override_mev must be > 0");
}

MaterialParams material_preset(std::string_view name) {
  if (name == "GaAs") return MaterialParams{};
  if (name == "hydrogen") return MaterialParams{1.0, 1.0, std::nullopt};
  throw std::invalid_argument("unknown material preset: " + std::string(name));
}

void LevelScheme::validate() const {
  if (!(e_1s_binding_mev > 0.0))
    throw std::invalid_argument("e_1s_binding_mev must be > 0");
  if (!(e_1s_2p_mev > 0.0 && e_1s_2p_mev < e_1s_binding_mev))
    throw std::invalid_argument("require 0 < e_1s_2p < e_1s_binding");
  if (!(e_d0x_binding_mev > 0.0))
    throw std::invalid_argument("e_d0x_binding_mev must be > 0");
  if (!(lifetimes.tau_d0x_ns > 0.0) || !(lifetimes.t1_ns > 0.0))
    throw std::invalid_argument("lifetimes must be > 0");
}

double scaled_rydberg(const MaterialParams& m) {
  m.validate();
  if (m.binding_energy_override_mev) return *m.binding_energy_override_mev;
  return kRydbergMev * m.effective_mass_ratio /
         (m.dielectric_constant * m.dielectric_constant);
}

double transition_1s_2p(double binding_mev) {
  if (!(binding_mev > 0.0))
    throw std::invalid_argument("binding energy must be > 0");
  return 0.75 * binding_mev;
}

double thz_to_mev(double f_thz) {
  if (f_thz < 0.0) throw std::invalid_argument("frequency must be >= 0");
  return kPlanckMevPerThz * f_thz;
}

double mev_to_thz(double e_mev) {
  if (e_mev < 0.0) throw std::invalid_argument("energy must be >= 0");
  return e_mev / kPlanckMevPerThz;
}

LevelScheme make_level_scheme(const MaterialParams& m) {
  LevelScheme scheme;
  scheme.e_1s_binding_mev = scaled_rydberg(m);
  scheme.e_1s_2p_mev = transition_1s_2p(scheme.e_1s_binding_mev);
  scheme.validate();
  return scheme;
}

std::string_view to_string(FirClass c) {
  switch (c) {
    case FirClass::Ionizing: return "ionizing";
    case FirClass::BoundBoundResonant: return "bound-bound-resonant";
    case FirClass::BoundBoundDetuned: return "bound-bound-detuned";
    case FirClass::SubResonant: return "sub-resonant";
  }
  return "unknown";
}

FirClass classify_fir(double photon_mev, const LevelScheme& scheme,
                      double resonance_window_mev, double detuning_span_mev) {
  scheme.validate();
  if (photon_mev < 0.0) throw std::invalid_argument("photon energy must be >= 0");
  if (!(resonance_window_mev > 0.0))
    throw std::invalid_argument("resonance window must be > 0");
  if (!(detuning_span_mev > 0.0))
    throw std::invalid_argument("detuning span must be > 0");

  if (photon_mev >= scheme.e_1s_binding_mev) return FirClass::Ionizing;
  if (std::abs(photon_mev - scheme.e_1s_2p_mev) <= resonance_window_mev)
    return FirClass::BoundBoundResonant;
  if (photon_mev >= scheme.e_1s_2p_mev - detuning_span_mev)
    return FirClass::BoundBoundDetuned;
  return FirClass::SubResonant;
}

}  // namespace relsim
