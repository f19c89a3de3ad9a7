#pragma once

// Four-state rate-equation engine for a driven neutral donor.
//
// States (indices into Populations / RateMatrix):
//   g - donor ground state (1S), scatters the NIR probe
//   e - excited hydrogenic orbital, dark, relaxes to g with lifetime t1
//   c - ionized donor (electron in the conduction band), recaptured to g
//   x - donor-bound exciton, decays in tau_d0x either back to g (elastic
//       photon) or to e (Auger / two-electron-satellite channel)
//
// The generator matrix M is column-stochastic in rate form: dp/dt = M p,
// M[i][j] is the j -> i rate for i != j, columns sum to zero.
//
// Units: times ns, rates 1/ns, intensities mW/cm^2, energies meV.

#include <array>
#include <utility>
#include <vector>

#include "relsim/donor_model.hpp"

namespace relsim {

inline constexpr int kStateG = 0;
inline constexpr int kStateE = 1;
inline constexpr int kStateC = 2;
inline constexpr int kStateX = 3;
inline constexpr int kNumStates = 4;

using RateMatrix = std::array<std::array<double, kNumStates>, kNumStates>;

struct NirDrive {
  double intensity = 0.0;         // mW/cm^2; 0 switches the probe off
  double detuning_mev = 0.0;      // from the bound-exciton resonance
  double linewidth_mev = 6.6e-4;  // natural width of a 1 ns emitter
  double sat_intensity = 1.0;     // mW/cm^2
};

struct FirDrive {
  double intensity = 0.0;  // mW/cm^2; 0 switches the THz drive off
  double photon_mev = 6.741;
  FirClass classification = FirClass::Ionizing;
  // Half-saturation intensities and full-saturation pump rates of the two
  // channels. Defaults are calibrated so that with capture_rate = 1/ns the
  // ionizing depletion curve, expressed as a modulation, saturates at 31%
  // with half-saturation at 13.7 mW/cm^2.
  double sat_intensity_ionize = 2740.0 / 169.0;  // 16.213 mW/cm^2
  double sat_intensity_bound = 2740.0 / 169.0;
  double rate_ionize_ref = 62.0 / 169.0;  // 0.36686 1/ns
  double rate_bound_ref = 62.0 / 169.0;
  double resonance_window_mev = 0.05;
  double detuning_span_mev = 0.5;
};

struct RateParams {
  double tau_d0x_ns = 1.0;
  double t1_ns = 350.0;
  double p_auger = 0.0075;    // Auger branching per bound-exciton decay
  double capture_rate = 1.0;  // conduction band -> 1S, 1/ns
  NirDrive nir;
  FirDrive fir;

  void validate() const;  // throws std::invalid_argument
};

struct Populations {
  double g = 1.0;
  double e = 0.0;
  double c = 0.0;
  double x = 0.0;

  std::array<double, kNumStates> as_array() const { return {g, e, c, x}; }
  static Populations from_array(const std::array<double, kNumStates>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
  void validate() const;  // each in [0,1], sum within 1e-9 of 1
};

struct Trajectory {
  std::vector<double> times_ns;       // strictly increasing, starts at 0
  std::vector<Populations> points;    // one per time
};

// Steady-state NIR pump rate g -> x. R = (1/(2 tau)) s / (1 + s + (2 d/G)^2)
// with s = I/I_sat, d = detuning, G = linewidth; capped at 1/(2 tau).
double nir_scatter_rate(const NirDrive& nir, double tau_d0x_ns);

// Photon emission rate reported for budget estimates, 2R in 1/s; reaches
// 1/tau at full saturation on resonance.
double scattered_photons_per_second(const NirDrive& nir, double tau_d0x_ns);

// FIR pump rates: ref * (I/I_sat)/(1 + I/I_sat), the bound-bound channel
// additionally suppressed by a Lorentzian in the detuning from the 1S-2P
// line with the classification window as width.
double fir_ionization_rate(const FirDrive& fir);
double fir_bound_bound_rate(const FirDrive& fir, const LevelScheme& scheme);

// Generator matrix for the four-state chain. Validates parameters and the
// consistency of fir.classification with the scheme.
RateMatrix build_rate_matrix(const LevelScheme& scheme, const RateParams& rp);

// M p = 0 with sum(p) = 1, solved as a dense 4x4 system with partial
// pivoting after replacing the first balance row by the normalization row.
// Throws numerical_error when the chain is disconnected (singular system).
Populations steady_state(const RateMatrix& m);

// Classical fixed-step 4th-order integration of dp/dt = M p. Requires
// dt * max|diag(M)| <= 0.1 (throws std::invalid_argument otherwise).
Trajectory integrate(const RateMatrix& m, const Populations& p0,
                     double t_end_ns, double dt_ns);

// Ground-state depletion 1 - g_ss(I)/g_ss(0) per FIR intensity. Intensities
// must be sorted ascending and nonnegative.
std::vector<std::pair<double, double>> depletion_curve(
    const LevelScheme& scheme, const RateParams& rp,
    const std::vector<double>& fir_intensities);

}  // namespace relsim
