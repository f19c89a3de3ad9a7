#pragma once

// Derived experimental quantities: modulation, the saturation model and its
// fitter, temperature scaling of the scattering efficiency, lattice heating,
// and the Auger branching calibration.

#include <span>
#include <utility>

namespace relsim {

struct SaturationFit {
  double a_percent = 0.0;  // asymptote
  double i0 = 0.0;         // half-saturation intensity, mW/cm^2
  double rss = 0.0;        // residual sum of squares
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // all-zero signal: amplitude pinned to 0
};

// Percent modulation 100 (A - B) / [(A + B)/2] of a signal switched from A
// (drive off) to B (drive on). Range [-200, 200]. Throws when both are zero.
double modulation(double signal_off, double signal_on);

// A * (I/I0) / (1 + I/I0): saturating response with asymptote A and
// half-saturation intensity I0.
double saturation_model(double intensity, double a_percent, double i0);

// Damped Gauss-Newton fit of the saturation model to (intensity, modulation)
// points. Needs >= 3 points with distinct nonnegative intensities, at least
// one positive. Non-convergence is flagged, the best iterate returned.
SaturationFit fit_saturation(std::span<const std::pair<double, double>> points);

// Scattering-efficiency factor relative to 5 K: piecewise linear through
// (5 K, 1), (15 K, 1/7), (20 K, 1/10); clamped to 1 below 5 K, extrapolated
// with the last slope above 20 K and floored at 0.
double temperature_scale(double t_kelvin);

// Temperature rise P_abs * tau / (m c_p) in K (SI inputs).
double thermal_rise(double p_abs_w, double tau_s, double mass_kg,
                    double c_p_j_per_kg_k);

// Auger branching probability from a measured direct/TES photon ratio under
// off-resonant excitation: p = 1/(1 + ratio). Do not feed the resonant
// ratio here; it includes elastic light and is not the branching ratio.
double calibrate_auger(double off_resonant_ratio);

}  // namespace relsim
