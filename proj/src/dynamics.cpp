#include "relsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "relsim/errors.hpp"

namespace relsim {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Saturating drive response I/I_sat / (1 + I/I_sat).
double saturating(double intensity, double sat_intensity) {
  const double s = intensity / sat_intensity;
  return s / (1.0 + s);
}

}  // namespace

void RateParams::validate() const {
  if (!finite_positive(tau_d0x_ns))
    throw std::invalid_argument("tau_d0x_ns must be > 0");
  if (!(t1_ns > 0.0))  // +inf allowed: relighting switched off
    throw std::invalid_argument("t1_ns must be > 0");
  if (!(p_auger >= 0.0 && p_auger <= 1.0))
    throw std::invalid_argument("p_auger must be in [0, 1]");
  if (!finite_positive(capture_rate))
    throw std::invalid_argument("capture_rate must be > 0");
  if (nir.intensity < 0.0)
    throw std::invalid_argument("nir.intensity must be >= 0");
  if (!finite_positive(nir.linewidth_mev))
    throw std::invalid_argument("nir.linewidth_mev must be > 0");
  if (!finite_positive(nir.sat_intensity))
    throw std::invalid_argument("nir.sat_intensity must be > 0");
  if (fir.intensity < 0.0)
    throw std::invalid_argument("fir.intensity must be >= 0");
  if (fir.photon_mev < 0.0)
    throw std::invalid_argument("fir.photon_mev must be >= 0");
  if (!finite_positive(fir.sat_intensity_ionize) ||
      !finite_positive(fir.sat_intensity_bound))
    throw std::invalid_argument("fir saturation intensities must be > 0");
  if (!finite_positive(fir.rate_ionize_ref) || !finite_positive(fir.rate_bound_ref))
    throw std::invalid_argument("fir reference rates must be > 0");
  if (!finite_positive(fir.resonance_window_mev))
    throw std::invalid_argument("fir.resonance_window_mev must be > 0");
  if (!finite_positive(fir.detuning_span_mev))
    throw std::invalid_argument("fir.detuning_span_mev must be > 0");
}

void Populations::validate() const {
  for (double v : as_array())
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("occupation fractions must be in [0, 1]");
  const double sum = g + e + c + x;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("occupations must sum to 1");
}

double nir_scatter_rate(const NirDrive& nir, double tau_d0x_ns) {
  if (nir.intensity < 0.0) throw std::invalid_argument("nir.intensity must be >= 0");
  if (!finite_positive(nir.sat_intensity) || !finite_positive(nir.linewidth_mev) ||
      !finite_positive(tau_d0x_ns))
    throw std::invalid_argument("invalid NIR drive parameters");
  const double s = nir.intensity / nir.sat_intensity;
  const double d = 2.0 * nir.detuning_mev / nir.linewidth_mev;
  return (0.5 / tau_d0x_ns) * s / (1.0 + s + d * d);
}

double scattered_photons_per_second(const NirDrive& nir, double tau_d0x_ns) {
  return 2.0 * nir_scatter_rate(nir, tau_d0x_ns) * 1e9;
}

double fir_ionization_rate(const FirDrive& fir) {
  if (fir.intensity == 0.0) return 0.0;
  return fir.rate_ionize_ref * saturating(fir.intensity, fir.sat_intensity_ionize);
}

double fir_bound_bound_rate(const FirDrive& fir, const LevelScheme& scheme) {
  if (fir.intensity == 0.0) return 0.0;
  const double detuning = fir.photon_mev - scheme.e_1s_2p_mev;
  const double u = detuning / fir.resonance_window_mev;
  const double lorentz = 1.0 / (1.0 + u * u);
  return fir.rate_bound_ref * saturating(fir.intensity, fir.sat_intensity_bound) *
         lorentz;
}

RateMatrix build_rate_matrix(const LevelScheme& scheme, const RateParams& rp) {
  scheme.validate();
  rp.validate();

  if (rp.fir.intensity > 0.0) {
    const FirClass expected =
        classify_fir(rp.fir.photon_mev, scheme, rp.fir.resonance_window_mev,
                     rp.fir.detuning_span_mev);
    if (expected != rp.fir.classification)
      throw std::invalid_argument(
          "fir.classification inconsistent with the level scheme: photon " +
          std::to_string(rp.fir.photon_mev) + " meV classifies as " +
          std::string(to_string(expected)));
  }

  RateMatrix m{};
  auto add_edge = [&m](int from, int to, double rate) {
    if (rate < 0.0) throw std::invalid_argument("negative transition rate");
    m[to][from] += rate;
    m[from][from] -= rate;
  };

  const double decay = 1.0 / rp.tau_d0x_ns;
  add_edge(kStateX, kStateG, (1.0 - rp.p_auger) * decay);
  add_edge(kStateX, kStateE, rp.p_auger * decay);
  add_edge(kStateE, kStateG, 1.0 / rp.t1_ns);
  add_edge(kStateC, kStateG, rp.capture_rate);
  add_edge(kStateG, kStateX, nir_scatter_rate(rp.nir, rp.tau_d0x_ns));

  if (rp.fir.intensity > 0.0) {
    switch (rp.fir.classification) {
      case FirClass::Ionizing:
        add_edge(kStateG, kStateC, fir_ionization_rate(rp.fir));
        break;
      case FirClass::BoundBoundResonant:
      case FirClass::BoundBoundDetuned:
        add_edge(kStateG, kStateE, fir_bound_bound_rate(rp.fir, scheme));
        break;
      case FirClass::SubResonant:
        break;
    }
  }
  return m;
}

Populations steady_state(const RateMatrix& m) {
  // Replace the g balance row with the normalization row and solve by
  // Gaussian elimination with partial pivoting.
  double a[kNumStates][kNumStates + 1];
  for (int j = 0; j < kNumStates; ++j) a[0][j] = 1.0;
  a[0][kNumStates] = 1.0;
  double scale = 1.0;
  for (int i = 1; i < kNumStates; ++i) {
    for (int j = 0; j < kNumStates; ++j) {
      a[i][j] = m[i][j];
      scale = std::max(scale, std::abs(m[i][j]));
    }
    a[i][kNumStates] = 0.0;
  }

  for (int col = 0; col < kNumStates; ++col) {
    int pivot = col;
    for (int r = col + 1; r < kNumStates; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-14 * scale)
      throw numerical_error(
          "steady state: singular rate matrix (disconnected chain)");
    if (pivot != col)
      for (int j = col; j <= kNumStates; ++j) std::swap(a[pivot][j], a[col][j]);
    for (int r = col + 1; r < kNumStates; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int j = col; j <= kNumStates; ++j) a[r][j] -= f * a[col][j];
    }
  }

  std::array<double, kNumStates> p{};
  for (int i = kNumStates - 1; i >= 0; --i) {
    double v = a[i][kNumStates];
    for (int j = i + 1; j < kNumStates; ++j) v -= a[i][j] * p[j];
    p[i] = v / a[i][i];
  }

  // Clamp roundoff-negative occupations and renormalize.
  double sum = 0.0;
  for (double& v : p) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
    sum += v;
  }
  for (double& v : p) v /= sum;

  double residual = 0.0;
  for (int i = 0; i < kNumStates; ++i) {
    double row = 0.0;
    for (int j = 0; j < kNumStates; ++j) row += m[i][j] * p[j];
    residual = std::max(residual, std::abs(row));
  }
  if (!(residual < 1e-10 * scale))
    throw numerical_error("steady state: residual " + std::to_string(residual));

  Populations pops = Populations::from_array(p);
  pops.validate();
  return pops;
}

namespace {

std::array<double, kNumStates> mat_vec(const RateMatrix& m,
                                     const std::array<double, kNumStates>& p) {
  std::array<double, kNumStates> out{};
  for (int i = 0; i < kNumStates; ++i)
    for (int j = 0; j < kNumStates; ++j) out[i] += m[i][j] * p[j];
  return out;
}

std::array<double, kNumStates> rk4_step(const RateMatrix& m,
                                        const std::array<double, kNumStates>& p,
                                        double dt) {
  const auto k1 = mat_vec(m, p);
  std::array<double, kNumStates> tmp{};
  for (int i = 0; i < kNumStates; ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
  const auto k2 = mat_vec(m, tmp);
  for (int i = 0; i < kNumStates; ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
  const auto k3 = mat_vec(m, tmp);
  for (int i = 0; i < kNumStates; ++i) tmp[i] = p[i] + dt * k3[i];
  const auto k4 = mat_vec(m, tmp);
  std::array<double, kNumStates> out{};
  for (int i = 0; i < kNumStates; ++i)
    out[i] = p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

Trajectory integrate(const RateMatrix& m, const Populations& p0, double t_end_ns,
                     double dt_ns) {
  p0.validate();
  if (!(dt_ns > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(dt_ns <= t_end_ns)) throw std::invalid_argument("dt must be <= t_end");
  double max_diag = 0.0;
  for (int i = 0; i < kNumStates; ++i)
    max_diag = std::max(max_diag, std::abs(m[i][i]));
  if (dt_ns * max_diag > 0.1)
    throw std::invalid_argument(
        "integration step unstable: require dt * max|diag| <= 0.1, got " +
        std::to_string(dt_ns * max_diag));

  Trajectory traj;
  auto p = p0.as_array();
  double t = 0.0;
  traj.times_ns.push_back(t);
  traj.points.push_back(p0);
  while (t < t_end_ns) {
    const double dt = std::min(dt_ns, t_end_ns - t);
    p = rk4_step(m, p, dt);
    t += dt;
    traj.times_ns.push_back(t);
    traj.points.push_back(Populations::from_array(p));
  }
  return traj;
}

std::vector<std::pair<double, double>> depletion_curve(
    const LevelScheme& scheme, const RateParams& rp,
    const std::vector<double>& fir_intensities) {
  if (!std::is_sorted(fir_intensities.begin(), fir_intensities.end()))
    throw std::invalid_argument("fir intensities must be sorted ascending");
  if (!fir_intensities.empty() && fir_intensities.front() < 0.0)
    throw std::invalid_argument("fir intensities must be >= 0");

  RateParams off = rp;
  off.fir.intensity = 0.0;
  const double g0 = steady_state(build_rate_matrix(scheme, off)).g;
  if (!(g0 > 0.0))
    throw numerical_error("depletion undefined: zero ground population at I=0");

  std::vector<std::pair<double, double>> out;
  out.reserve(fir_intensities.size());
  for (double intensity : fir_intensities) {
    RateParams on = rp;
    on.fir.intensity = intensity;
    const double g = intensity == 0.0
                         ? g0
                         : steady_state(build_rate_matrix(scheme, on)).g;
    out.emplace_back(intensity, 1.0 - g / g0);
  }
  return out;
}

}  // namespace relsim
