#include "relsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace relsim {

double modulation(double signal_off, double signal_on) {
  if (signal_off < 0.0 || signal_on < 0.0)
    throw std::invalid_argument("signals must be >= 0");
  if (signal_off + signal_on == 0.0)
    throw std::invalid_argument("modulation undefined for two zero signals");
  return 200.0 * (signal_off - signal_on) / (signal_off + signal_on);
}

double saturation_model(double intensity, double a_percent, double i0) {
  if (intensity < 0.0) throw std::invalid_argument("intensity must be >= 0");
  if (!(i0 > 0.0)) throw std::invalid_argument("i0 must be > 0");
  const double u = intensity / i0;
  return a_percent * u / (1.0 + u);
}

SaturationFit fit_saturation(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit needs at least 3 points");
  std::set<double> distinct;
  double max_i = 0.0;
  for (const auto& [intensity, mod] : points) {
    if (intensity < 0.0) throw std::invalid_argument("intensities must be >= 0");
    if (!distinct.insert(intensity).second)
      throw std::invalid_argument("intensities must be distinct");
    max_i = std::max(max_i, intensity);
  }
  if (max_i == 0.0)
    throw std::invalid_argument("degenerate data: all intensities are zero");

  const bool all_zero = std::all_of(points.begin(), points.end(),
                                    [](const auto& p) { return p.second == 0.0; });

  std::vector<double> intensities;
  intensities.reserve(points.size());
  for (const auto& p : points) intensities.push_back(p.first);
  std::nth_element(intensities.begin(),
                   intensities.begin() + intensities.size() / 2,
                   intensities.end());
  const double median_i = intensities[intensities.size() / 2];

  SaturationFit fit;
  fit.a_percent = 0.0;
  for (const auto& p : points) fit.a_percent = std::max(fit.a_percent, p.second);
  fit.i0 = median_i > 0.0 ? median_i : max_i;

  auto rss_at = [&points](double a, double i0) {
    double rss = 0.0;
    for (const auto& [intensity, mod] : points) {
      const double r = mod - a * (intensity / i0) / (1.0 + intensity / i0);
      rss += r * r;
    }
    return rss;
  };

  if (all_zero) {
    fit.degenerate = true;
    fit.converged = true;
    fit.rss = 0.0;
    fit.a_percent = 0.0;
    return fit;
  }

  // Damped Gauss-Newton on (A, I0) with the analytic Jacobian
  // d/dA = I/(I0+I), d/dI0 = -A I/(I0+I)^2; damping scales the normal-matrix
  // diagonal, x10 on an uphill step, /10 on a downhill one.
  double damping = 1e-3;
  double rss = rss_at(fit.a_percent, fit.i0);
  constexpr int kMaxIterations = 200;
  for (fit.iterations = 0; fit.iterations < kMaxIterations; ++fit.iterations) {
    double jtj[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double jtr[2] = {0.0, 0.0};
    for (const auto& [intensity, mod] : points) {
      const double denom = fit.i0 + intensity;
      const double model = fit.a_percent * intensity / denom;
      const double r = mod - model;
      const double ja = intensity / denom;
      const double ji = -fit.a_percent * intensity / (denom * denom);
      jtj[0][0] += ja * ja;
      jtj[0][1] += ja * ji;
      jtj[1][1] += ji * ji;
      jtr[0] += ja * r;
      jtr[1] += ji * r;
    }
    jtj[1][0] = jtj[0][1];

    const double d00 = jtj[0][0] * (1.0 + damping);
    const double d11 = jtj[1][1] * (1.0 + damping);
    const double det = d00 * d11 - jtj[0][1] * jtj[1][0];
    if (det == 0.0 || !std::isfinite(det)) break;
    const double step_a = (jtr[0] * d11 - jtj[0][1] * jtr[1]) / det;
    const double step_i = (d00 * jtr[1] - jtj[1][0] * jtr[0]) / det;

    double next_a = fit.a_percent + step_a;
    double next_i = fit.i0 + step_i;
    if (!(next_i > 0.0)) next_i = fit.i0 * 0.5;  // keep I0 positive
    const double next_rss = rss_at(next_a, next_i);

    if (next_rss <= rss) {
      const double rel = std::max(std::abs(step_a) / std::max(1.0, std::abs(next_a)),
                                  std::abs(step_i) / std::max(1.0, std::abs(next_i)));
      fit.a_percent = next_a;
      fit.i0 = next_i;
      rss = next_rss;
      damping = std::max(damping * 0.1, 1e-12);
      if (rel < 1e-9) {
        fit.converged = true;
        ++fit.iterations;
        break;
      }
    } else {
      damping *= 10.0;
      if (damping > 1e12) break;  // stalled; report best iterate
    }
  }
  fit.rss = rss;
  return fit;
}

double temperature_scale(double t_kelvin) {
  if (!(t_kelvin > 0.0)) throw std::invalid_argument("temperature must be > 0");
  constexpr double kAt15 = 1.0 / 7.0;
  constexpr double kAt20 = 0.1;
  constexpr double kHighSlope = (kAt20 - kAt15) / 5.0;
  if (t_kelvin <= 5.0) return 1.0;
  if (t_kelvin <= 15.0) return 1.0 + (t_kelvin - 5.0) * (kAt15 - 1.0) / 10.0;
  // Same slope continues above 20 K, floored at 0.
  return std::max(0.0, kAt15 + (t_kelvin - 15.0) * kHighSlope);
}

double thermal_rise(double p_abs_w, double tau_s, double mass_kg,
                    double c_p_j_per_kg_k) {
  if (p_abs_w < 0.0) throw std::invalid_argument("absorbed power must be >= 0");
  if (!(tau_s > 0.0)) throw std::invalid_argument("thermal time constant must be > 0");
  if (!(mass_kg > 0.0)) throw std::invalid_argument("mass must be > 0");
  if (!(c_p_j_per_kg_k > 0.0)) throw std::invalid_argument("specific heat must be > 0");
  return p_abs_w * tau_s / (mass_kg * c_p_j_per_kg_k);
}

double calibrate_auger(double off_resonant_ratio) {
  if (!(off_resonant_ratio > 0.0)) throw std::invalid_argument("ratio must be > 0");
  return 1.0 / (1.0 + off_resonant_ratio);
}

}  // namespace relsim
