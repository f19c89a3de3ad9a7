#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "relsim/donor_model.hpp"

using namespace relsim;

TEST_SUITE_BEGIN("donor-model");

TEST_CASE("scaled rydberg: hydrogen identity") {
  MaterialParams hydrogen{1.0, 1.0, std::nullopt};
  CHECK(scaled_rydberg(hydrogen) == doctest::Approx(13606.0).epsilon(1e-12));
}

TEST_CASE("scaled rydberg: GaAs hand arithmetic") {
  // 13606 * 0.067 / 12.9^2 evaluated independently
  MaterialParams gaas{0.067, 12.9, std::nullopt};
  CHECK(std::abs(scaled_rydberg(gaas) - 5.48) < 0.01);
  CHECK(std::abs(scaled_rydberg(gaas) - 5.478048194219098) < 1e-12);
}

TEST_CASE("scaled rydberg: override wins") {
  MaterialParams gaas{0.067, 12.9, 5.9};
  CHECK(scaled_rydberg(gaas) == 5.9);
}

TEST_CASE("scaled rydberg: monotone in mass ratio, antitone in dielectric") {
  double prev = 0.0;
  for (double mass = 0.01; mass < 2.0; mass += 0.07) {
    const double e = scaled_rydberg({mass, 7.3, std::nullopt});
    CHECK(e > prev);
    prev = e;
  }
  prev = 1e30;
  for (double eps = 1.0; eps < 20.0; eps += 0.5) {
    const double e = scaled_rydberg({0.067, eps, std::nullopt});
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("scaled rydberg: rejects bad inputs") {
  CHECK_THROWS_AS(scaled_rydberg({0.0, 12.9, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(scaled_rydberg({-0.1, 12.9, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(scaled_rydberg({0.067, 0.5, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(scaled_rydberg({0.067, 12.9, -5.9}), std::invalid_argument);
}

TEST_CASE("1S-2P transition: hydrogen and donor values") {
  CHECK(transition_1s_2p(13606.0) == doctest::Approx(10204.5).epsilon(1e-12));
  const double e = transition_1s_2p(5.9);
  CHECK(e == doctest::Approx(4.425).epsilon(1e-12));
  CHECK(mev_to_thz(e) == doctest::Approx(1.07).epsilon(1e-3));
  // the 1.04 THz drive is detuned, not resonant
  CHECK(std::abs(e - thz_to_mev(1.04)) < 0.2);
  CHECK(std::abs(e - thz_to_mev(1.04)) > 0.05);
  CHECK_THROWS_AS(transition_1s_2p(0.0), std::invalid_argument);
  CHECK_THROWS_AS(transition_1s_2p(-1.0), std::invalid_argument);
}

TEST_CASE("thz <-> mev conversions match quoted pairs") {
  CHECK(std::abs(thz_to_mev(1.63) - 6.73) < 0.02);
  CHECK(std::abs(thz_to_mev(1.4) - 5.78) < 0.02);
  CHECK(std::abs(thz_to_mev(1.04) - 4.31) < 0.02);
  CHECK(thz_to_mev(0.0) == 0.0);
  CHECK_THROWS_AS(thz_to_mev(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(mev_to_thz(-1.0), std::invalid_argument);
}

TEST_CASE("thz <-> mev roundtrip is the identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> freq(0.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double f = freq(rng);
    const double back = mev_to_thz(thz_to_mev(f));
    CHECK(std::abs(back - f) <= 1e-12 * std::max(1.0, f));
  }
}

TEST_CASE("classify_fir: quoted photon energies") {
  const LevelScheme scheme = make_level_scheme(material_preset("GaAs"));
  CHECK(scheme.e_1s_binding_mev == 5.9);
  CHECK(classify_fir(6.73, scheme) == FirClass::Ionizing);
  CHECK(classify_fir(5.78, scheme) != FirClass::Ionizing);
  CHECK(classify_fir(4.31, scheme, 0.05) == FirClass::BoundBoundDetuned);
  CHECK(classify_fir(scheme.e_1s_2p_mev, scheme) == FirClass::BoundBoundResonant);
  CHECK(classify_fir(0.5, scheme) == FirClass::SubResonant);
}

TEST_CASE("classify_fir: closed boundary at the binding energy") {
  const LevelScheme scheme = make_level_scheme(material_preset("GaAs"));
  CHECK(classify_fir(scheme.e_1s_binding_mev, scheme) == FirClass::Ionizing);
  CHECK(classify_fir(std::nextafter(scheme.e_1s_binding_mev, 0.0), scheme) !=
        FirClass::Ionizing);
}

TEST_CASE("classify_fir: partitions the axis") {
  const LevelScheme scheme = make_level_scheme(material_preset("GaAs"));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> photon(0.0, 12.0);
  for (int i = 0; i < 2000; ++i) {
    const FirClass c = classify_fir(photon(rng), scheme);
    const bool known = c == FirClass::Ionizing || c == FirClass::BoundBoundResonant ||
                       c == FirClass::BoundBoundDetuned || c == FirClass::SubResonant;
    CHECK(known);
  }
  // class boundaries are ordered: sub-resonant < detuned < resonant window
  CHECK(classify_fir(3.9, scheme) == FirClass::SubResonant);
  CHECK(classify_fir(3.95, scheme) == FirClass::BoundBoundDetuned);
  CHECK(classify_fir(4.40, scheme) == FirClass::BoundBoundResonant);
  CHECK(classify_fir(5.0, scheme) == FirClass::BoundBoundDetuned);
}

TEST_CASE("level scheme invariants enforced") {
  LevelScheme bad = make_level_scheme(material_preset("GaAs"));
  bad.e_1s_2p_mev = 6.5;  // above the binding energy
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = make_level_scheme(material_preset("GaAs"));
  bad.lifetimes.tau_d0x_ns = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_SUITE_END();
