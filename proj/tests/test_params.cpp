#include <doctest.h>

#include <cmath>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/params.hpp"

using namespace kdsim;

namespace {

PhysicalConfig large_cavity() {
  PhysicalConfig c;
  c.lambda_laser = 780e-9;
  c.cavity_waist = 1e-3;
  c.cavity_length = 2e-2;
  c.np_radius = 150e-9;
  c.epsilon_r = 2.1;
  c.dipole_moment = 3.6e-29;
  c.atom_mass = 86.909 * si::amu;
  c.np_mass = 1e8 * si::amu;
  c.delta_p = c.np_mass * 13e-6;
  c.delta_al_ratio = 10;
  c.eta0 = 5;
  c.tau_pulse = 1e-7;
  return c;
}

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("large cavity chain") {
    const auto p = derive_params(large_cavity());
    CHECK(p.omega_a0 == doctest::Approx(3.27e5).epsilon(0.01));
    CHECK(p.omega_effm == doctest::Approx(8.17e5).epsilon(0.01));
    CHECK(p.omega_effm * p.tau_pulse == doctest::Approx(0.0817).epsilon(0.01));
    CHECK(p.omega_effm == p.eta0 * p.eta0 * p.omega_a0 * p.omega_a0 / p.delta_al);
    CHECK(p.xi == p.omega_effm * p.tau_pulse / 4.0);
    CHECK(p.epsilon_c > 0.0);
    CHECK(p.epsilon_c < 3.0);
  }

  TEST_CASE("small cavity couplings") {
    auto c = large_cavity();
    c.cavity_waist = 40e-6;
    c.cavity_length = 1e-2;
    const auto small = derive_params(c);
    CHECK(small.omega_a0 == doctest::Approx(1.2e7).epsilon(0.05));
    CHECK(small.omega_c0 == doctest::Approx(5.5e5).epsilon(0.02));
    CHECK(small.omega_c0 / derive_params(large_cavity()).omega_c0 == doctest::Approx(1250.0).epsilon(1e-12));
  }

  TEST_CASE("recoil velocity") {
    CHECK(derive_params(large_cavity()).v_k_np == doctest::Approx(5.1e-9).epsilon(0.02));
  }

  TEST_CASE("Raman-Nath products") {
    const auto c = large_cavity();
    CHECK(raman_nath_check(c, 13e-6).k_v_tau == doctest::Approx(1.05e-5).epsilon(0.01));
    CHECK(raman_nath_check(c, 2e-3).k_v_tau == doctest::Approx(1.6e-3).epsilon(0.02));
    CHECK_FALSE(raman_nath_check(c, 2e-3).regime_warning);
    CHECK_THROWS_AS(raman_nath_check(c, -1.0), ConfigError);
  }

  TEST_CASE("ratio thresholds") {
    CHECK(classify_ratio(0.1) == Verdict::pass);
    CHECK(classify_ratio(0.15) == Verdict::warn);
    CHECK(classify_ratio(5 * 0.1) == Verdict::warn);
    CHECK(classify_ratio(1.0) == Verdict::fail);
    CHECK(classify_ratio(std::nan("")) == Verdict::fail);

    auto p = derive_params(large_cavity());
    const auto rep = validity_report(p);
    REQUIRE(rep.entries.size() == 3);
    CHECK(rep.entries[1].verdict == Verdict::not_evaluated);
    CHECK(rep.entries[2].verdict == Verdict::warn);  // |mu| = 5 * 0.1
    CHECK(rep.overall() == Verdict::warn);
  }

  TEST_CASE("invalid inputs name the field") {
    auto c = large_cavity();
    c.epsilon_r = 1.0;
    CHECK_THROWS_WITH_AS(derive_params(c), doctest::Contains("epsilon_r"), ConfigError);
    c = large_cavity();
    c.cavity_length = -1;
    CHECK_THROWS_WITH_AS(derive_params(c), doctest::Contains("cavity_length"), ConfigError);
    c = large_cavity();
    c.delta_al_ratio = 0.5;
    CHECK_THROWS_AS(derive_params(c), ConfigError);
    c = large_cavity();
    c.np_radius = 1e-200;
    CHECK_THROWS_AS(derive_params(c), NumericError);
  }

  TEST_CASE("provenance for every field") {
    for (const auto& f : describe(derive_params(large_cavity()))) {
      CHECK_FALSE(f.provenance.empty());
      CHECK_FALSE(f.unit.empty());
    }
  }
}
