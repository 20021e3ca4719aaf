#include <doctest.h>

#include <cmath>

#include "kdsim/cavity.hpp"
#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"

using namespace kdsim;

namespace {
const double k = 2 * si::pi / 780e-9;
}

TEST_SUITE("cavity") {
  TEST_CASE("Pauli BCH is third order") {
    const double mus[] = {0.2, 0.1, 0.05, 0.025};
    const auto s = bch_scaling(mus);
    CHECK(s.exponent == doctest::Approx(3.0).epsilon(0.1));
    for (const auto& r : s.rows) CHECK(r.commutator_dev < 1e-15);
  }

  TEST_CASE("two-time Zassenhaus") {
    const double m = 1e8 * si::amu;
    const auto r = zassenhaus_check(k, m, 2.2e-3, 1e-3);
    CHECK(r.max_abs_diff < 1e-10);
    CHECK(std::abs(zassenhaus_check(k, 1e30, 2e-3, 1e-3).scalar - 1.0) < 1e-15);
  }

  TEST_CASE("driven empty cavity") {
    CavityModel m;
    m.omega_c0 = 437;
    m.delta_cl = -2e6 + 437;
    m.omega_l0 = 4e6;
    m.k = k;
    // |alpha| reaches 2 |eta|; amplitude-level accuracy needs headroom past the Poisson tail
    m.n_fock = 80;
    const auto r = displaced_oscillator_check(m, 20e-6, 4);
    CHECK(r.max_state_err < 1e-8);
    CHECK(r.max_alpha_err < 1e-8);
  }

  TEST_CASE("constant generator against matrix exponential") {
    CavityModel m;
    m.omega_a0 = 3e5;
    m.omega_c0 = 1e5;
    m.omega_l0 = 1e5;
    m.k = k;
    m.n_fock = 30;
    CHECK(constant_generator_check(m, 20e-6) < 1e-10);
  }

  TEST_CASE("model validation") {
    CavityModel m;
    m.n_fock = 10;
    m.k = k;
    m.delta_cl = -1e5;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.n_fock = 40;
    CHECK_NOTHROW(m.validate());
    CHECK_THROWS_AS(propagate(m, ground_vacuum(m), 1e-6, 1.0), ConfigError);
  }

  TEST_CASE("truncation is monitored") {
    CavityModel m;
    m.n_fock = 30;
    m.k = k;
    m.omega_c0 = 437;
    m.delta_cl = -1e5;
    m.omega_l0 = 1e6;  // |eta| = 10 needs far more than 30 levels
    CHECK_THROWS_AS(propagate(m, ground_vacuum(m), 50e-6, max_stable_step(m)), TruncationError);
  }

  TEST_CASE("single rung light shift") {
    LadderSpec s;
    s.omega_a0 = 3.27e5;
    s.omega_c0 = 437;
    s.k = k;
    s.tau = 1.6 / s.omega_a0;
    const auto r = effective_phase_experiment(ladder_model(s, 0.1));
    CHECK(r.phi_full > 0.0);
    CHECK(r.rel_err < 0.06);
    CHECK(r.p_excite_max < 4 * r.mu_abs * r.mu_abs);
    CHECK(r.richardson_phase < 1e-8);
    // far outside the perturbative regime the experiment refuses to run
    CHECK_THROWS_AS(effective_phase_experiment(ladder_model(s, 0.8)), ConfigError);
  }
}
