#include <doctest.h>

#include <cmath>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/interferometer.hpp"

using namespace kdsim;

namespace {
const double m = 1e8 * si::amu;
const double ma = 86.909 * si::amu;
const double k = 2 * si::pi / 780e-9;
const double dp = m * 13e-6;
const double h = 1 / std::sqrt(2.0);

PathSpec layout(double dt) {
  PathSpec s;
  s.t1 = 0.1;
  s.t2 = 0.1 + dt;
  s.t3 = s.t2 + 2e-3;
  s.t4 = s.t3 + dt;
  s.xi = {0.0207, 0.0207};
  s.recombiner = {h, h};
  s.k = k;
  return s;
}
}  // namespace

TEST_SUITE("interferometer") {
  TEST_CASE("layout validation") {
    auto s = layout(1e-3);
    CHECK(s.symmetric());
    s.t4 += 1e-4;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("symmetric"), ConfigError);
    s = layout(1e-3);
    s.kick_sign = {1, -1, -1, 1};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = layout(1e-3);
    s.t2 = s.t1 - 1e-3;
    CHECK_THROWS_AS(s.validate(), ConfigError);
  }

  TEST_CASE("atomic parts coincide") {
    const auto p = path_operators(layout(1.2e-3), {ma, 0.0});
    CHECK(p.atomic_cancellation < 1e-10);
    CHECK(p.literal_vs_heisenberg < 1e-10);
    CHECK(std::abs(std::abs(p.atomic_phase) - 1.0) < 1e-15);
  }

  TEST_CASE("grid and analytic signals agree") {
    const GaussianState g{m, dp, 0.0, 0.0, 0.0};
    const auto np = init_gaussian(dp, m, aligned_grid(dp, 2 * si::hbar * k, 4 * si::hbar * k, 10.0));
    for (double dt : {0.5e-3, 1.2e-3}) {
      const auto spec = layout(dt);
      const double a = general_signal(spec, g).p_total;
      const double b = general_signal(spec, np).p_total;
      CHECK(std::abs(a - b) < 1e-10 * a);
      const PulsePair pp{0.0207, 0.0207, h, h, dt, 0.1};
      CHECK(std::abs(signal(pp, g, k).closed.p_total - a) < 1e-10 * a);
      CHECK(recoil_phase_check(spec, g, ma) < 1e-15 * a);
    }
  }

  TEST_CASE("coincident pulses") {
    auto spec = layout(0.0);
    const GaussianState g{m, dp, 0.0, 0.0, 0.0};
    const auto s = general_signal(spec, g);
    CHECK(s.visibility_G == 1.0);
    CHECK(s.p_total == doctest::Approx(3.0 * 0.0207 * 0.0207 / 8.0 + 0.375 * 0.0207 * 0.0207));
  }

  TEST_CASE("many-atom factorization") {
    const double xis[] = {0.04, 0.02, 0.01};
    const auto two = many_atom_factorization_check(2, xis, 8);
    CHECK(two.exponent == doctest::Approx(2.0).epsilon(0.1));
    for (const auto& r : many_atom_factorization_check(1, xis, 8).rows) CHECK(r.error < 1e-12);
    FactorizationOptions o;
    o.dt = 0.0;
    for (const auto& r : many_atom_factorization_check(2, xis, 8, o).rows) CHECK(r.error < 1e-12);
    CHECK_THROWS_AS(many_atom_factorization_check(4, xis, 8), ConfigError);
  }
}
