#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/gaussian.hpp"

using namespace kdsim;

namespace {
const double m = 1e8 * si::amu;
const double k = 2 * si::pi / 780e-9;
const double dp = m * 13e-6;
}  // namespace

TEST_SUITE("gaussian") {
  TEST_CASE("characteristic function") {
    const GaussianState g{m, dp, 0.0, 0.0, 0.0};
    CHECK(std::abs(char_fn(g, 0, 0, k) - 1.0) < 1e-15);
    CHECK(std::abs(char_fn(g, 2, 2, k)) == doctest::Approx(1.0).epsilon(1e-6));
    GaussianState later = g;
    later.t_free = 1.2e-3;
    CHECK(std::abs(char_fn(later, 0, 2, k)) == doctest::Approx(0.969).epsilon(1e-3));
    CHECK(multi_time_char(g, {}, k) == cplx(1.0));
  }

  TEST_CASE("theta_q and visibility") {
    CHECK(theta_q(k, m, 1.2e-3) == doctest::Approx(9.89e-5).epsilon(0.005));
    CHECK(visibility_G(dp, m, k, 1.2e-3) == doctest::Approx(0.969).epsilon(1e-3));
    CHECK(visibility_G(dp, m, k, 0.0) == 1.0);
    CHECK(theta_q(k, m, 0.0) == 0.0);
  }

  TEST_CASE("cos^4 limits") {
    const GaussianState wide{m, dp, 1.0, 0.0, 0.0};
    CHECK(expect_cos4(wide, k) == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
    // localized packet at the origin: cos^4(0) = 1
    const GaussianState tight{m, 1e3 * si::hbar * k, 0.0, 0.0, 0.0};
    CHECK(expect_cos4(tight, k) == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("scattered and reference probabilities") {
    CHECK(p_reference(0.3, 0.1) == doctest::Approx(3.0 * (0.09 + 0.01) / 8.0).epsilon(1e-15));
    CHECK_THROWS_AS(p_reference(-0.1, 0.1), ConfigError);
    const GaussianState wide{m, dp, 0.1, 0.0, 0.0};
    const auto s = scattered_probability(wide, 0.02, k);
    CHECK(s.with_coherence == doctest::Approx(s.position_averaged).epsilon(1e-10));
  }

  TEST_CASE("order populations sum to one") {
    const GaussianState wide{m, dp, 0.1, 0.0, 0.0};
    const auto pops = order_populations(wide, 0.5, k, 8);
    CHECK(std::accumulate(pops.begin(), pops.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pops[7] == doctest::Approx(pops[9]).epsilon(1e-14));
  }

  TEST_CASE("closed-form signal") {
    const double h = 1 / std::sqrt(2.0);
    const GaussianState g{m, dp, 0.0, 0.0, 0.0};
    const PulsePair pp{0.0207, 0.0207, h, h, 1.2e-3, 0.1};
    const auto s = signal(pp, g, k);
    CHECK(s.closed.p_background == doctest::Approx(3.0 * 0.0207 * 0.0207 / 8.0));
    CHECK(s.abs_diff < 1e-15);
    // coincident pulses: G = 1, theta = 0
    const PulsePair same{0.0207, 0.0207, h, h, 0.0, 0.1};
    const auto z = signal(same, g, k);
    CHECK(z.closed.visibility_G == 1.0);
    CHECK(z.closed.p_interference == doctest::Approx(0.0207 * 0.0207 * 0.375));
    PulsePair bad = pp;
    bad.alpha_l = 1.5;
    CHECK_THROWS_AS(signal(bad, g, k), ConfigError);
  }
}
