#include <doctest.h>

#include <cmath>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/gaussian.hpp"
#include "kdsim/wavepacket.hpp"

using namespace kdsim;

namespace {
const double m = 1e8 * si::amu;
const double k = 2 * si::pi / 780e-9;
const double dp = m * 13e-6;
}  // namespace

TEST_SUITE("wavepacket") {
  TEST_CASE("gaussian initial state") {
    const auto s = init_gaussian(dp, m, 16384, 10.0);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.variance_p() == doctest::Approx(dp * dp).epsilon(1e-10));
    CHECK(std::abs(s.mean_p()) < 1e-12 * dp);
    CHECK_THROWS_AS(init_gaussian(dp, m, 1000, 10.0), ConfigError);
  }

  TEST_CASE("kicks and free evolution are unitary") {
    const auto s = init_gaussian(dp, m, aligned_grid(dp, si::hbar * k, 4 * si::hbar * k));
    const auto kicked = apply_kick(s, {2.0, k});
    CHECK(kicked.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kicked.mean_p() == doctest::Approx(2 * si::hbar * k).epsilon(1e-9));
    const auto frac = apply_kick(s, {0.37, k});
    CHECK(frac.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const auto back = free_propagate(free_evolve(s, 3e-3), -3e-3);
    CHECK(max_abs_difference(back, s) < 1e-12);
    CHECK_THROWS_AS(free_evolve(s, -1.0), ConfigError);
  }

  TEST_CASE("grid characteristic function") {
    const auto s = init_gaussian(dp, m, 16384, 10.0);
    const GaussianState g{m, dp, 1.2e-3, 0.0, 0.0};
    const cplx a = char_fn(g, 1.3, 2.7, k);
    CHECK(std::abs(grid_char_fn(s, 1.3, 2.7, k, 1.2e-3) - a) < 1e-9 * std::abs(a));
  }

  TEST_CASE("two-time reordering phase") {
    const auto s = init_gaussian(dp, m, aligned_grid(dp, si::hbar * k, 4 * si::hbar * k, 10.0));
    const double dt = 1.2e-3;
    const TimedKick ab[] = {{{2, k}, 0.0}, {{2, k}, dt}};
    const TimedKick ba[] = {{{2, k}, dt}, {{2, k}, 0.0}};
    const double phase = std::arg(expect_shift_product(s, ab) / expect_shift_product(s, ba));
    CHECK(phase == doctest::Approx(-2 * theta_q(k, m, dt)).epsilon(1e-9));
  }

  TEST_CASE("support leaving the grid is an error") {
    const auto s = init_gaussian(dp, m, 1024, 8.0);
    CHECK_THROWS_AS(apply_kick(s, {dp / (si::hbar * k), k}), GridError);
  }
}
