#pragma once

#include <complex>
#include <span>
#include <vector>

#include "kdsim/harmonics.hpp"

namespace kdsim {

// Freely falling minimum-uncertainty packet released at t0 with zero mean
// momentum (plus an optional classical drift and uniform acceleration along x).
struct GaussianState {
  double mass = 0.0;     // kg
  double delta_p = 0.0;  // kg m/s, momentum standard deviation
  double t_free = 0.0;   // s since release
  double v_drift = 0.0;  // m/s
  double g_x = 0.0;      // m/s^2

  void validate() const;
};

// exp(i n k x(t)) with x(t) the Heisenberg position at time t after release.
struct Insertion {
  double n = 0.0;
  double t = 0.0;
};

// A standing-wave function f(k x(t)) inserted at time t after release.
struct TimedSeries {
  HarmonicSeries f;
  double t = 0.0;
};

// <G| exp(i n1 k x) exp(i n2 k v t_free) |G>, closed form.
cplx char_fn(const GaussianState& state, double n1, double n2, double k);

// <G| prod_j exp(i n_j k x(t_j)) |G>, operators applied right to left.
cplx multi_time_char(const GaussianState& state, std::span<const Insertion> ops, double k);

// <G| prod_j f_j(k x(t_j)) |G> by expanding every factor into harmonics.
cplx expect_series_product(const GaussianState& state, std::span<const TimedSeries> ops, double k);

// <cos^4(k x(t_free))>, all harmonics kept.
double expect_cos4(const GaussianState& state, double k);

struct TwoTimeExpectation {
  cplx full;                   // every harmonic of cos^2(k x(t1)) cos^2(k x(t1+dt))
  cplx long_time;              // 1/4 + e^{i theta_q} G(dt) / 8
  double dropped_suppression;  // exp(-(2 k dp t1 / m)^2 / 2), bound on each dropped term
};

TwoTimeExpectation expect_cos2cos2(const GaussianState& state_at_t1, double dt, double k);

// Commutator phase 2 hbar k^2 dt / m.
double theta_q(double k, double mass, double dt);

// exp(-(2 k dp dt / m)^2 / 2).
double visibility_G(double delta_p, double mass, double k, double dt);

struct PulsePair {
  double xi1 = 0.0;
  double xi2 = 0.0;
  cplx alpha_l{};
  cplx beta_l{};
  double dt = 0.0;   // t2 - t1
  double dt1 = 0.0;  // t1 - t0

  void validate() const;
};

struct SignalBreakdown {
  double p_total = 0.0;
  double p_background = 0.0;  // 3 (xi1^2 |alpha|^2 + xi2^2 |beta|^2) / 8
  double p_interference = 0.0;
  double theta_q = 0.0;
  double visibility_G = 0.0;
};

struct SignalComparison {
  SignalBreakdown closed;  // long-time closed form
  SignalBreakdown full;    // all harmonics kept
  double abs_diff = 0.0;
};

// Two-path signal. The packet's free-fall time before the first pulse is
// pulses.dt1; state.t_free is not used.
SignalComparison signal(const PulsePair& pulses, const GaussianState& state, double k);

// Probability of the mirror-image (-x) scattered atoms, 3 (xi1^2 + xi2^2) / 8.
double p_reference(double xi1, double xi2);

struct ScatteredProbability {
  double with_coherence;     // xi^2 <cos^4(k x)>
  double position_averaged;  // 3 xi^2 / 8, particle coherence discarded
};

ScatteredProbability scattered_probability(const GaussianState& state, double xi, double k);

// Exact populations of atomic diffraction orders -max_order..max_order after
// one pulse, averaged over the particle position distribution at t_free.
std::vector<double> order_populations(const GaussianState& state, double xi, double k, int max_order);

}  // namespace kdsim
