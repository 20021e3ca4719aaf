#pragma once

#include <array>
#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "kdsim/gaussian.hpp"
#include "kdsim/harmonics.hpp"
#include "kdsim/wavepacket.hpp"

namespace kdsim {

// Four-pulse layout. Times are measured from the particle's release.
// Pulses 1 and 2 are the particle-mediated standing-wave kicks, 3 and 4 the
// classical recombination pulses.
struct PathSpec {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  std::array<int, 4> kick_sign{+1, +1, -1, -1};
  std::array<double, 2> xi{0.0, 0.0};
  std::array<cplx, 2> recombiner{cplx{}, cplx{}};  // alpha_l, beta_l
  double k = 0.0;
  bool exact_pulses = false;  // keep every order in xi instead of truncating at linear

  double dt() const { return t2 - t1; }
  double big_t() const { return t3 - t1; }
  bool symmetric() const;
  // Throws ConfigError unless t1 <= t2 <= t3 <= t4 and t4 - t3 = t2 - t1.
  void validate() const;
};

// coeff * f_0(k x(t_0)) * f_1(k x(t_1)) * ..., written left to right.
struct NpProgram {
  std::vector<TimedSeries> factors;
};

struct PathPrograms {
  NpProgram red;   // R_N without the common free propagator
  NpProgram blue;  // B_N
  cplx atomic_phase{};            // exp(-2 i hbar k^2 T / m_a), shared by both paths
  double atomic_cancellation = 0.0;  // |R_A psi - B_A psi| on the probe state
  double literal_vs_heisenberg = 0.0;  // time-ordered vs Heisenberg forms, atom and particle sectors
};

struct AtomProbe {
  double mass = 0.0;     // kg
  double delta_p = 0.0;  // kg m/s; 0 selects hbar k
};

// Builds the particle-sector programs after checking on an atomic grid state
// that the atomic parts of both paths coincide.
PathPrograms path_operators(const PathSpec& spec, const AtomProbe& atom);

// Particle-sector programs only, no atomic check.
std::pair<NpProgram, NpProgram> particle_programs(const PathSpec& spec);

using NpState = std::variant<GaussianState, GridState>;

// P = <N(t1)| (R_N + B_N)^dag (R_N + B_N) |N(t1)>. A GaussianState is taken
// at release (its t_free is ignored; the pulse times set the clock); a
// GridState holds the release-time momentum amplitudes.
SignalBreakdown general_signal(const PathSpec& spec, const NpState& np);

// |P with the shared atomic recoil phase - P without it|.
double recoil_phase_check(const PathSpec& spec, const NpState& np, double atom_mass);

// Time-ordered path operators against their Heisenberg forms on grid states;
// largest state difference over atom and particle sectors.
double literal_form_check(const PathSpec& spec, const GridState& atom, const GridState& np);

struct FactorizationOptions {
  double dt = 1.2e-3;             // s, between the two kicks
  double np_mass = 0.0;           // kg; 0 selects 1e8 amu
  double atom_mass = 0.0;         // kg; 0 selects 86.909 amu
  double lambda = 780e-9;         // m
  double momentum_width = 1.0;    // initial Gaussian width in ring momentum units (2 hbar k)
};

struct FactorizationRow {
  double xi = 0.0;
  double error = 0.0;  // |b - a <a|b>|, exact a versus factorized b
};

struct FactorizationReport {
  int n_atoms = 0;
  int grid_size = 0;
  std::vector<FactorizationRow> rows;
  double exponent = 0.0;  // fitted slope of log(error) vs log(xi); 0 when fewer than two nonzero rows
};

// Positions on a ring of grid_size points spanning lambda/2 per particle.
// Compares [prod_j e^{i xi'_j(dt)}][prod_j e^{i xi_j}] with
// prod_j [e^{i xi'_j(dt)} e^{i xi_j}], xi_j = 4 xi cos^2(kx) cos^2(k x_aj).
FactorizationReport many_atom_factorization_check(int n_atoms, std::span<const double> xis, int grid_size,
                                                  const FactorizationOptions& opts = {});

}  // namespace kdsim
